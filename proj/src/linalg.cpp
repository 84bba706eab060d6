#include "dppgeo/linalg.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace dppgeo {

double det_lu(const Matrix& a) {
  if (a.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Matrix>(a).determinant();
}

LogDet log_det_lu(const Matrix& a) {
  if (a.rows() == 0) return {1, 0.0};
  Eigen::PartialPivLU<Matrix> lu(a);
  const auto& lu_mat = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < lu_mat.rows(); ++i) {
    const double p = lu_mat(i, i);
    if (p == 0.0 || !std::isfinite(p)) return {0, -std::numeric_limits<double>::infinity()};
    if (p < 0) sign = -sign;
    log_abs += std::log(std::abs(p));
  }
  return {sign, log_abs};
}

Matrix principal_submatrix(const Matrix& a, std::uint64_t bits) {
  const int k = std::popcount(bits);
  std::vector<int> idx;
  idx.reserve(k);
  for (std::uint64_t b = bits; b != 0; b &= b - 1) idx.push_back(std::countr_zero(b));
  Matrix sub(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) sub(r, c) = a(idx[r], idx[c]);
  return sub;
}

double principal_minor(const Matrix& a, std::uint64_t bits) {
  switch (std::popcount(bits)) {
    case 0: return 1.0;
    case 1: return a(std::countr_zero(bits), std::countr_zero(bits));
    default: return det_lu(principal_submatrix(a, bits));
  }
}

double max_asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

PseudoInverse symmetric_pinv(const Matrix& a, double rel_threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  const Vector& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(ev.size());
  int dropped = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) > rel_threshold * scale)
      inv[i] = 1.0 / ev[i];
    else
      ++dropped;
  }
  return {es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose(), dropped};
}

}  // namespace dppgeo
