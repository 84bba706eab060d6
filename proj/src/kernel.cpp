#include "dppgeo/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dppgeo/errors.hpp"

namespace dppgeo {
namespace {

void require_square(const Matrix& raw, const char* what) {
  if (raw.rows() != raw.cols() || raw.rows() < 1)
    fail(ErrorKind::shape, std::string(what) + " must be a nonempty square matrix");
  if (raw.rows() > kMaxKernelM)
    fail(ErrorKind::capacity, std::string(what) + " larger than " + std::to_string(kMaxKernelM));
  if (!raw.allFinite()) fail(ErrorKind::shape, std::string(what) + " has non-finite entries");
  const double asym = max_asymmetry(raw);
  if (asym > kSymmetryTolerance)
    fail(ErrorKind::shape, std::string(what) + " is not symmetric (max asymmetry " +
                               std::to_string(asym) + ")");
}

Vector symmetric_eigenvalues(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

void require_enumerable(int m) {
  if (m > kMaxEnumerationM)
    fail(ErrorKind::capacity, "enumeration needs m <= " + std::to_string(kMaxEnumerationM));
}

}  // namespace

LKernel LKernel::validate(const Matrix& raw) {
  require_square(raw, "L kernel");
  Matrix l = 0.5 * (raw + raw.transpose());
  const Vector ev = symmetric_eigenvalues(l);
  const double norm = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() <= kPdRelativeTolerance * norm)
    fail(ErrorKind::domain,
         "L kernel is not positive definite (smallest eigenvalue " + std::to_string(ev.minCoeff()) + ")");
  return LKernel(std::move(l));
}

MarginalKernel MarginalKernel::validate(const Matrix& raw) {
  require_square(raw, "marginal kernel");
  Matrix k = 0.5 * (raw + raw.transpose());
  const Vector ev = symmetric_eigenvalues(k);
  if (ev.maxCoeff() >= 1.0 - 1e-10)
    fail(ErrorKind::domain, "not an L-ensemble: marginal kernel eigenvalue " +
                                std::to_string(ev.maxCoeff()) + " reaches 1");
  if (ev.minCoeff() <= kPdRelativeTolerance)
    fail(ErrorKind::domain, "not an L-ensemble: marginal kernel eigenvalue " +
                                std::to_string(ev.minCoeff()) + " is not positive");
  return MarginalKernel(std::move(k));
}

Matrix ScalingDecomposition::correlation() const {
  const int n = m();
  Matrix r = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r(i, j) = r(j, i) = rho[pair_index(n, i, j)];
  return r;
}

Matrix ScalingDecomposition::reconstruct() const {
  return d.asDiagonal() * correlation() * d.asDiagonal();
}

Vector UPoint::stacked() const {
  Vector out(dimension());
  out << u1, u2;
  return out;
}

UPoint UPoint::from_stacked(const Vector& coords, const UPoint& like) {
  UPoint u;
  u.u1 = coords.head(like.u1.size());
  u.u2 = coords.tail(like.u2.size());
  u.signs = like.signs;
  return u;
}

UPoint UPoint::unsigned_copy() const {
  UPoint u = *this;
  std::fill(u.signs.begin(), u.signs.end(), 1);
  return u;
}

void check_shape(const UPoint& u) {
  const int m = u.m();
  if (m < 1) fail(ErrorKind::shape, "u point needs at least one singleton coordinate");
  if (m > kMaxKernelM) fail(ErrorKind::capacity, "u point ground set too large");
  if (u.u2.size() != pair_count(m) || static_cast<int>(u.signs.size()) != pair_count(m))
    fail(ErrorKind::shape, "u2 and signs must have m(m-1)/2 entries");
  for (int s : u.signs)
    if (s != 1 && s != -1) fail(ErrorKind::shape, "signs must be +1 or -1");
  if (!u.u1.allFinite() || !u.u2.allFinite()) fail(ErrorKind::domain, "u has non-finite entries");
}

MarginalKernel l_to_k(const LKernel& l) {
  const int m = l.m();
  const Matrix shifted = l.matrix() + Matrix::Identity(m, m);
  Matrix k = shifted.llt().solve(l.matrix());
  return MarginalKernel(0.5 * (k + k.transpose()));
}

LKernel k_to_l(const MarginalKernel& k) {
  const int m = k.m();
  const Matrix complement = Matrix::Identity(m, m) - k.matrix();
  Matrix l = complement.llt().solve(k.matrix());
  return LKernel::validate(0.5 * (l + l.transpose()));
}

ScalingDecomposition diagonal_scaling(const LKernel& l) {
  const int m = l.m();
  ScalingDecomposition s;
  s.d = l.matrix().diagonal().cwiseSqrt();
  s.rho.resize(pair_count(m));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      s.rho[pair_index(m, i, j)] = l.matrix()(i, j) / (s.d[i] * s.d[j]);
  return s;
}

UPoint u_from_l(const LKernel& l) {
  const auto s = diagonal_scaling(l);
  UPoint u;
  u.u1 = l.matrix().diagonal().array().log();
  u.u2.resize(s.rho.size());
  u.signs.resize(s.rho.size());
  for (Eigen::Index p = 0; p < s.rho.size(); ++p) {
    u.u2[p] = std::log1p(-s.rho[p] * s.rho[p]);
    u.signs[p] = s.rho[p] < 0 ? -1 : 1;
  }
  return u;
}

LKernel l_from_u(const UPoint& u) {
  check_shape(u);
  ScalingDecomposition s;
  s.d = (0.5 * u.u1.array()).exp();
  s.rho.resize(u.u2.size());
  for (Eigen::Index p = 0; p < u.u2.size(); ++p) {
    if (u.u2[p] > 0) fail(ErrorKind::domain, "u outside model domain: u2 entry is positive");
    s.rho[p] = u.signs[p] * std::sqrt(-std::expm1(u.u2[p]));
  }
  const Vector ev = symmetric_eigenvalues(s.correlation());
  if (ev.minCoeff() <= kPdRelativeTolerance * ev.cwiseAbs().maxCoeff())
    fail(ErrorKind::domain, "u outside model domain: correlation matrix is not positive definite");
  return LKernel::validate(s.reconstruct());
}

double log_normalizer(const LKernel& l) {
  return log_det_lu(l.matrix() + Matrix::Identity(l.m(), l.m())).log_abs;
}

double pmf(const LKernel& l, const SubsetId& subset) {
  if (subset.m != l.m()) fail(ErrorKind::domain, "subset and kernel sizes differ");
  const auto minor = log_det_lu(principal_submatrix(l.matrix(), subset.bits));
  return std::exp(minor.log_abs - log_normalizer(l));
}

std::vector<double> pmf_table(const LKernel& l) {
  const int m = l.m();
  require_enumerable(m);
  const double z = log_normalizer(l);
  std::vector<double> table(std::size_t{1} << m);
  for (std::uint64_t b = 0; b < table.size(); ++b)
    table[b] = std::exp(log_det_lu(principal_submatrix(l.matrix(), b)).log_abs - z);
  return table;
}

double inclusion_prob(const MarginalKernel& k, const SubsetId& subset) {
  if (subset.m != k.m()) fail(ErrorKind::domain, "subset and kernel sizes differ");
  return principal_minor(k.matrix(), subset.bits);
}

std::vector<SubsetId> sample(const LKernel& l, std::mt19937_64& rng, std::size_t n) {
  require_enumerable(l.m());
  if (n == 0) return {};
  const auto table = pmf_table(l);
  std::vector<double> cdf(table.size());
  std::partial_sum(table.begin(), table.end(), cdf.begin());
  std::uniform_real_distribution<double> unif(0.0, cdf.back());
  std::vector<SubsetId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), unif(rng));
    if (it == cdf.end()) --it;
    out.push_back({static_cast<std::uint64_t>(it - cdf.begin()), l.m()});
  }
  return out;
}

std::vector<SubsetId> sample(const LKernel& l, std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  return sample(l, rng, n);
}

}  // namespace dppgeo
