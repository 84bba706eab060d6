#include "dppgeo/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dppgeo/errors.hpp"

namespace dppgeo {
namespace {

void require_u2_nonpositive(const UPoint& u) {
  for (Eigen::Index p = 0; p < u.u2.size(); ++p)
    if (u.u2[p] > 0) fail(ErrorKind::domain, "u outside model domain: u2 entry is positive");
}

Vector abs_correlations(const UPoint& u) {
  Vector r(u.u2.size());
  for (Eigen::Index p = 0; p < u.u2.size(); ++p) r[p] = std::sqrt(-std::expm1(u.u2[p]));
  return r;
}

Matrix abs_correlation_matrix(const UPoint& u) {
  const int m = u.m();
  const Vector r = abs_correlations(u);
  Matrix out = Matrix::Identity(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) out(i, j) = out(j, i) = r[pair_index(m, i, j)];
  return out;
}

// Principal submatrix with its rows ordered by their sorted off-diagonal
// entries rather than by label, so relabelled inputs give identical matrices.
Matrix label_free_submatrix(const Matrix& corr, std::uint64_t mask) {
  std::vector<int> idx;
  for (int i = 0; mask >> i; ++i)
    if ((mask >> i) & 1u) idx.push_back(i);
  const std::size_t k = idx.size();
  std::vector<std::vector<double>> keys(k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b)
      if (a != b) keys[a].push_back(corr(idx[a], idx[b]));
    std::sort(keys[a].begin(), keys[a].end(), std::greater<>());
  }
  std::vector<std::size_t> order(k);
  for (std::size_t a = 0; a < k; ++a) order[a] = a;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  Matrix out(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out(a, b) = corr(idx[order[a]], idx[order[b]]);
  return out;
}

void require_enumerable(int m) {
  if (m > kMaxEnumerationM)
    fail(ErrorKind::capacity, "enumeration needs m <= " + std::to_string(kMaxEnumerationM));
}

}  // namespace

LKernel model_kernel(const UPoint& u) { return l_from_u(u.unsigned_copy()); }

ThetaPoint theta_from_u(const UPoint& u) {
  check_shape(u);
  require_u2_nonpositive(u);
  const int m = u.m();
  require_enumerable(m);
  const SubsetIndex index(m);
  const Matrix corr = abs_correlation_matrix(u);

  ThetaPoint theta{m, Vector::Zero(index.size())};
  theta.values.head(m) = u.u1;
  theta.values.segment(m, u.u2.size()) = u.u2;

  for (int k = 3; k <= m; ++k) {
    const int begin = index.layer_offset(k);
    const int end = begin + index.layer_size(k);
    for (int g = begin; g < end; ++g) {
      const std::uint64_t mask = index.mask_at(g);
      const LogDet ld = log_det_lu(label_free_submatrix(corr, mask));
      if (ld.sign <= 0)
        fail(ErrorKind::domain,
             "u outside model domain: correlation minor over a " + std::to_string(k) +
                 "-subset is not positive");
      double value = ld.log_abs;
      for (std::uint64_t sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask) {
        if (std::popcount(sub) >= 2) value -= theta.values[index.global_of(sub)];
      }
      theta.values[g] = value;
    }
  }
  return theta;
}

UPoint u_from_theta(const ThetaPoint& theta, double tolerance) {
  const int m = theta.m;
  require_enumerable(m);
  if (m < 1 || theta.values.size() != (Eigen::Index{1} << m) - 1)
    fail(ErrorKind::shape, "theta must have 2^m - 1 entries");
  UPoint u;
  u.u1 = theta.values.head(m);
  u.u2 = theta.values.segment(m, pair_count(m));
  u.signs.assign(pair_count(m), 1);
  const Vector model = theta_from_u(u).values;
  for (Eigen::Index g = 0; g < model.size(); ++g)
    if (std::abs(model[g] - theta.values[g]) > tolerance * std::max(1.0, std::abs(model[g])))
      fail(ErrorKind::domain, "theta does not lie on the DPP model (higher-order layers disagree)");
  return u;
}

double psi(const UPoint& u) {
  check_shape(u);
  require_u2_nonpositive(u);
  Matrix shifted = abs_correlation_matrix(u);
  shifted.diagonal().array() += (-u.u1.array()).exp();
  const LogDet ld = log_det_lu(shifted);
  if (ld.sign <= 0) fail(ErrorKind::domain, "u outside model domain: R + D^-2 is not positive definite");
  return u.u1.sum() + ld.log_abs;
}

std::vector<double> statistic_sums(const ThetaPoint& theta) {
  require_enumerable(theta.m);
  const SubsetIndex index(theta.m);
  if (theta.values.size() != index.size())
    fail(ErrorKind::shape, "theta must have 2^m - 1 entries");
  std::vector<double> sums(std::size_t{1} << theta.m, 0.0);
  for (int g = 0; g < index.size(); ++g) sums[index.mask_at(g)] = theta.values[g];
  for (int bit = 0; bit < theta.m; ++bit) {
    const std::uint64_t b = std::uint64_t{1} << bit;
    for (std::uint64_t mask = 0; mask < sums.size(); ++mask)
      if (mask & b) sums[mask] += sums[mask ^ b];
  }
  return sums;
}

double phi(const ThetaPoint& theta) {
  const auto sums = statistic_sums(theta);
  const double shift = *std::max_element(sums.begin(), sums.end());
  double total = 0.0;
  for (double s : sums) total += std::exp(s - shift);
  return shift + std::log(total);
}

std::vector<double> loglinear_table(const ThetaPoint& theta) {
  auto sums = statistic_sums(theta);
  const double shift = *std::max_element(sums.begin(), sums.end());
  double total = 0.0;
  for (double s : sums) total += std::exp(s - shift);
  const double log_z = shift + std::log(total);
  for (double& s : sums) s = std::exp(s - log_z);
  return sums;
}

double loglinear_pmf(const ThetaPoint& theta, const SubsetId& subset) {
  if (subset.m != theta.m) fail(ErrorKind::domain, "subset and theta sizes differ");
  const auto sums = statistic_sums(theta);
  return std::exp(sums[subset.bits] - phi(theta));
}

double theta123_m3(const Vector& u2) {
  if (u2.size() != 3) fail(ErrorKind::shape, "theta123_m3 needs (u12, u13, u23)");
  const double e12 = std::exp(u2[0]), e13 = std::exp(u2[1]), e23 = std::exp(u2[2]);
  const double root = std::sqrt((1 - e12) * (1 - e23) * (1 - e13));
  const double inner = e12 + e23 + e13 + 2 * root - 2;
  if (!(inner > 0)) fail(ErrorKind::domain, "u outside model domain: det R is not positive");
  return std::log(inner) - u2[0] - u2[1] - u2[2];
}

double psi_m3(const UPoint& u) {
  if (u.m() != 3 || u.u2.size() != 3) fail(ErrorKind::shape, "psi_m3 needs m = 3");
  const double a1 = 1 + std::exp(-u.u1[0]), a2 = 1 + std::exp(-u.u1[1]),
               a3 = 1 + std::exp(-u.u1[2]);
  const double s12 = 1 - std::exp(u.u2[0]), s13 = 1 - std::exp(u.u2[1]),
               s23 = 1 - std::exp(u.u2[2]);
  const double inner = a1 * a2 * a3 + 2 * std::sqrt(s12 * s13 * s23) - s12 * a3 - s13 * a2 - s23 * a1;
  return u.u1.sum() + std::log(inner);
}

double psi_m2(const UPoint& u) {
  if (u.m() != 2 || u.u2.size() != 1) fail(ErrorKind::shape, "psi_m2 needs m = 2");
  return u.u1[0] + u.u1[1] +
         std::log(std::exp(u.u2[0]) + std::exp(-u.u1[0]) + std::exp(-u.u1[1]) +
                  std::exp(-u.u1[0] - u.u1[1]));
}

ClosedFormM2 k_closed_m2(const UPoint& u) {
  if (u.m() != 2 || u.u2.size() != 1) fail(ErrorKind::shape, "k_closed_m2 needs m = 2");
  const double e1 = std::exp(-u.u1[0]), e2 = std::exp(-u.u1[1]), e12 = std::exp(u.u2[0]);
  const double denom = e1 + e2 + e1 * e2 + e12;
  return {(e2 + e12) / denom, (e1 + e12) / denom, e12 / denom};
}

}  // namespace dppgeo
