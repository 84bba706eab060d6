#include "dppgeo/random_points.hpp"

namespace dppgeo {
namespace {

Matrix correlation_of(const Matrix& gram) {
  const Vector inv_sd = gram.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = inv_sd.asDiagonal() * gram * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return r;
}

}  // namespace

LKernel random_positive_kernel(int m, std::mt19937_64& rng, double u1_range) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> diag(-u1_range, u1_range);
  Matrix w(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) w(i, j) = unit(rng);
  Matrix gram = w * w.transpose();
  gram.diagonal().array() += 0.25 * m;
  Vector d(m);
  for (int i = 0; i < m; ++i) d[i] = std::exp(0.5 * diag(rng));
  return validate_l(d.asDiagonal() * correlation_of(gram) * d.asDiagonal());
}

UPoint random_u(int m, std::mt19937_64& rng, double u1_range) {
  return u_from_l(random_positive_kernel(m, rng, u1_range));
}

LKernel random_signed_kernel(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) w(i, j) = normal(rng);
  Matrix l = w * w.transpose() / m;
  l.diagonal().array() += 0.3;
  return validate_l(l);
}

}  // namespace dppgeo
