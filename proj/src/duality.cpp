#include "dppgeo/duality.hpp"

#include <cmath>
#include <string>

#include "dppgeo/errors.hpp"

namespace dppgeo {
namespace {

Matrix model_marginal(const UPoint& u) { return l_to_k(model_kernel(u)).matrix(); }

UPoint with_u1(const MixedPoint& omega, Vector u1) {
  UPoint u;
  u.u1 = std::move(u1);
  u.u2 = omega.u2;
  u.signs = omega.signs;
  return u;
}

void check_mixed(const MixedPoint& omega) {
  const int m = omega.m();
  if (m < 1) fail(ErrorKind::shape, "mixed point needs at least one singleton");
  if (omega.u2.size() != pair_count(m) || static_cast<int>(omega.signs.size()) != pair_count(m))
    fail(ErrorKind::shape, "u2 and signs must have m(m-1)/2 entries");
  for (Eigen::Index a = 0; a < omega.eta1.size(); ++a)
    if (!(omega.eta1[a] > 0.0 && omega.eta1[a] < 1.0))
      fail(ErrorKind::domain, "eta1 entries must lie strictly inside (0, 1)");
  for (Eigen::Index p = 0; p < omega.u2.size(); ++p)
    if (omega.u2[p] > 0) fail(ErrorKind::domain, "u2 entries must be <= 0");
}

}  // namespace

EtaPoint eta_from_k(const MarginalKernel& k) {
  const SubsetIndex index(k.m());
  EtaPoint eta{k.m(), Vector(index.size())};
  for (int g = 0; g < index.size(); ++g) eta.values[g] = principal_minor(k.matrix(), index.mask_at(g));
  return eta;
}

Vector grad_psi_u1(const UPoint& u) { return model_marginal(u).diagonal(); }

Matrix hessian_psi_u1(const UPoint& u) {
  const Matrix k = model_marginal(u);
  Matrix h = -k.cwiseProduct(k);
  for (Eigen::Index a = 0; a < k.rows(); ++a) h(a, a) = k(a, a) * (1.0 - k(a, a));
  return h;
}

LaplaceCheck laplace_check_k11(const UPoint& u) {
  check_shape(u);
  const int m = u.m();
  if (m < 2) fail(ErrorKind::precondition, "Laplace check needs m >= 2");
  const LKernel l = model_kernel(u);
  const double direct = l_to_k(l).matrix()(0, 0);

  const auto scaling = diagonal_scaling(l);
  Matrix shifted = scaling.correlation();
  shifted.diagonal().array() += (-u.u1.array()).exp();
  const double full = det_lu(shifted);
  const double cofactor_11 = det_lu(shifted.bottomRightCorner(m - 1, m - 1));
  const double via_cofactor = 1.0 - std::exp(-u.u1[0]) * cofactor_11 / full;
  return {direct, via_cofactor, std::abs(direct - via_cofactor)};
}

MixedPoint mixed_from_u(const UPoint& u) {
  check_shape(u);
  return {grad_psi_u1(u), u.u2, u.signs};
}

MixedInversion invert_mixed(const MixedPoint& omega, const NewtonSettings& settings) {
  check_mixed(omega);
  const int m = omega.m();
  MixedInversion out;
  out.u = with_u1(omega, Vector::Zero(m));
  Vector residual = grad_psi_u1(out.u) - omega.eta1;

  for (int it = 0; it < settings.max_iterations; ++it) {
    out.residual = residual.cwiseAbs().maxCoeff();
    if (out.residual < settings.tolerance) return out;

    const Vector step = hessian_psi_u1(out.u).ldlt().solve(-residual);
    const double current = residual.norm();
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 50; ++halvings, t *= 0.5) {
      UPoint trial = with_u1(omega, out.u.u1 + t * step);
      Vector trial_residual = grad_psi_u1(trial) - omega.eta1;
      if (trial_residual.allFinite() && trial_residual.norm() < current) {
        out.u = std::move(trial);
        residual = std::move(trial_residual);
        accepted = true;
        break;
      }
    }
    out.iterations = it + 1;
    if (!accepted) break;
  }
  out.residual = residual.cwiseAbs().maxCoeff();
  if (out.residual < settings.tolerance) return out;
  fail(ErrorKind::convergence, "mixed-coordinate Newton solve did not converge after " +
                                   std::to_string(out.iterations) + " iterations (residual " +
                                   std::to_string(out.residual) + ")");
}

double legendre_psi_star(const MixedPoint& omega, const NewtonSettings& settings) {
  const UPoint u = u_from_mixed(omega, settings);
  return u.u1.dot(omega.eta1) - psi(u);
}

double kl_direct(const UPoint& u, const UPoint& v) {
  check_shape(u);
  check_shape(v);
  if (u.m() != v.m()) fail(ErrorKind::shape, "KL needs points over the same ground set");
  const auto p = pmf_table(model_kernel(u));
  const auto q = pmf_table(model_kernel(v));
  double kl = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a)
    if (p[a] > 0) kl += p[a] * (std::log(p[a]) - std::log(q[a]));
  return kl;
}

double kl_legendre(const UPoint& u, const UPoint& v) {
  check_shape(u);
  check_shape(v);
  if (u.m() != v.m()) fail(ErrorKind::shape, "KL needs points over the same ground set");
  for (Eigen::Index p = 0; p < u.u2.size(); ++p)
    if (u.u2[p] != v.u2[p] || u.signs[p] != v.signs[p])
      fail(ErrorKind::precondition, "Legendre form of KL requires identical u2 and signs");
  const MixedPoint omega = mixed_from_u(u);
  return legendre_psi_star(omega) + psi(v) - v.u1.dot(omega.eta1);
}

}  // namespace dppgeo
