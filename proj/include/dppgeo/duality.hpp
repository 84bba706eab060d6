#pragma once

#include <vector>

#include "dppgeo/embedding.hpp"
#include "dppgeo/kernel.hpp"
#include "dppgeo/linalg.hpp"

namespace dppgeo {

/// Expectation parameters eta_I = E[T_I] for all nonempty I, (k, lex) order.
struct EtaPoint {
  int m = 0;
  Vector values;
};

/// (eta_{1}, ..., eta_{m}; u2): singleton expectations paired with the
/// pair coordinates.
struct MixedPoint {
  Vector eta1;
  Vector u2;
  std::vector<int> signs;

  int m() const noexcept { return static_cast<int>(eta1.size()); }
};

/// eta_I = det K_I (m <= 12).
EtaPoint eta_from_k(const MarginalKernel& k);

/// Gradient of psi in the singleton coordinates: the diagonal of the model
/// marginal kernel.
Vector grad_psi_u1(const UPoint& u);

/// Hessian of psi in the singleton coordinates:
/// K_aa (1 - K_aa) on the diagonal, -K_ab^2 off it.
Matrix hessian_psi_u1(const UPoint& u);

struct LaplaceCheck {
  double direct;    // K_11 from L (L + I)^{-1}
  double cofactor;  // 1 - e^{-u_1} Delta_11 / det(R + D^{-2})
  double abs_diff;
};

/// K_11 two ways: directly, and via the (1,1) cofactor of R + D^{-2}.
LaplaceCheck laplace_check_k11(const UPoint& u);

MixedPoint mixed_from_u(const UPoint& u);

struct NewtonSettings {
  int max_iterations = 100;
  double tolerance = 1e-10;  // on || grad psi - eta1 ||_inf
};

struct MixedInversion {
  UPoint u;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves grad_{u1} psi(u1; u2) = eta1 by damped Newton from u1 = 0.
/// Throws a convergence error carrying the final residual when it fails.
MixedInversion invert_mixed(const MixedPoint& omega, const NewtonSettings& settings = {});

inline UPoint u_from_mixed(const MixedPoint& omega, const NewtonSettings& settings = {}) {
  return invert_mixed(omega, settings).u;
}

/// Legendre transform of psi in u1 at fixed u2: <u1*, eta1> - psi(u1*; u2).
double legendre_psi_star(const MixedPoint& omega, const NewtonSettings& settings = {});

/// KL divergence D[P_u : P_v] by summing over all 2^m subsets.
double kl_direct(const UPoint& u, const UPoint& v);

/// psi*(omega(u)) + psi(v) - <v1, eta1(u)>; requires u2 and signs of u and
/// v to coincide exactly.
double kl_legendre(const UPoint& u, const UPoint& v);

}  // namespace dppgeo
