#pragma once

#include <vector>

#include "dppgeo/kernel.hpp"
#include "dppgeo/lattice.hpp"
#include "dppgeo/linalg.hpp"

namespace dppgeo {

/// Canonical parameter of the log-linear family over all nonempty subsets,
/// laid out in SubsetIndex (cardinality, lex) order.
struct ThetaPoint {
  int m = 0;
  Vector values;
};

/// Kernel represented by the curved family at u: L = D R D with the
/// correlations taken as |rho| = sqrt(1 - exp(u2)), i.e. signs ignored.
LKernel model_kernel(const UPoint& u);

/// Embeds u into the log-linear family. The first m entries are u1, the next
/// m(m-1)/2 are u2, and each higher-order entry follows the layer recursion
///   theta^I = log det R_I - sum_{J subset I, 3 <= |J| < |I|} theta^J
///             - sum_{pairs p subset I} u2_p.
/// Throws a domain error if any principal correlation submatrix has a
/// nonpositive determinant.
ThetaPoint theta_from_u(const UPoint& u);

/// Inverse of theta_from_u on the model: u is read off the singleton and pair
/// layers (signs +1). Throws a domain error when the higher layers differ
/// from theta(u) by more than `tolerance` (relative to max(1, |theta|)).
UPoint u_from_theta(const ThetaPoint& theta, double tolerance = 1e-8);

/// Conditional potential psi(u) = sum_a u1_a + log det(R + D^{-2}), which
/// equals log det(L + I) for the model kernel.
double psi(const UPoint& u);

/// For every mask A, sum_{nonempty J subset A} theta^J (subset-sum transform).
std::vector<double> statistic_sums(const ThetaPoint& theta);

/// Log-partition function of the log-linear family (max-shifted
/// log-sum-exp over all 2^m subsets).
double phi(const ThetaPoint& theta);

double loglinear_pmf(const ThetaPoint& theta, const SubsetId& subset);
/// All 2^m probabilities, indexed by mask.
std::vector<double> loglinear_table(const ThetaPoint& theta);

// Closed forms for the two smallest ground sets. Pairs are in lex order
// (u12, u13, u23).

double theta123_m3(const Vector& u2);
double psi_m3(const UPoint& u);
double psi_m2(const UPoint& u);

struct ClosedFormM2 {
  double k11;
  double k22;
  double det_k;
};
ClosedFormM2 k_closed_m2(const UPoint& u);

}  // namespace dppgeo
