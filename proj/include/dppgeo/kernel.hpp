#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dppgeo/lattice.hpp"
#include "dppgeo/linalg.hpp"

namespace dppgeo {

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPdRelativeTolerance = 1e-12;

/// Positive definite L-ensemble kernel. Only obtainable through validation.
class LKernel {
 public:
  static LKernel validate(const Matrix& raw);

  int m() const noexcept { return static_cast<int>(l_.rows()); }
  const Matrix& matrix() const noexcept { return l_; }

 private:
  explicit LKernel(Matrix l) : l_(std::move(l)) {}
  Matrix l_;
};

/// Marginal kernel with spectrum strictly inside (0, 1).
class MarginalKernel {
 public:
  static MarginalKernel validate(const Matrix& raw);

  int m() const noexcept { return static_cast<int>(k_.rows()); }
  const Matrix& matrix() const noexcept { return k_; }

 private:
  explicit MarginalKernel(Matrix k) : k_(std::move(k)) {}
  friend MarginalKernel l_to_k(const LKernel& l);
  Matrix k_;
};

/// L = D R D with D = diag(sqrt(L_aa)) and unit-diagonal correlation R.
struct ScalingDecomposition {
  Vector d;    // length m
  Vector rho;  // length m(m-1)/2, lex pair order

  int m() const noexcept { return static_cast<int>(d.size()); }
  Matrix correlation() const;
  Matrix reconstruct() const;
};

/// Curved-family coordinates: u1_a = log L_aa, u2_ab = log(1 - rho_ab^2).
/// The sign of each rho is kept separately since u2 only sees |rho|.
struct UPoint {
  Vector u1;
  Vector u2;
  std::vector<int> signs;  // +1 / -1 per pair

  int m() const noexcept { return static_cast<int>(u1.size()); }
  int dimension() const noexcept { return static_cast<int>(u1.size() + u2.size()); }
  /// (u1, u2) stacked; the coordinate layout of every u-space vector.
  Vector stacked() const;
  /// Inverse of stacked(); signs are taken from `like`.
  static UPoint from_stacked(const Vector& coords, const UPoint& like);
  /// Same point with every sign set to +1.
  UPoint unsigned_copy() const;
};

/// Checks that the u-vector lengths agree and the signs are +-1.
void check_shape(const UPoint& u);

inline LKernel validate_l(const Matrix& raw) { return LKernel::validate(raw); }
inline MarginalKernel validate_k(const Matrix& raw) { return MarginalKernel::validate(raw); }

/// K = L (L + I)^{-1}.
MarginalKernel l_to_k(const LKernel& l);
/// L = K (I - K)^{-1}.
LKernel k_to_l(const MarginalKernel& k);

ScalingDecomposition diagonal_scaling(const LKernel& l);

UPoint u_from_l(const LKernel& l);
/// Rebuilds L from (u1, u2, signs). Throws a domain error when the implied
/// correlation matrix is not positive definite.
LKernel l_from_u(const UPoint& u);

/// P_L(Y = A) = det(L_A) / det(L + I).
double pmf(const LKernel& l, const SubsetId& subset);
/// Full probability table indexed by bitmask (m <= 12).
std::vector<double> pmf_table(const LKernel& l);
/// log det(L + I).
double log_normalizer(const LKernel& l);

/// P(A subset of Y) = det(K_A).
double inclusion_prob(const MarginalKernel& k, const SubsetId& subset);

/// Exact i.i.d. draws by inverse CDF over the enumerated table.
std::vector<SubsetId> sample(const LKernel& l, std::mt19937_64& rng, std::size_t n);
std::vector<SubsetId> sample(const LKernel& l, std::uint64_t seed, std::size_t n);

}  // namespace dppgeo
