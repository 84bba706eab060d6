#pragma once

#include <vector>

#include "dppgeo/kernel.hpp"
#include "dppgeo/lattice.hpp"
#include "dppgeo/linalg.hpp"

namespace dppgeo {

inline constexpr int kMaxFitM = 10;

/// Observed subsets with multiplicities aggregated per bitmask.
class Dataset {
 public:
  Dataset(int m, std::vector<SubsetId> observations);

  int m() const noexcept { return m_; }
  const std::vector<SubsetId>& observations() const noexcept { return observations_; }
  /// counts()[mask] = number of observations equal to that subset.
  const std::vector<double>& counts() const noexcept { return counts_; }
  double size() const noexcept { return static_cast<double>(observations_.size()); }
  /// Empirical E[T_I] for every nonempty I in (k, lex) order.
  Vector mean_statistics() const;

 private:
  int m_;
  std::vector<SubsetId> observations_;
  std::vector<double> counts_;
};

/// sum_A count(A) log P_u(A), evaluated through theta(u) and psi(u).
double log_likelihood(const UPoint& u, const Dataset& data);

/// Gradient of the per-observation log-likelihood: B^T (Tbar - eta).
Vector score_u(const UPoint& u, const Dataset& data);

struct FitConfig {
  int max_iter = 200;
  double tol = 1e-8;  // on || score ||_inf
  int max_halvings = 40;
  double u2_lower = -30.0;
  double u2_upper = -1e-8;
  double u1_bound = 30.0;
};

struct FitResult {
  UPoint u_hat;
  double loglik = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  Matrix fisher_at_optimum;  // per-observation Fisher information in u
  bool converged = false;
  bool boundary_trap = false;
  std::vector<double> trace;  // log-likelihood after each accepted step
};

/// Natural-gradient ascent u <- u + t G(u)^{-1} score with backtracking
/// on the log-likelihood. Starts from logit-matched singletons and u2 = -0.1.
FitResult fit_mle(const Dataset& data, const FitConfig& config = {});
/// Same, warm-started from `init`.
FitResult fit_mle(const Dataset& data, const UPoint& init, const FitConfig& config = {});

/// Asymptotic standard errors sqrt(diag(G^{-1}) / n) in u coordinates.
Vector standard_errors(const FitResult& fit, double n);

}  // namespace dppgeo
