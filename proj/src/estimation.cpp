#include "dppgeo/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dppgeo/embedding.hpp"
#include "dppgeo/errors.hpp"
#include "dppgeo/geometry.hpp"

namespace dppgeo {
namespace {

// Per-observation Fisher eigenvalue below which the fit has run off towards
// the edge of the model (probabilities pinned at 0 or 1).
constexpr double kVanishingFisher = 1e-6;

Vector model_eta(const UPoint& u, const SubsetIndex& index) {
  const Matrix k = l_to_k(model_kernel(u)).matrix();
  Vector eta(index.size());
  for (int g = 0; g < index.size(); ++g) eta[g] = principal_minor(k, index.mask_at(g));
  return eta;
}

UPoint clamp_to_box(UPoint u, const FitConfig& config) {
  u.u1 = u.u1.cwiseMax(-config.u1_bound).cwiseMin(config.u1_bound);
  u.u2 = u.u2.cwiseMax(config.u2_lower).cwiseMin(config.u2_upper);
  return u;
}

// -inf outside the model domain so the line search simply rejects the step.
double safe_log_likelihood(const UPoint& u, const Dataset& data) {
  try {
    const double ll = log_likelihood(u, data);
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::domain) return -std::numeric_limits<double>::infinity();
    throw;
  }
}

std::optional<Vector> safe_score(const UPoint& u, const Dataset& data) {
  try {
    Vector s = score_u(u, data);
    if (s.allFinite()) return s;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::domain) throw;
  }
  return std::nullopt;
}

// Coordinates sitting on a box face with the score pointing out of the box
// are held fixed; the natural-gradient system is solved over the rest.
Vector natural_direction(const UPoint& u, const Vector& score, const FitConfig& config) {
  const int m = u.m();
  const Vector x = u.stacked();
  std::vector<int> free;
  for (int c = 0; c < x.size(); ++c) {
    const double lo = c < m ? -config.u1_bound : config.u2_lower;
    const double hi = c < m ? config.u1_bound : config.u2_upper;
    const bool pinned = (x[c] >= hi && score[c] > 0) || (x[c] <= lo && score[c] < 0);
    if (!pinned) free.push_back(c);
  }
  Vector direction = Vector::Zero(x.size());
  if (free.empty()) return direction;
  const Matrix g = fisher_u(u);
  const auto n = static_cast<Eigen::Index>(free.size());
  Matrix g_free(n, n);
  Vector s_free(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s_free[i] = score[free[i]];
    for (Eigen::Index j = 0; j < n; ++j) g_free(i, j) = g(free[i], free[j]);
  }
  Vector step = g_free.ldlt().solve(s_free);
  if (!step.allFinite()) step = symmetric_pinv(g_free).inverse * s_free;
  for (Eigen::Index i = 0; i < n; ++i) direction[free[i]] = step[i];
  return direction;
}

bool on_boundary(const UPoint& u, const FitConfig& config) {
  const double band = 1e-3;
  for (Eigen::Index a = 0; a < u.u1.size(); ++a)
    if (std::abs(u.u1[a]) >= config.u1_bound - band) return true;
  for (Eigen::Index p = 0; p < u.u2.size(); ++p)
    if (u.u2[p] >= -1e-6 || u.u2[p] <= config.u2_lower + band) return true;
  return false;
}

UPoint moment_start(const Dataset& data) {
  const int m = data.m();
  const double n = data.size();
  const Vector tbar = data.mean_statistics();
  UPoint u;
  u.u1.resize(m);
  for (int a = 0; a < m; ++a) {
    const double p = std::clamp(tbar[a], 0.5 / n, 1.0 - 0.5 / n);
    u.u1[a] = std::log(p / (1.0 - p));
  }
  u.u2 = Vector::Constant(pair_count(m), -0.1);
  u.signs.assign(pair_count(m), 1);
  return u;
}

}  // namespace

Dataset::Dataset(int m, std::vector<SubsetId> observations)
    : m_(m), observations_(std::move(observations)) {
  if (m < 1) fail(ErrorKind::domain, "dataset needs m >= 1");
  if (m > kMaxFitM) fail(ErrorKind::capacity, "dataset ground set exceeds " + std::to_string(kMaxFitM));
  if (observations_.empty()) fail(ErrorKind::domain, "dataset has no observations");
  counts_.assign(std::size_t{1} << m, 0.0);
  for (const auto& s : observations_) {
    if (s.m != m || (s.bits >> m) != 0) fail(ErrorKind::domain, "observation outside the ground set");
    counts_[s.bits] += 1.0;
  }
}

Vector Dataset::mean_statistics() const {
  const SubsetIndex index(m_);
  std::vector<double> sup = counts_;
  for (int bit = 0; bit < m_; ++bit) {
    const std::uint64_t b = std::uint64_t{1} << bit;
    for (std::uint64_t mask = 0; mask < sup.size(); ++mask)
      if (!(mask & b)) sup[mask] += sup[mask | b];
  }
  Vector out(index.size());
  for (int g = 0; g < index.size(); ++g) out[g] = sup[index.mask_at(g)] / size();
  return out;
}

double log_likelihood(const UPoint& u, const Dataset& data) {
  if (u.m() != data.m()) fail(ErrorKind::shape, "u and dataset sizes differ");
  const auto sums = statistic_sums(theta_from_u(u));
  const double potential = psi(u);
  double ll = 0.0;
  const auto& counts = data.counts();
  for (std::size_t mask = 0; mask < counts.size(); ++mask)
    if (counts[mask] > 0) ll += counts[mask] * (sums[mask] - potential);
  return ll;
}

Vector score_u(const UPoint& u, const Dataset& data) {
  if (u.m() != data.m()) fail(ErrorKind::shape, "u and dataset sizes differ");
  const SubsetIndex index(u.m());
  const Matrix b = jacobian_B(u).matrix;
  return b.transpose() * (data.mean_statistics() - model_eta(u, index));
}

FitResult fit_mle(const Dataset& data, const FitConfig& config) {
  return fit_mle(data, moment_start(data), config);
}

FitResult fit_mle(const Dataset& data, const UPoint& init, const FitConfig& config) {
  check_shape(init);
  if (init.m() != data.m()) fail(ErrorKind::shape, "initial point and dataset sizes differ");
  FitResult out;
  UPoint u = clamp_to_box(init, config);
  double ll = safe_log_likelihood(u, data);
  if (!std::isfinite(ll)) fail(ErrorKind::domain, "initial point outside the model domain");
  out.trace.push_back(ll);

  Vector score = score_u(u, data);
  for (int it = 0; it < config.max_iter; ++it) {
    out.grad_norm = score.cwiseAbs().maxCoeff();
    if (out.grad_norm < config.tol) {
      out.converged = true;
      break;
    }
    const Vector direction = natural_direction(u, score, config);

    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h < config.max_halvings; ++h, t *= 0.5) {
      UPoint trial = clamp_to_box(UPoint::from_stacked(u.stacked() + t * direction, u), config);
      const double trial_ll = safe_log_likelihood(trial, data);
      if (!(trial_ll >= ll)) continue;
      const auto trial_score = safe_score(trial, data);
      if (!trial_score) continue;
      u = std::move(trial);
      ll = trial_ll;
      score = *trial_score;
      accepted = true;
      break;
    }
    out.iterations = it + 1;
    if (!accepted) break;
    out.trace.push_back(ll);
  }
  out.grad_norm = score.cwiseAbs().maxCoeff();
  out.converged = out.converged || out.grad_norm < config.tol;
  out.u_hat = u;
  out.loglik = ll;
  out.boundary_trap = on_boundary(u, config);
  try {
    out.fisher_at_optimum = fisher_u(u);
    Eigen::SelfAdjointEigenSolver<Matrix> es(out.fisher_at_optimum, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kVanishingFisher)
      out.boundary_trap = true;
  } catch (const Error&) {
    out.fisher_at_optimum = Matrix::Constant(u.dimension(), u.dimension(),
                                             std::numeric_limits<double>::quiet_NaN());
    out.boundary_trap = true;
  }
  return out;
}

Vector standard_errors(const FitResult& fit, double n) {
  const auto inv = symmetric_pinv(fit.fisher_at_optimum);
  return (inv.inverse.diagonal() / n).cwiseMax(0.0).cwiseSqrt();
}

}  // namespace dppgeo
