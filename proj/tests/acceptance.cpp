// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "dppgeo/cli/cli.hpp"
#include "dppgeo/cli/contour.hpp"
#include "dppgeo/duality.hpp"
#include "dppgeo/embedding.hpp"
#include "dppgeo/errors.hpp"
#include "dppgeo/estimation.hpp"
#include "dppgeo/geometry.hpp"
#include "dppgeo/random_points.hpp"
#include "support/oracles.hpp"

using namespace dppgeo;

namespace {

// Largest eigenvalue of [H]^2 at m = 3, u1 = 0, |rho| = 0.5 on every pair,
// from the oracle route (analytic Moebius derivatives, enumerated Fisher
// matrix, SVD null-space ancillary basis); it equals 28/27.
constexpr double kPinnedCurvatureEigenvalue = 1.0370370370370370;

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Worst {
  double value = 0.0;
  void update(double v) { value = std::isnan(v) ? INFINITY : std::max(value, v); }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

UPoint symmetric_m3(double abs_rho) {
  UPoint u;
  u.u1 = Vector::Zero(3);
  u.u2 = Vector::Constant(3, std::log(1 - abs_rho * abs_rho));
  u.signs = {1, 1, 1};
  return u;
}

// Random point on the sign-flip orbit of a nonnegative kernel.
UPoint orbit_point(int m, std::mt19937_64& rng) {
  const Matrix l = random_positive_kernel(m, rng).matrix();
  Vector flip(m);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < m; ++i) flip[i] = coin(rng) ? -1.0 : 1.0;
  return u_from_l(validate_l(flip.asDiagonal() * l * flip.asDiagonal()));
}

// Sweep shared by criteria 1 and 2.
struct OrbitSweep {
  double pmf_rel = 0.0;
  double telescoping = 0.0;
  double seconds = 0.0;
};

OrbitSweep orbit_sweep() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  Worst pmf_err, tele_err;
  for (int m = 1; m <= 8; ++m)
    for (int t = 0; t < 100; ++t) {
      const UPoint u = orbit_point(m, rng);
      const ThetaPoint theta = theta_from_u(u);
      const LKernel l = l_from_u(u);
      for (const auto& a : enumerate_powerset(m)) {
        const double p = pmf(l, a);
        pmf_err.update(std::abs(loglinear_pmf(theta, a) - p) / p);
      }
      const auto sums = statistic_sums(theta);
      for (std::uint64_t mask = 1; mask < sums.size(); ++mask)
        tele_err.update(std::abs(sums[mask] - oracle::chol_logdet(oracle::sub(l.matrix(), mask))));
    }
  return {pmf_err.value, tele_err.value, seconds_since(start)};
}

Outcome criterion_3() {
  std::mt19937_64 rng(1003);
  Worst err;
  for (int m = 1; m <= 8; ++m)
    for (int t = 0; t < 100; ++t) {
      const UPoint u = orbit_point(m, rng);
      const double ref = oracle::chol_logdet(l_from_u(u).matrix() + Matrix::Identity(m, m));
      err.update(std::abs(psi(u) - ref));
      err.update(std::abs(phi(theta_from_u(u)) - ref));
    }
  return {err.value < 1e-10, fmt("max |psi - log det(L+I)|, |phi - log det(L+I)| = %.2e (tol 1e-10)", err.value)};
}

Outcome criterion_4() {
  std::mt19937_64 rng(1004);
  Worst brute, fd, diag;
  for (int m = 1; m <= 6; ++m)
    for (int t = 0; t < 20; ++t) {
      const UPoint u = random_u(m, rng);
      const Matrix k = l_to_k(l_from_u(u)).matrix();
      const auto eta = eta_from_k(validate_k(k));
      const auto p = oracle::pmf_table(l_from_u(u).matrix());
      const SubsetIndex index(m);
      for (int g = 0; g < index.size(); ++g) {
        double e = 0.0;
        for (std::uint64_t a = 0; a < p.size(); ++a)
          if ((index.mask_at(g) & ~a) == 0) e += p[a];
        brute.update(std::abs(eta.values[g] - e));
      }
      for (int a = 0; a < m; ++a) {
        const double d = oracle::fd1([&](double s) { return psi(oracle::shift(u, a, s)); }, 0.0, 1e-3);
        fd.update(std::abs(eta.values[a] - d));
        diag.update(std::abs(eta.values[a] - k(a, a)));
        diag.update(std::abs(grad_psi_u1(u)[a] - k(a, a)));
      }
    }
  const bool ok = brute.value < 1e-10 && fd.value < 1e-6 && diag.value < 1e-10;
  return {ok, fmt("eta vs E[T] %.2e (1e-10), vs FD grad psi %.2e (1e-6), vs K_aa %.2e (1e-10)", brute.value,
                  fd.value, diag.value)};
}

Outcome criterion_5() {
  std::mt19937_64 rng(1005);
  Worst closed, hess;
  for (int m = 2; m <= 6; ++m)
    for (int t = 0; t < 50; ++t) {
      const UPoint u = random_u(m, rng);
      const Matrix g = fisher_u(u);
      const Matrix k = l_to_k(l_from_u(u)).matrix();
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const double expected = a == b ? k(a, a) * (1 - k(a, a)) : -k(a, b) * k(a, b);
          closed.update(std::abs(g(a, b) - expected));
          auto f = [&](double s, double r) {
            UPoint v = u;
            v.u1[a] += s;
            v.u1[b] += r;
            return psi(v);
          };
          const double h = a == b ? oracle::fd2([&](double s) { return f(s, 0.0); }, 0.0, 1e-3)
                                  : oracle::fd_mixed(f, 0.0, 0.0, 1e-3, 1e-3);
          hess.update(std::abs(g(a, b) - h));
        }
    }
  return {closed.value < 1e-10 && hess.value < 1e-6,
          fmt("B^T M B vs closed form %.2e (1e-10), vs FD Hessian of psi %.2e (1e-6)", closed.value, hess.value)};
}

Outcome criterion_6() {
  std::mt19937_64 rng(1006);
  Worst score, theta_paths;
  for (int m = 1; m <= 6; ++m)
    for (int t = 0; t < 20; ++t) {
      const UPoint u = random_u(m, rng);
      const oracle::KernelPath path(u);
      const auto p = oracle::pmf_table(path.l);
      Matrix outer = Matrix::Zero(u.dimension(), u.dimension());
      for (std::uint64_t a = 0; a < p.size(); ++a) {
        const Vector s = path.log_prob(a).grad;
        outer += p[a] * s * s.transpose();
      }
      score.update(max_abs(fisher_u(u) - outer));
      theta_paths.update(max_abs(fisher_theta(theta_from_u(u)).matrix -
                                 fisher_theta_determinantal(l_to_k(l_from_u(u)))));
    }
  return {score.value < 1e-8 && theta_paths.value < 1e-8,
          fmt("B^T G B vs E[score score^T] %.2e; enumerated vs determinantal G %.2e (tol 1e-8)", score.value,
              theta_paths.value)};
}

Outcome criterion_7() {
  std::mt19937_64 rng(1007);
  Worst h_single, sq_single, sq_cross;
  for (int m = 3; m <= 5; ++m)
    for (int t = 0; t < 20; ++t) {
      const auto r = curvature_block_report(e_curvature(random_u(m, rng)));
      h_single.update(r.max_abs_singleton_h);
      sq_single.update(r.max_abs_squared_singleton);
      sq_cross.update(r.max_abs_squared_cross);
    }
  bool flat = true;
  for (int t = 0; t < 20; ++t) {
    const auto c = e_curvature(random_u(2, rng));
    flat = flat && c.h.data.empty() && c.squared == Matrix::Zero(3, 3);
  }
  const bool ok = h_single.value < 1e-6 && sq_single.value < 1e-8 && sq_cross.value < 1e-8 && flat;
  return {ok, fmt("max |H_{a1,*,k}| %.2e (1e-6); [H]^2 S1xS1 %.2e, S1xS2 %.2e (1e-8)", h_single.value,
                  sq_single.value, sq_cross.value) +
                  (flat ? "; m=2 empty/zero" : "; m=2 NOT flat")};
}

double oracle_curvature_eigenvalue(const UPoint& u) {
  const int m = u.m();
  const SubsetIndex index(m);
  const int d = index.size(), dp = u.dimension();
  const auto p = oracle::pmf_table(l_from_u(u).matrix());
  std::vector<double> sup(p.size(), 0.0);
  for (std::uint64_t s = 0; s < p.size(); ++s)
    for (std::uint64_t a = 0; a < p.size(); ++a)
      if ((s & ~a) == 0) sup[s] += p[a];
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      g(i, j) = sup[index.mask_at(i) | index.mask_at(j)] - sup[index.mask_at(i)] * sup[index.mask_at(j)];
  const oracle::MoebiusTheta moebius(u);
  Matrix b = Matrix::Zero(d, dp);
  b.topRows(dp).setIdentity();
  for (int r = dp; r < d; ++r)
    for (int q = 0; q < pair_count(m); ++q) b(r, m + q) = moebius.dtheta(index.mask_at(r), q);
  Eigen::JacobiSVD<Matrix> svd(b.transpose() * g, Eigen::ComputeFullV);
  const Matrix null = svd.matrixV().rightCols(d - dp);
  Eigen::LLT<Matrix> llt(null.transpose() * g * null);
  const Matrix anc = null * llt.matrixL().solve(Matrix::Identity(d - dp, d - dp)).transpose();
  const Matrix g_inv = (b.transpose() * g * b).inverse();
  Matrix squared = Matrix::Zero(dp, dp);
  for (int k = 0; k < d - dp; ++k) {
    const Vector ga = g * anc.col(k);
    Matrix h = Matrix::Zero(dp, dp);
    for (int a = m; a < dp; ++a)
      for (int c = m; c < dp; ++c)
        for (int r = dp; r < d; ++r) h(a, c) += moebius.d2theta(index.mask_at(r), a - m, c - m) * ga[r];
    squared += h * g_inv * h.transpose();
  }
  return Eigen::SelfAdjointEigenSolver<Matrix>(squared).eigenvalues().maxCoeff();
}

Outcome criterion_8() {
  std::mt19937_64 rng(1008);
  double m2 = 0.0;
  for (int t = 0; t < 20; ++t) m2 = std::max(m2, max_abs(e_curvature(random_u(2, rng)).squared));
  const UPoint u = symmetric_m3(0.5);
  const double library = Eigen::SelfAdjointEigenSolver<Matrix>(e_curvature(u).squared).eigenvalues().maxCoeff();
  const double oracle_value = oracle_curvature_eigenvalue(u);
  const double rel = std::abs(library - kPinnedCurvatureEigenvalue) / kPinnedCurvatureEigenvalue;
  const double oracle_rel = std::abs(oracle_value - kPinnedCurvatureEigenvalue) / kPinnedCurvatureEigenvalue;
  const bool ok = m2 == 0.0 && library > 0.0 && rel < 1e-4 && oracle_rel < 1e-10;
  return {ok, fmt("m=2 max|[H]^2| = %.1e; m=3 lambda_max = %.10f vs pinned 1.0370370370 (rel %.1e, tol 1e-4)", m2,
                  library, rel)};
}

Outcome criterion_9() {
  Worst err;
  int points = 0, outside = 0;
  const auto axis = [](int i, double lo, double hi) { return lo + (hi - lo) * i / 19.0; };
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      UPoint u2;
      u2.u1 = Vector{{axis(i, -3, 3), axis(j, -3, 3)}};
      u2.u2 = Vector::Constant(1, axis((i + 3 * j) % 20, -3, -0.01));
      u2.signs = {1};
      const Matrix k = l_to_k(l_from_u(u2)).matrix();
      const auto c = k_closed_m2(u2);
      err.update(std::abs(c.k11 - k(0, 0)));
      err.update(std::abs(c.k22 - k(1, 1)));
      err.update(std::abs(c.det_k - k.determinant()));
      err.update(std::abs(psi_m2(u2) - psi(u2)));

      UPoint u3;
      u3.u1 = Vector{{0.3, -0.2, axis((i + j) % 20, -2, 2)}};
      u3.u2 = Vector{{axis(i, -3, -0.01), -0.5, axis(j, -3, -0.01)}};
      u3.signs = {1, 1, 1};
      try {
        model_kernel(u3);
      } catch (const Error&) {
        ++outside;
        continue;
      }
      err.update(std::abs(theta123_m3(u3.u2) - theta_from_u(u3).values[6]));
      err.update(std::abs(psi_m3(u3) - psi(u3)));
      ++points;
    }
  return {err.value < 1e-10,
          fmt("max closed-form deviation %.2e over 400 m=2 and %.0f m=3 grid points (tol 1e-10)", err.value,
              points) +
              fmt("; %.0f m=3 points outside the domain skipped", outside)};
}

Outcome criterion_10() {
  std::mt19937_64 rng(1010);
  Worst err;
  for (int m = 2; m <= 5; ++m)
    for (int t = 0; t < 50; ++t) err.update(laplace_check_k11(random_u(m, rng)).abs_diff);
  return {err.value < 1e-10, fmt("max |direct - cofactor| = %.2e (tol 1e-10)", err.value)};
}

Outcome criterion_11() {
  std::mt19937_64 rng(1011);
  Worst err;
  int worst_iterations = 0;
  for (int m = 2; m <= 6; ++m)
    for (int t = 0; t < 100; ++t) {
      const UPoint u = random_u(m, rng);
      const auto inv = invert_mixed(mixed_from_u(u));
      err.update((inv.u.u1 - u.u1).cwiseAbs().maxCoeff());
      worst_iterations = std::max(worst_iterations, inv.iterations);
    }
  return {err.value < 1e-8 && worst_iterations <= 30,
          fmt("max round-trip error %.2e (tol 1e-8), max Newton iterations %.0f (limit 30)", err.value,
              worst_iterations)};
}

Outcome criterion_12() {
  std::mt19937_64 rng(1012);
  Worst gap;
  double min_kl = INFINITY, self = 0.0;
  for (int m = 1; m <= 6; ++m)
    for (int t = 0; t < 100; ++t) {
      const UPoint u = random_u(m, rng);
      UPoint v = u;
      v.u1 = random_u(m, rng).u1;
      const double direct = kl_direct(u, v), legendre = kl_legendre(u, v);
      gap.update(std::abs(direct - legendre));
      min_kl = std::min({min_kl, direct, legendre});
      self = std::max({self, std::abs(kl_direct(u, u)), std::abs(kl_legendre(u, u))});
    }
  const bool ok = gap.value < 1e-8 && min_kl > 0.0 && self < 1e-12;
  return {ok, fmt("max |direct - Legendre| %.2e (tol 1e-8); min KL over u != v %.2e; max |KL(u,u)| %.1e", gap.value,
                  min_kl, self)};
}

Outcome criterion_13() {
  std::mt19937_64 rng(1013);
  Worst err;
  for (int m = 2; m <= 6; ++m)
    for (int t = 0; t < 10; ++t) {
      const UPoint u = random_u(m, rng);
      const auto r = fisher_u_cross_claimed(u);
      err.update(max_abs(r.ground_truth - fisher_u(u).block(0, m, m, pair_count(m))));
    }
  // the claimed-vs-ground-truth comparison is emitted by the CLI, not graded
  const auto path = std::filesystem::temp_directory_path() / ("dppgeo_ac13_" + std::to_string(getpid()) + ".json");
  std::ofstream(path) << R"({"m": 3, "kind": "L", "matrix": [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]]})";
  std::ostringstream out, errs;
  const int code = cli::run({"dppgeo", "fisher", "--in", path.string(), "--cross-report"}, out, errs);
  std::filesystem::remove(path);
  double discrepancy = NAN;
  if (code == 0) discrepancy = nlohmann::json::parse(out.str())["cross_report"]["max_discrepancy"].get<double>();
  return {err.value < 1e-8 && code == 0,
          fmt("ground-truth block vs fisher_u %.2e (tol 1e-8); CLI report at m=3 rho=0.5: claimed-formula "
              "discrepancy %.4e (reported only)",
              err.value, discrepancy)};
}

Outcome criterion_14() {
  const auto start = std::chrono::steady_clock::now();
  UPoint truth;
  truth.u1 = Vector{{0.2, -0.4, 0.1}};
  truth.u2 = Vector{{std::log(1 - 0.25), std::log(1 - 0.09), std::log(1 - 0.36)}};
  truth.signs = {1, 1, 1};
  const LKernel l = l_from_u(truth);
  const double n = 1e5;
  int covered = 0, converged = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Dataset data(3, sample(l, std::uint64_t(5000 + rep), static_cast<std::size_t>(n)));
    const FitResult fit = fit_mle(data);
    if (fit.converged) ++converged;
    const Vector se = standard_errors(fit, n);
    bool inside = true;
    for (int a = 0; a < 3; ++a) inside = inside && std::abs(fit.u_hat.u1[a] - truth.u1[a]) <= 3 * se[a];
    for (int p = 0; p < 3; ++p) {
      const double rho_hat = std::sqrt(-std::expm1(fit.u_hat.u2[p]));
      const double rho = std::sqrt(-std::expm1(truth.u2[p]));
      const double slope = std::exp(fit.u_hat.u2[p]) / (2 * rho_hat);
      inside = inside && std::abs(rho_hat - rho) <= 3 * slope * se[3 + p];
    }
    if (inside) ++covered;
  }
  const double secs = seconds_since(start);
  return {covered >= 95 && secs < 120.0,
          fmt("%.0f/100 replications cover (u1, |rho|) within 3 SE (need 95); %.0f converged; %.1f s (limit 120)",
              covered, converged, secs)};
}

struct ContourSetup {
  const char* label;
  std::vector<std::string> args;
};

Outcome criterion_15() {
  const std::vector<ContourSetup> setups = {
      {"psi-m2", {"--m", "2", "--vary", "u1:u2", "--fixed", "u12=-0.1", "--range", "-3:3:121", "--value", "psi"}},
      {"psi-m3",
       {"--m", "3", "--vary", "u1:u2", "--fixed", "u3=-0.1,u12=log(1-0.5^2),u23=log(1-0.5^2),u31=log(1-0.5^2)",
        "--range", "-3:3:121", "--value", "psi"}},
      {"theta123-u13=-0.1", {"--m", "3", "--vary", "u12:u23", "--fixed", "u13=-0.1", "--range", "-3:0:121", "--value", "theta123"}},
      {"theta123-u13=-0.5", {"--m", "3", "--vary", "u12:u23", "--fixed", "u13=-0.5", "--range", "-3:0:121", "--value", "theta123"}},
      {"theta123-u13=-0.8", {"--m", "3", "--vary", "u12:u23", "--fixed", "u13=-0.8", "--range", "-3:0:121", "--value", "theta123"}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& setup : setups) {
    std::vector<std::string> args = {"dppgeo", "contour"};
    args.insert(args.end(), setup.args.begin(), setup.args.end());
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);

    // grid completeness from the emitted CSV
    std::istringstream csv(out.str());
    std::string line;
    std::getline(csv, line);
    bool complete = code == 0 && line == "u_x,u_y,value";
    int rows = 0, outside = 0;
    while (std::getline(csv, line)) {
      ++rows;
      if (line.find("nan") != std::string::npos || line.find("inf") != std::string::npos) complete = false;
      if (line.find("outside_domain") != std::string::npos) ++outside;
    }
    complete = complete && rows == 121 * 121;

    // symmetry and convexity from the same grid specification
    cli::ContourSpec spec;
    spec.m = std::stoi(setup.args[1]);
    std::tie(spec.x, spec.y) = cli::parse_axes(setup.args[3], spec.m);
    spec.fixed = cli::parse_fixed(setup.args[5], spec.m);
    cli::parse_range(setup.args[7], spec);
    spec.value = cli::parse_value(setup.args[9]);
    const auto cells = cli::contour_grid(spec);
    double asym = 0.0, min_eig = INFINITY;
    bool pattern = true;
    for (int iy = 0; iy < spec.n; ++iy)
      for (int ix = 0; ix < spec.n; ++ix) {
        const auto& a = cells[iy * spec.n + ix];
        const auto& b = cells[ix * spec.n + iy];
        if (a.value.has_value() != b.value.has_value()) pattern = false;
        if (a.value && b.value)
          asym = std::max(asym, std::abs(*a.value - *b.value) / std::max(1.0, std::abs(*a.value)));
        if (a.value) {
          const Matrix h = hessian_psi_u1(cli::contour_point(spec, a.x, a.y));
          min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff());
        }
      }
    const bool setup_ok = complete && pattern && asym < 1e-12 && min_eig > 0.0;
    ok = ok && setup_ok;
    detail += std::string(detail.empty() ? "" : "; ") + setup.label + (setup_ok ? " ok" : " FAILED") +
              fmt(" (outside %.0f, asym %.0e, min eig %.1e)", outside, asym, min_eig);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const OrbitSweep sweep = orbit_sweep();

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"log-linear round trip",
       [&] {
         return Outcome{sweep.pmf_rel < 1e-10 && sweep.seconds < 30.0,
                        fmt("max relative pmf error %.2e (tol 1e-10), sweep %.1f s (limit 30)", sweep.pmf_rel,
                            sweep.seconds)};
       }},
      {"telescoping recursion",
       [&] {
         return Outcome{sweep.telescoping < 1e-10,
                        fmt("max |sum theta^J - log det L_I| = %.2e (tol 1e-10)", sweep.telescoping)};
       }},
      {"potential identity", criterion_3},
      {"expectation parameters", criterion_4},
      {"singleton Fisher block", criterion_5},
      {"Fisher three-way agreement", criterion_6},
      {"vanishing singleton curvature", criterion_7},
      {"curvature flatness", criterion_8},
      {"closed forms m=2, m=3", criterion_9},
      {"Laplace cofactor identity", criterion_10},
      {"mixed parameterization", criterion_11},
      {"KL two ways", criterion_12},
      {"cross Fisher block", criterion_13},
      {"MLE coverage", criterion_14},
      {"contour grids", criterion_15},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("[%s] AC%02zu %-30s %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failures, criteria.size(),
              seconds_since(start));
  return failures == 0 ? 0 : 1;
}
