#include "dppgeo/cli/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "dppgeo/duality.hpp"
#include "dppgeo/embedding.hpp"
#include "dppgeo/geometry.hpp"
#include "dppgeo/numdiff.hpp"
#include "dppgeo/random_points.hpp"

namespace dppgeo::cli {
namespace {

double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

std::vector<double> superset_sums(std::vector<double> table, int m) {
  for (int bit = 0; bit < m; ++bit) {
    const std::uint64_t b = std::uint64_t{1} << bit;
    for (std::uint64_t mask = 0; mask < table.size(); ++mask)
      if (!(mask & b)) table[mask] += table[mask | b];
  }
  return table;
}

double loglinear_round_trip(const UPoint& u) {
  const auto table = loglinear_table(theta_from_u(u));
  const auto ref = pmf_table(model_kernel(u));
  double worst = 0.0;
  for (std::size_t a = 0; a < ref.size(); ++a) worst = std::max(worst, std::abs(table[a] - ref[a]) / ref[a]);
  return worst;
}

double telescoping(const UPoint& u) {
  const auto sums = statistic_sums(theta_from_u(u));
  const Matrix l = model_kernel(u).matrix();
  double worst = 0.0;
  for (std::uint64_t mask = 1; mask < sums.size(); ++mask)
    worst = std::max(worst, std::abs(sums[mask] - log_det_lu(principal_submatrix(l, mask)).log_abs));
  return worst;
}

double potentials(const UPoint& u) {
  const double p = psi(u);
  return std::max(std::abs(p - phi(theta_from_u(u))), std::abs(p - log_normalizer(model_kernel(u))));
}

double eta_enumeration(const UPoint& u) {
  const int m = u.m();
  const auto eta = eta_from_k(l_to_k(model_kernel(u)));
  const auto sums = superset_sums(pmf_table(model_kernel(u)), m);
  const SubsetIndex index(m);
  double worst = 0.0;
  for (int g = 0; g < index.size(); ++g) worst = std::max(worst, std::abs(eta.values[g] - sums[index.mask_at(g)]));
  return worst;
}

double gradient_fd(const UPoint& u) {
  const Vector g = grad_psi_u1(u);
  double worst = 0.0;
  for (int a = 0; a < u.m(); ++a) {
    const Vector fd = numdiff::richardson_first(
        [&](double t) -> Vector {
          UPoint v = u;
          v.u1[a] += t;
          return Vector::Constant(1, psi(v));
        },
        1e-4);
    worst = std::max(worst, std::abs(fd[0] - g[a]));
  }
  return worst;
}

double singleton_block(const UPoint& u) {
  const int m = u.m();
  return max_abs(fisher_u(u).topLeftCorner(m, m) - hessian_psi_u1(u));
}

double fisher_paths(const UPoint& u) {
  return max_abs(fisher_theta(theta_from_u(u)).matrix - fisher_theta_determinantal(l_to_k(model_kernel(u))));
}

double cross_block(const UPoint& u) {
  const int m = u.m();
  const auto report = fisher_u_cross_claimed(u);
  return max_abs(report.ground_truth - fisher_u(u).block(0, m, m, pair_count(m)));
}

double curvature_singletons(const UPoint& u) {
  const auto r = curvature_block_report(e_curvature(u));
  // scaled so both the 1e-6 and the 1e-8 bound map to one tolerance of 1
  return std::max({r.max_abs_singleton_h / 1e-6, r.max_abs_squared_singleton / 1e-8,
                   r.max_abs_squared_cross / 1e-8});
}

double laplace(const UPoint& u) { return laplace_check_k11(u).abs_diff; }

double mixed_round_trip(const UPoint& u) {
  const auto inv = invert_mixed(mixed_from_u(u));
  return (inv.u.u1 - u.u1).cwiseAbs().maxCoeff();
}

double kl_paths(const UPoint& u, std::mt19937_64& rng) {
  UPoint v = u;
  v.u1 = random_u(u.m(), rng).u1;
  return std::abs(kl_direct(u, v) - kl_legendre(u, v));
}

struct Check {
  std::string name;
  double tolerance;
  int min_m;
  int max_m;
  std::function<double(const UPoint&, std::mt19937_64&)> error;
};

}  // namespace

std::vector<SelftestRow> run_selftest(int m, int trials, std::uint64_t seed) {
  const std::vector<Check> checks = {
      {"loglinear pmf = DPP pmf (relative)", 1e-10, 1, kMaxEnumerationM,
       [](const UPoint& u, auto&) { return loglinear_round_trip(u); }},
      {"telescoping sums = log det L_I", 1e-10, 1, kMaxEnumerationM,
       [](const UPoint& u, auto&) { return telescoping(u); }},
      {"psi = phi(theta) = log det(L+I)", 1e-10, 1, kMaxEnumerationM,
       [](const UPoint& u, auto&) { return potentials(u); }},
      {"eta_I = det K_I = E[T_I]", 1e-10, 1, kMaxEnumerationM,
       [](const UPoint& u, auto&) { return eta_enumeration(u); }},
      {"grad_u1 psi = FD gradient", 1e-6, 1, kMaxEnumerationM,
       [](const UPoint& u, auto&) { return gradient_fd(u); }},
      {"singleton Fisher block closed form", 1e-10, 1, kMaxFisherM,
       [](const UPoint& u, auto&) { return singleton_block(u); }},
      {"Fisher in theta: enumeration = minors", 1e-10, 1, kMaxFisherM,
       [](const UPoint& u, auto&) { return fisher_paths(u); }},
      {"cross block ground truth = fisher_u", 1e-8, 2, kMaxCrossReportM,
       [](const UPoint& u, auto&) { return cross_block(u); }},
      {"singleton curvature vanishes (scaled)", 1.0, 3, kMaxConnectionM,
       [](const UPoint& u, auto&) { return curvature_singletons(u); }},
      {"Laplace cofactor K_11", 1e-10, 2, kMaxKernelM,
       [](const UPoint& u, auto&) { return laplace(u); }},
      {"mixed round trip u -> omega -> u", 1e-8, 1, kMaxEnumerationM,
       [](const UPoint& u, auto&) { return mixed_round_trip(u); }},
      {"KL direct = KL Legendre", 1e-8, 1, kMaxEnumerationM,
       [](const UPoint& u, std::mt19937_64& rng) { return kl_paths(u, rng); }},
  };

  std::mt19937_64 rng(seed);
  std::vector<UPoint> points;
  for (int t = 0; t < trials; ++t) points.push_back(random_u(m, rng));

  std::vector<SelftestRow> rows;
  for (const auto& check : checks) {
    SelftestRow row{check.name, 0, 0.0, check.tolerance, false, {}};
    if (m < check.min_m || m > check.max_m) {
      row.skipped = true;
      row.skip_reason = "needs " + std::to_string(check.min_m) + " <= m <= " + std::to_string(check.max_m);
    } else {
      for (const auto& u : points) {
        const double e = check.error(u, rng);
        row.max_error = std::isnan(e) ? INFINITY : std::max(row.max_error, e);
        ++row.trials;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_selftest(const std::vector<SelftestRow>& rows, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %6s %12s %10s  %s\n", "check", "trials", "max_error", "tolerance",
                "result");
  out << line;
  for (const auto& r : rows) {
    if (r.skipped) {
      std::snprintf(line, sizeof line, "%-40s %6s %12s %10.0e  SKIP (%s)\n", r.name.c_str(), "-", "-",
                    r.tolerance, r.skip_reason.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-40s %6d %12.3e %10.0e  %s\n", r.name.c_str(), r.trials, r.max_error,
                    r.tolerance, r.passed() ? "PASS" : "FAIL");
    }
    out << line;
  }
}

}  // namespace dppgeo::cli
