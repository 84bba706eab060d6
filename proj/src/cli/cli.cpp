#include "dppgeo/cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dppgeo/cli/contour.hpp"
#include "dppgeo/cli/selftest.hpp"
#include "dppgeo/duality.hpp"
#include "dppgeo/embedding.hpp"
#include "dppgeo/errors.hpp"
#include "dppgeo/estimation.hpp"
#include "dppgeo/geometry.hpp"
#include "dppgeo/io.hpp"
#include "dppgeo/numdiff.hpp"

namespace dppgeo::cli {
namespace {

using io::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int enumeration_cap() {
  const char* raw = std::getenv("DPPGEO_MAX_M");
  if (!raw || !*raw) return kMaxEnumerationM;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (*end != '\0' || value < 1) throw UsageError("DPPGEO_MAX_M must be a positive integer");
  return static_cast<int>(std::min<long>(value, kMaxEnumerationM));
}

void require_enumerable(int m) {
  const int cap = enumeration_cap();
  if (m > cap)
    fail(ErrorKind::capacity, "m = " + std::to_string(m) + " exceeds the enumeration cap " + std::to_string(cap));
}

std::string classify(const json& j) {
  if (!j.is_object()) fail(ErrorKind::shape, "expected a JSON object");
  if (j.contains("u_hat")) return "fit";
  if (j.contains("observations")) return "dataset";
  if (j.contains("kind")) return j["kind"].get<std::string>();
  if (j.contains("eta1")) return "mixed";
  if (j.contains("theta")) return "theta";
  if (j.contains("u1")) return "u";
  fail(ErrorKind::shape, "unrecognized document");
}

struct Output {
  std::string path;

  void write(std::ostream& out, const std::string& text) const {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream file(path);
    if (!file) fail(ErrorKind::io, "cannot write " + path);
    file << text;
    if (!file) fail(ErrorKind::io, "failed writing " + path);
  }

  void write(std::ostream& out, const json& j) const { write(out, j.dump(2) + "\n"); }
};

UPoint load_point(const std::string& path) { return io::point_from_json(io::read_file(path)); }

json convert(const UPoint& u, const std::string& target) {
  if (target == "L") return io::to_json(l_from_u(u));
  if (target == "K") return io::to_json(l_to_k(l_from_u(u)));
  if (target == "u") return io::to_json(u);
  if (target == "theta") {
    require_enumerable(u.m());
    return io::to_json(theta_from_u(u));
  }
  if (target == "mixed") return io::to_json(mixed_from_u(u));
  throw UsageError("--to must be one of L, K, u, theta, mixed");
}

std::string duality_table(const UPoint& u, json& report) {
  const int m = u.m();
  const Matrix k = l_to_k(model_kernel(u)).matrix();
  const Vector grad = grad_psi_u1(u);
  std::ostringstream text;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-4s %20s %20s %20s %12s\n", "a", "eta_a = det K_{a}", "dpsi/du_a (FD)", "K_aa",
                "max dev");
  text << buf;
  double worst = 0.0;
  json rows = json::array();
  for (int a = 0; a < m; ++a) {
    const double eta = principal_minor(k, std::uint64_t{1} << a);
    const double fd = numdiff::richardson_first(
        [&](double t) -> Vector {
          UPoint v = u;
          v.u1[a] += t;
          return Vector::Constant(1, psi(v));
        },
        1e-4)[0];
    const double dev = std::max({std::abs(eta - fd), std::abs(eta - k(a, a)), std::abs(grad[a] - k(a, a))});
    worst = std::max(worst, dev);
    std::snprintf(buf, sizeof buf, "%-4d %20.15f %20.15f %20.15f %12.3e\n", a + 1, eta, fd, k(a, a), dev);
    text << buf;
    rows.push_back({{"a", a + 1}, {"eta", eta}, {"fd_gradient", fd}, {"k_aa", k(a, a)}, {"deviation", dev}});
  }
  std::snprintf(buf, sizeof buf, "max deviation: %.3e\n", worst);
  text << buf;
  report = {{"m", m}, {"rows", rows}, {"max_deviation", worst}};
  if (m >= 2) {
    const auto lc = laplace_check_k11(u);
    std::snprintf(buf, sizeof buf, "Laplace cofactor check K_11: direct %.15f cofactor %.15f |diff| %.3e\n",
                  lc.direct, lc.cofactor, lc.abs_diff);
    text << buf;
    report["laplace"] = {{"direct", lc.direct}, {"cofactor", lc.cofactor}, {"abs_diff", lc.abs_diff}};
  }
  return text.str();
}

std::string curvature_text(const CurvatureTensor& c) {
  const auto r = curvature_block_report(c);
  std::ostringstream text;
  char buf[160];
  std::snprintf(buf, sizeof buf, "e-embedding curvature: m = %d, d' = %d, ancillary directions = %d\n", c.m,
                c.d_prime, c.d - c.d_prime);
  text << buf;
  auto line = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "  %-34s %12.3e\n", name, v);
    text << buf;
  };
  text << "  block                              max |entry|\n";
  line("H[singleton, *, *]", r.max_abs_singleton_h);
  line("[H]^2 singleton x singleton", r.max_abs_squared_singleton);
  line("[H]^2 singleton x pair", r.max_abs_squared_cross);
  line("[H]^2 pair x pair", r.max_abs_squared_pair);
  if (c.d > c.d_prime) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.squared, Eigen::EigenvaluesOnly);
    std::snprintf(buf, sizeof buf, "  largest eigenvalue of [H]^2       %12.6e\n", es.eigenvalues().maxCoeff());
    text << buf;
  }
  return text.str();
}

json cross_report_json(const FisherCrossReport& r) {
  return {{"claimed", io::matrix_to_json(r.claimed)},
          {"ground_truth", io::matrix_to_json(r.ground_truth)},
          {"discrepancy", io::matrix_to_json(r.discrepancy)},
          {"max_discrepancy", r.max_discrepancy}};
}

void write_error(std::ostream& err, std::string_view kind, const std::string& detail) {
  err << json{{"error", kind}, {"detail", detail}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information geometry of determinantal point processes", "dppgeo"};
  app.require_subcommand(1);
  std::function<void()> action;

  Output output;
  std::string in_path, other_path, data_path, init_path, target, subset_text, format = "json";
  bool cross = false, with_theta = false, text_report = false;
  std::size_t sample_n = 1000;
  std::uint64_t seed = 1;
  FitConfig fit_config;
  std::string vary = "u1:u2", fixed_text, range_text = "-3:3:121", value_text = "psi";
  int m = 2, trials = 20;

  auto add_in = [&](CLI::App* sub) {
    sub->add_option("--in", in_path, "input JSON document")->required();
    sub->add_option("--out", output.path, "write the result to this file instead of stdout");
  };

  auto* validate = app.add_subcommand("validate", "check a kernel, point or dataset document");
  add_in(validate);
  validate->callback([&] {
    action = [&] {
      const json doc = io::read_file(in_path);
      const std::string kind = classify(doc);
      int size = 0;
      if (kind == "dataset")
        size = io::dataset_from_json(doc).m();
      else
        size = io::point_from_json(doc).m();
      output.write(out, json{{"valid", true}, {"document", kind}, {"m", size}});
    };
  });

  auto* conv = app.add_subcommand("convert", "convert between L, K, u, theta and mixed coordinates");
  add_in(conv);
  conv->add_option("--to", target, "target representation")
      ->required()
      ->check(CLI::IsMember({"L", "K", "u", "theta", "mixed"}));
  conv->callback([&] { action = [&] { output.write(out, convert(load_point(in_path), target)); }; });

  auto* pmf_cmd = app.add_subcommand("pmf", "probabilities P(Y = A)");
  add_in(pmf_cmd);
  pmf_cmd->add_option("--subset", subset_text, "1-based labels, e.g. 1,3 (omit for the full table)");
  pmf_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  pmf_cmd->callback([&] {
    action = [&] {
      const UPoint u = load_point(in_path);
      const LKernel l = l_from_u(u);
      if (pmf_cmd->count("--subset")) {
        std::vector<int> labels;
        std::string cleaned;
        for (char c : subset_text)
          if (c != '[' && c != ']' && c != ' ') cleaned += c;
        std::stringstream ss(cleaned);
        for (std::string item; std::getline(ss, item, ',');) {
          try {
            std::size_t used = 0;
            labels.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
          } catch (const std::exception&) {
            throw UsageError("--subset expects comma-separated labels, got '" + subset_text + "'");
          }
        }
        const SubsetId a = SubsetId::from_elements(u.m(), labels);
        const double p = pmf(l, a);
        const double incl = inclusion_prob(l_to_k(l), a);
        if (format == "csv") {
          char buf[96];
          std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p, incl);
          output.write(out, std::string("p,inclusion\n") + buf);
        } else {
          output.write(out, json{{"subset", io::to_json(a)}, {"p", p}, {"inclusion", incl}});
        }
        return;
      }
      require_enumerable(u.m());
      const auto table = pmf_table(l);
      const auto subsets = enumerate_powerset(u.m());
      if (format == "csv") {
        std::ostringstream text;
        text << "subset,p\n";
        char buf[64];
        for (const auto& a : subsets) {
          std::string label;
          for (int e : a.elements()) label += (label.empty() ? "" : " ") + std::to_string(e);
          std::snprintf(buf, sizeof buf, ",%.17g\n", table[a.bits]);
          text << label << buf;
        }
        output.write(out, text.str());
      } else {
        json rows = json::array();
        for (const auto& a : subsets) rows.push_back({{"subset", io::to_json(a)}, {"p", table[a.bits]}});
        output.write(out, json{{"m", u.m()}, {"log_normalizer", log_normalizer(l)}, {"table", rows}});
      }
    };
  });

  auto* sample_cmd = app.add_subcommand("sample", "exact samples as a dataset document");
  add_in(sample_cmd);
  sample_cmd->add_option("--n", sample_n, "number of samples")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed, "random seed");
  sample_cmd->callback([&] {
    action = [&] {
      const UPoint u = load_point(in_path);
      require_enumerable(u.m());
      output.write(out, io::to_json(Dataset(u.m(), sample(l_from_u(u), seed, sample_n))));
    };
  });

  auto* fisher_cmd = app.add_subcommand("fisher", "Fisher information in u (and theta)");
  add_in(fisher_cmd);
  fisher_cmd->add_flag("--theta", with_theta, "also emit the Fisher matrix in theta");
  fisher_cmd->add_flag("--cross-report", cross, "compare the displayed cross-block formula with B^T M B");
  fisher_cmd->callback([&] {
    action = [&] {
      const UPoint u = load_point(in_path);
      require_enumerable(u.m());
      json result{{"m", u.m()}, {"fisher_u", io::matrix_to_json(fisher_u(u))}};
      if (with_theta) result["fisher_theta"] = io::matrix_to_json(fisher_theta(theta_from_u(u)).matrix);
      if (cross) result["cross_report"] = cross_report_json(fisher_u_cross_claimed(u));
      output.write(out, result);
    };
  });

  auto* curv = app.add_subcommand("curvature", "e-embedding curvature tensor and its square");
  add_in(curv);
  curv->add_flag("--text", text_report, "print the block-structure report instead of JSON");
  curv->callback([&] {
    action = [&] {
      const UPoint u = load_point(in_path);
      require_enumerable(u.m());
      const auto c = e_curvature(u);
      if (text_report) {
        output.write(out, curvature_text(c));
        return;
      }
      const auto r = curvature_block_report(c);
      output.write(out, json{{"m", c.m},
                             {"d_prime", c.d_prime},
                             {"d", c.d},
                             {"H", io::tensor_to_json(c.h)},
                             {"squared", io::matrix_to_json(c.squared)},
                             {"ancillary_basis", io::matrix_to_json(c.ancillary_basis)},
                             {"block_report",
                              {{"max_abs_singleton_h", r.max_abs_singleton_h},
                               {"max_abs_squared_singleton", r.max_abs_squared_singleton},
                               {"max_abs_squared_cross", r.max_abs_squared_cross},
                               {"max_abs_squared_pair", r.max_abs_squared_pair}}}});
    };
  });

  auto* dual = app.add_subcommand("duality-check", "eta_a against the gradient of psi and K_aa");
  add_in(dual);
  dual->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  dual->callback([&] {
    action = [&] {
      json report;
      const std::string table = duality_table(load_point(in_path), report);
      if (format == "json")
        output.write(out, report);
      else
        output.write(out, table);
    };
  });
  dual->preparse_callback([&](std::size_t) { format = "table"; });

  auto* kl_cmd = app.add_subcommand("kl", "Kullback-Leibler divergence D[P_in : P_other]");
  add_in(kl_cmd);
  kl_cmd->add_option("--other", other_path, "second point")->required();
  kl_cmd->callback([&] {
    action = [&] {
      const UPoint u = load_point(in_path);
      const UPoint v = load_point(other_path);
      require_enumerable(u.m());
      json result{{"kl_direct", kl_direct(u, v)}, {"kl_reverse", kl_direct(v, u)}};
      const bool shared = u.m() == v.m() && u.u2 == v.u2 && u.signs == v.signs;
      result["legendre_applicable"] = shared;
      result["kl_legendre"] = shared ? json(kl_legendre(u, v)) : json(nullptr);
      output.write(out, result);
    };
  });

  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit by natural gradient");
  fit_cmd->add_option("--data", data_path, "dataset document")->required();
  fit_cmd->add_option("--init", init_path, "starting point document");
  fit_cmd->add_option("--max-iter", fit_config.max_iter, "iteration limit");
  fit_cmd->add_option("--tol", fit_config.tol, "tolerance on the sup-norm of the score");
  fit_cmd->add_option("--out", output.path, "write the result to this file instead of stdout");
  fit_cmd->callback([&] {
    action = [&] {
      const Dataset data = io::dataset_from_json(io::read_file(data_path));
      require_enumerable(data.m());
      const FitResult fit =
          init_path.empty() ? fit_mle(data, fit_config) : fit_mle(data, load_point(init_path), fit_config);
      json result = io::to_json(fit);
      result["n"] = data.size();
      result["standard_errors"] = io::vector_to_json(standard_errors(fit, data.size()));
      output.write(out, result);
    };
  });

  auto* contour = app.add_subcommand("contour", "CSV grid of psi or theta^{1,2,3} over two u coordinates");
  contour->add_option("--m", m, "ground-set size")->check(CLI::Range(1, kMaxEnumerationM));
  contour->add_option("--vary", vary, "two coordinates, e.g. u1:u2");
  contour->add_option("--fixed", fixed_text, "comma-separated name=expression assignments");
  contour->add_option("--range", range_text, "lo:hi:n for both axes");
  contour->add_option("--value", value_text, "psi or theta123");
  contour->add_option("--out", output.path, "write the CSV to this file instead of stdout");
  contour->callback([&] {
    action = [&] {
      ContourSpec spec;
      try {
        spec.m = m;
        std::tie(spec.x, spec.y) = parse_axes(vary, m);
        spec.fixed = parse_fixed(fixed_text, m);
        parse_range(range_text, spec);
        spec.value = parse_value(value_text);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      require_enumerable(m);
      const auto cells = contour_grid(spec);
      if (std::none_of(cells.begin(), cells.end(), [](const ContourCell& c) { return c.value.has_value(); }))
        fail(ErrorKind::domain, "every grid point lies outside the model domain");
      std::ostringstream text;
      write_contour_csv(cells, text);
      output.write(out, text.str());
    };
  });

  int selftest_status = 0;
  auto* self = app.add_subcommand("selftest", "evaluate the library identities at random points");
  self->add_option("--m", m, "ground-set size")->check(CLI::Range(1, kMaxEnumerationM));
  self->add_option("--trials", trials, "random points")->check(CLI::PositiveNumber);
  self->add_option("--seed", seed, "random seed");
  self->callback([&] {
    action = [&] {
      require_enumerable(m);
      const auto rows = run_selftest(m, trials, seed);
      std::ostringstream text;
      print_selftest(rows, text);
      out << text.str();
      for (const auto& r : rows)
        if (!r.passed()) selftest_status = 1;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    action();
    return selftest_status;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    write_error(err, to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    write_error(err, "shape", std::string("malformed document: ") + e.what());
  } catch (const std::exception& e) {
    write_error(err, "io", e.what());
  }
  return 1;
}

}  // namespace dppgeo::cli
