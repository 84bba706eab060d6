#include "dppgeo/io.hpp"

#include <fstream>
#include <sstream>

#include "dppgeo/errors.hpp"

namespace dppgeo::io {
namespace {

int read_m(const json& j) {
  if (!j.contains("m") || !j["m"].is_number_integer()) fail(ErrorKind::shape, "document needs integer field \"m\"");
  return j["m"].get<int>();
}

std::vector<int> signs_from_json(const json& j, int pairs) {
  if (!j.contains("signs")) return std::vector<int>(pairs, 1);
  return j["signs"].get<std::vector<int>>();
}

}  // namespace

json to_json(const SubsetId& subset) { return subset.elements(); }

SubsetId subset_from_json(int m, const json& j) {
  if (!j.is_array()) fail(ErrorKind::shape, "subset must be an array of 1-based labels");
  return SubsetId::from_elements(m, j.get<std::vector<int>>());
}

json matrix_to_json(const Matrix& a) {
  json data = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) data.push_back(a(r, c));
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

json nested_matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_nested(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::shape, "matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      fail(ErrorKind::shape, "matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = j[r][c].get<double>();
  }
  return a;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json tensor_to_json(const Tensor3& t) {
  return {{"shape", {t.n0, t.n1, t.n2}}, {"data", t.data}};
}

json to_json(const LKernel& l) {
  return {{"m", l.m()}, {"matrix", nested_matrix_to_json(l.matrix())}, {"kind", "L"}};
}

json to_json(const MarginalKernel& k) {
  return {{"m", k.m()}, {"matrix", nested_matrix_to_json(k.matrix())}, {"kind", "K"}};
}

json to_json(const UPoint& u) {
  return {{"m", u.m()}, {"u1", vector_to_json(u.u1)}, {"u2", vector_to_json(u.u2)}, {"signs", u.signs}};
}

UPoint upoint_from_json(const json& j) {
  const int m = read_m(j);
  UPoint u;
  u.u1 = vector_from_json(j.at("u1"));
  u.u2 = j.contains("u2") ? vector_from_json(j["u2"]) : Vector();
  u.signs = signs_from_json(j, pair_count(m));
  if (u.m() != m) fail(ErrorKind::shape, "u1 length does not match m");
  check_shape(u);
  return u;
}

json to_json(const ThetaPoint& theta) {
  return {{"m", theta.m}, {"theta", vector_to_json(theta.values)}};
}

ThetaPoint theta_from_json(const json& j) {
  ThetaPoint t{read_m(j), vector_from_json(j.at("theta"))};
  if (t.m < 1 || t.m > kMaxEnumerationM || t.values.size() != (Eigen::Index{1} << t.m) - 1)
    fail(ErrorKind::shape, "theta must have 2^m - 1 entries");
  return t;
}

json to_json(const MixedPoint& omega) {
  return {{"m", omega.m()},
          {"eta1", vector_to_json(omega.eta1)},
          {"u2", vector_to_json(omega.u2)},
          {"signs", omega.signs}};
}

MixedPoint mixed_from_json(const json& j) {
  const int m = read_m(j);
  MixedPoint omega;
  omega.eta1 = vector_from_json(j.at("eta1"));
  omega.u2 = j.contains("u2") ? vector_from_json(j["u2"]) : Vector();
  omega.signs = signs_from_json(j, pair_count(m));
  if (omega.m() != m || omega.u2.size() != pair_count(m))
    fail(ErrorKind::shape, "mixed point lengths do not match m");
  return omega;
}

json to_json(const Dataset& data) {
  json obs = json::array();
  for (const auto& s : data.observations()) obs.push_back(to_json(s));
  return {{"m", data.m()}, {"observations", std::move(obs)}};
}

Dataset dataset_from_json(const json& j) {
  const int m = read_m(j);
  if (!j.contains("observations") || !j["observations"].is_array())
    fail(ErrorKind::shape, "dataset needs an \"observations\" array");
  std::vector<SubsetId> obs;
  obs.reserve(j["observations"].size());
  for (const auto& item : j["observations"]) obs.push_back(subset_from_json(m, item));
  return Dataset(m, std::move(obs));
}

json to_json(const FitResult& fit) {
  return {{"u_hat", to_json(fit.u_hat)},
          {"loglik", fit.loglik},
          {"iterations", fit.iterations},
          {"grad_norm", fit.grad_norm},
          {"converged", fit.converged},
          {"boundary_trap", fit.boundary_trap},
          {"fisher_at_optimum", matrix_to_json(fit.fisher_at_optimum)},
          {"trace", fit.trace}};
}

UPoint point_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::shape, "expected a JSON object");
  if (j.contains("u_hat")) return upoint_from_json(j["u_hat"]);
  if (j.contains("kind")) {
    const auto kind = j["kind"].get<std::string>();
    const Matrix raw = matrix_from_nested(j.at("matrix"));
    if (raw.rows() != read_m(j)) fail(ErrorKind::shape, "matrix size does not match m");
    if (kind == "L") return u_from_l(validate_l(raw));
    if (kind == "K") return u_from_l(k_to_l(validate_k(raw)));
    fail(ErrorKind::shape, "kernel kind must be \"L\" or \"K\"");
  }
  if (j.contains("eta1")) return u_from_mixed(mixed_from_json(j));
  if (j.contains("theta")) return u_from_theta(theta_from_json(j));
  if (j.contains("u1")) return upoint_from_json(j);
  fail(ErrorKind::shape, "unrecognized document: expected a kernel, u point, theta point, mixed point or fit");
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::exception& e) {
    fail(ErrorKind::io, path + ": " + e.what());
  }
}

}  // namespace dppgeo::io
