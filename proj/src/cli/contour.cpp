#include "dppgeo/cli/contour.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "dppgeo/cli/expression.hpp"
#include "dppgeo/embedding.hpp"
#include "dppgeo/errors.hpp"
#include "dppgeo/lattice.hpp"

namespace dppgeo::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t depth = 0, start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '{') ++depth;
    if ((s[i] == ')' || s[i] == '}') && depth > 0) --depth;
    if (s[i] == sep && depth == 0) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

int parse_label(std::string_view digits, int m, std::string_view name) {
  int value = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || end != digits.data() + digits.size() || value < 1 || value > m)
    throw std::invalid_argument("coordinate '" + std::string(name) + "' names an element outside 1.." +
                                std::to_string(m));
  return value;
}

int pair_coordinate(int a, int b, int m, std::string_view name) {
  if (a == b) throw std::invalid_argument("coordinate '" + std::string(name) + "' repeats an element");
  if (a > b) std::swap(a, b);
  return m + pair_index(m, a - 1, b - 1);
}

}  // namespace

int parse_coordinate(std::string_view name, int m) {
  const std::string_view body = trim(name);
  if (body.size() < 2 || body[0] != 'u')
    throw std::invalid_argument("coordinate '" + std::string(name) + "' must start with 'u'");
  std::string_view rest = body.substr(1);
  if (rest.front() == '{') {
    if (rest.back() != '}') throw std::invalid_argument("unbalanced braces in '" + std::string(name) + "'");
    const auto parts = split(rest.substr(1, rest.size() - 2), ',');
    if (parts.size() == 1) return parse_label(trim(parts[0]), m, name) - 1;
    if (parts.size() == 2)
      return pair_coordinate(parse_label(trim(parts[0]), m, name), parse_label(trim(parts[1]), m, name), m,
                             name);
    throw std::invalid_argument("coordinate '" + std::string(name) + "' must name one or two elements");
  }
  if (m < 10 && rest.size() == 2)
    return pair_coordinate(parse_label(rest.substr(0, 1), m, name), parse_label(rest.substr(1), m, name), m,
                           name);
  return parse_label(rest, m, name) - 1;
}

std::string coordinate_name(int index, int m) {
  if (index < m) return "u" + std::to_string(index + 1);
  const auto pairs = enumerate_sk(m, 2);
  const auto e = pairs.at(index - m).elements();
  return "u{" + std::to_string(e[0]) + "," + std::to_string(e[1]) + "}";
}

std::map<int, double> parse_fixed(std::string_view text, int m) {
  std::map<int, double> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) {
    item = trim(item);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("fixed entry '" + std::string(item) + "' needs the form name=value");
    const int coord = parse_coordinate(item.substr(0, eq), m);
    if (out.count(coord))
      throw std::invalid_argument("coordinate " + coordinate_name(coord, m) + " fixed twice");
    out[coord] = evaluate_expression(item.substr(eq + 1));
  }
  return out;
}

std::pair<int, int> parse_axes(std::string_view text, int m) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw std::invalid_argument("--vary expects two coordinates as a:b");
  const int x = parse_coordinate(parts[0], m), y = parse_coordinate(parts[1], m);
  if (x == y) throw std::invalid_argument("--vary axes must differ");
  return {x, y};
}

void parse_range(std::string_view text, ContourSpec& spec) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("--range expects lo:hi:n");
  spec.lo = evaluate_expression(parts[0]);
  spec.hi = evaluate_expression(parts[1]);
  const std::string_view count = trim(parts[2]);
  const auto [end, ec] = std::from_chars(count.data(), count.data() + count.size(), spec.n);
  if (ec != std::errc() || end != count.data() + count.size() || spec.n < 2)
    throw std::invalid_argument("--range point count must be an integer >= 2");
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("--range needs lo < hi");
}

ContourValue parse_value(std::string_view text) {
  if (text == "psi") return ContourValue::psi;
  if (text == "theta123") return ContourValue::theta123;
  throw std::invalid_argument("--value must be psi or theta123");
}

UPoint contour_point(const ContourSpec& spec, double x, double y) {
  UPoint u;
  u.u1 = Vector::Zero(spec.m);
  u.u2 = Vector::Zero(pair_count(spec.m));
  u.signs.assign(pair_count(spec.m), 1);
  Vector stacked = u.stacked();
  for (const auto& [coord, value] : spec.fixed) stacked[coord] = value;
  stacked[spec.x] = x;
  stacked[spec.y] = y;
  return UPoint::from_stacked(stacked, u);
}

std::vector<ContourCell> contour_grid(const ContourSpec& spec) {
  if (spec.value == ContourValue::theta123 && spec.m < 3)
    fail(ErrorKind::precondition, "theta123 needs m >= 3");
  std::vector<ContourCell> cells;
  cells.reserve(std::size_t(spec.n) * spec.n);
  const double step = (spec.hi - spec.lo) / (spec.n - 1);
  for (int iy = 0; iy < spec.n; ++iy)
    for (int ix = 0; ix < spec.n; ++ix) {
      ContourCell cell{spec.lo + ix * step, spec.lo + iy * step, std::nullopt};
      const UPoint u = contour_point(spec, cell.x, cell.y);
      try {
        model_kernel(u);
        cell.value = spec.value == ContourValue::psi ? psi(u) : theta_from_u(u).values[spec.m + pair_count(spec.m)];
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::domain) throw;
      }
      cells.push_back(cell);
    }
  return cells;
}

void write_contour_csv(const std::vector<ContourCell>& cells, std::ostream& out) {
  out << "u_x,u_y,value\n";
  char buffer[96];
  for (const auto& c : cells) {
    if (c.value)
      std::snprintf(buffer, sizeof buffer, "%.12g,%.12g,%.12g\n", c.x, c.y, *c.value);
    else
      std::snprintf(buffer, sizeof buffer, "%.12g,%.12g,outside_domain\n", c.x, c.y);
    out << buffer;
  }
}

}  // namespace dppgeo::cli
