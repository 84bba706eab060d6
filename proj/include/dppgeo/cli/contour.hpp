#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dppgeo/kernel.hpp"

namespace dppgeo::cli {

enum class ContourValue { psi, theta123 };

struct ContourSpec {
  int m = 2;
  int x = 0;  // stacked u coordinate on the horizontal axis
  int y = 1;  // stacked u coordinate on the vertical axis
  std::map<int, double> fixed;  // stacked coordinate -> value; others are 0
  double lo = -3.0;
  double hi = 3.0;
  int n = 121;
  ContourValue value = ContourValue::psi;
};

/// Stacked index of a coordinate name for ground-set size m. Singletons are
/// "u3"; pairs are "u{1,3}", or "u13" / "u31" when m < 10.
/// Throws std::invalid_argument for unknown names.
int parse_coordinate(std::string_view name, int m);
std::string coordinate_name(int index, int m);

/// "u3=-0.1,u12=log(1-0.25)"; values are arithmetic expressions.
std::map<int, double> parse_fixed(std::string_view text, int m);

/// Parses "a:b" axis pairs and "lo:hi:n" ranges.
std::pair<int, int> parse_axes(std::string_view text, int m);
void parse_range(std::string_view text, ContourSpec& spec);

ContourValue parse_value(std::string_view text);

struct ContourCell {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> value;  // empty outside the model domain
};

/// Point of the grid as a u vector (signs +1).
UPoint contour_point(const ContourSpec& spec, double x, double y);

/// Row-major grid: y outer, x inner, both running lo..hi in n steps.
std::vector<ContourCell> contour_grid(const ContourSpec& spec);

/// CSV with header u_x,u_y,value and 12 significant digits.
void write_contour_csv(const std::vector<ContourCell>& cells, std::ostream& out);

}  // namespace dppgeo::cli
