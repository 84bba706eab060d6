#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dppgeo::cli {

struct SelftestRow {
  std::string name;
  int trials = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool skipped = false;
  std::string skip_reason;

  bool passed() const { return skipped || max_error <= tolerance; }
};

/// Evaluates the library's identities at `trials` random points of size m.
std::vector<SelftestRow> run_selftest(int m, int trials, std::uint64_t seed);

void print_selftest(const std::vector<SelftestRow>& rows, std::ostream& out);

}  // namespace dppgeo::cli
