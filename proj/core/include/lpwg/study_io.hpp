#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lpwg/analysis.hpp"

namespace lpwg {

/// A convergence table with the configuration it was produced from.
struct StudyOutput {
  /// Ordered key/value echo of the run configuration.
  std::vector<std::pair<std::string, std::string>> config;
  std::string version;
  ConvergenceTable table;
  /// Set when wall times should be omitted (deterministic comparisons).
  bool omit_wall_time = false;
};

/// Scientific notation with 6 significant digits, e.g. 1.23457e-03.
std::string format_sci(double v);

/// CSV column names in output order.
const std::vector<std::string>& csv_columns();

/// '#'-prefixed config lines, a header row, one row per n.
void write_csv(std::ostream& os, const StudyOutput& out);
/// Pipe-delimited table: n, then error/order pairs per norm, then diagnostics.
void write_markdown(std::ostream& os, const StudyOutput& out);

/// Parses write_csv output. Throws std::runtime_error on malformed input.
StudyOutput read_csv(std::istream& is);

}  // namespace lpwg
