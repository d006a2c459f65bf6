#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lpwg/fe_space.hpp"
#include "lpwg/solver.hpp"

namespace lpwg::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kNotConverged = 3, kIoError = 4 };

struct RunConfig {
  std::string problem = "const";
  int p = 2;
  SpaceConfig space = SpaceConfig::with_default_l(2);
  std::vector<int> n_list{4, 8, 16};
  SolverConfig solver;
  std::string out;  // empty: stdout
  std::string format = "csv";
  bool omit_wall_time = false;

  /// Throws std::invalid_argument when the configuration is not runnable.
  void validate() const;
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses a comma-separated list of positive integers.
std::vector<int> parse_n_list(const std::string& s);

/// Runs the tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lpwg::cli
