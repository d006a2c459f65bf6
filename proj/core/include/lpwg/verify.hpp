#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lpwg {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick structural and prox invariant checks on small meshes (seconds).
std::vector<CheckResult> run_verify_suite(std::uint64_t seed = 20240607);

}  // namespace lpwg
