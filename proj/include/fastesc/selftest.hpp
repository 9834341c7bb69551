// The acceptance suite: one function per criterion, each returning a
// pass/fail result with its measured evidence. The CLI exposes this as the
// `selftest` verb and the acceptance test binary prints one line per
// criterion.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fastesc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  nlohmann::ordered_json details;
};

struct SelftestReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;
  bool all_passed = false;
  // Deterministic for a fixed seed: no timestamps in here (the CLI adds one
  // at emission time).
  nlohmann::ordered_json to_json() const;
};

// Runs criteria 1..10 and then the determinism criterion (which re-runs the
// suite and compares serialisations).
SelftestReport run_selftest(std::uint64_t seed);

}  // namespace fastesc
