// Verdicts and scan reports shared by every numerical condition checker.
//
// Every condition in this library is an eventually-true inequality; a finite
// computation can only speak for an explicit window, so each report carries
// its window, grid, parameters and per-point outcomes, and never claims more
// than "holds on this window".

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastesc/magnitude.hpp"

namespace fastesc {

enum class Verdict { holds_on_window, fails, inconclusive };

const char* verdict_name(Verdict v);

// Outcome of one inequality instance lhs >= rhs (or lhs < rhs, per checker).
enum class PointOutcome { holds, fails, tie, uncertain };

// With `strict`, a tie (equality within tolerance) is not enough to count a
// point as satisfied; with `non_strict`, it is. Uncertain points (absorbed
// arithmetic) never count as satisfied either way.
enum class Strictness { strict, non_strict };

struct Window {
  double lo = 1.0;
  double hi = 50.0;
};

struct GridSpec {
  Window window;
  int count = 256;
};

// Geometric grid over [w.lo, w.hi]; endpoints included. Requires w.lo > 0.
std::vector<double> geometric_grid(const Window& w, int count);

struct ScanRow {
  double t = 0.0;
  Magnitude lhs, rhs;
  PointOutcome outcome = PointOutcome::holds;
  std::string side;  // tag when a condition bundles several inequalities
};

struct RegularityReport {
  std::string condition;
  Verdict verdict = Verdict::inconclusive;
  std::optional<ScanRow> first_failure;
  Window window;
  int grid_count = 0;
  nlohmann::ordered_json params;  // echoed configuration, incl. tolerances
  int n_holds = 0, n_fails = 0, n_ties = 0, n_uncertain = 0;
  std::vector<ScanRow> rows;
  std::vector<std::string> notes;

  bool holds() const { return verdict == Verdict::holds_on_window; }
  nlohmann::ordered_json to_json(bool include_rows = false) const;
  void write_csv(std::ostream& os) const;
};

PointOutcome outcome_of(Rel r);

// Folds per-point outcomes into a report. Rows must already be in grid
// order; the first failing row becomes the witness.
RegularityReport assemble_report(std::string condition, const Window& window, int grid_count,
                                 nlohmann::ordered_json params, Strictness strictness,
                                 std::vector<ScanRow> rows, std::vector<std::string> notes = {});

// Scans `emit` (which appends one or more rows for a grid point) over a
// geometric grid and assembles the report.
RegularityReport scan_condition(std::string condition, const GridSpec& grid,
                                nlohmann::ordered_json params, Strictness strictness,
                                const std::function<void(double, std::vector<ScanRow>&)>& emit);

}  // namespace fastesc
