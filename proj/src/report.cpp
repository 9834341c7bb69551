#include "fastesc/report.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fastesc {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds_on_window: return "holds_on_window";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {
const char* outcome_name(PointOutcome o) {
  switch (o) {
    case PointOutcome::holds: return "holds";
    case PointOutcome::fails: return "fails";
    case PointOutcome::tie: return "tie";
    case PointOutcome::uncertain: return "uncertain";
  }
  return "?";
}
}  // namespace

std::vector<double> geometric_grid(const Window& w, int count) {
  if (!(w.lo > 0.0) || !(w.hi >= w.lo))
    throw std::invalid_argument("geometric_grid: requires 0 < lo <= hi");
  if (count < 2) throw std::invalid_argument("geometric_grid: requires at least 2 points");
  std::vector<double> g(count);
  double ratio = std::log(w.hi / w.lo);
  for (int i = 0; i < count; ++i)
    g[i] = w.lo * std::exp(ratio * static_cast<double>(i) / (count - 1));
  g.front() = w.lo;
  g.back() = w.hi;
  return g;
}

PointOutcome outcome_of(Rel r) {
  switch (r) {
    case Rel::greater: return PointOutcome::holds;
    case Rel::less: return PointOutcome::fails;
    case Rel::tie: return PointOutcome::tie;
    case Rel::uncertain: return PointOutcome::uncertain;
  }
  return PointOutcome::uncertain;
}

RegularityReport assemble_report(std::string condition, const Window& window, int grid_count,
                                 nlohmann::ordered_json params, Strictness strictness,
                                 std::vector<ScanRow> rows, std::vector<std::string> notes) {
  RegularityReport rep;
  rep.condition = std::move(condition);
  rep.window = window;
  rep.grid_count = grid_count;
  rep.params = std::move(params);
  rep.notes = std::move(notes);
  for (const ScanRow& row : rows) {
    switch (row.outcome) {
      case PointOutcome::holds: ++rep.n_holds; break;
      case PointOutcome::fails:
        ++rep.n_fails;
        if (!rep.first_failure) rep.first_failure = row;
        break;
      case PointOutcome::tie: ++rep.n_ties; break;
      case PointOutcome::uncertain: ++rep.n_uncertain; break;
    }
  }
  if (rep.n_fails > 0) {
    rep.verdict = Verdict::fails;
  } else if (rep.n_uncertain > 0 ||
             (strictness == Strictness::strict && rep.n_ties > 0)) {
    rep.verdict = Verdict::inconclusive;
    if (rep.n_uncertain > 0)
      rep.notes.push_back("absorbed arithmetic on " + std::to_string(rep.n_uncertain) +
                          " point(s); no honest verdict there");
    if (strictness == Strictness::strict && rep.n_ties > 0)
      rep.notes.push_back("tie (within tolerance) on " + std::to_string(rep.n_ties) +
                          " point(s) under a strict inequality");
  } else {
    rep.verdict = Verdict::holds_on_window;
  }
  rep.rows = std::move(rows);
  return rep;
}

RegularityReport scan_condition(std::string condition, const GridSpec& grid,
                                nlohmann::ordered_json params, Strictness strictness,
                                const std::function<void(double, std::vector<ScanRow>&)>& emit) {
  std::vector<ScanRow> rows;
  rows.reserve(grid.count);
  for (double t : geometric_grid(grid.window, grid.count)) emit(t, rows);
  return assemble_report(std::move(condition), grid.window, grid.count, std::move(params),
                         strictness, std::move(rows));
}

nlohmann::ordered_json RegularityReport::to_json(bool include_rows) const {
  nlohmann::ordered_json j;
  j["condition"] = condition;
  j["verdict"] = verdict_name(verdict);
  j["window"] = {{"t_lo", window.lo}, {"t_hi", window.hi}};
  j["grid_count"] = grid_count;
  j["params"] = params;
  j["counts"] = {{"holds", n_holds}, {"fails", n_fails}, {"ties", n_ties},
                 {"uncertain", n_uncertain}};
  if (first_failure) {
    j["first_failure"] = {{"t", first_failure->t},
                          {"lhs", first_failure->lhs.to_json()},
                          {"rhs", first_failure->rhs.to_json()}};
    if (!first_failure->side.empty()) j["first_failure"]["side"] = first_failure->side;
  }
  if (!notes.empty()) j["notes"] = notes;
  if (include_rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const ScanRow& r : rows)
      arr.push_back({{"t", r.t},
                     {"lhs", r.lhs.to_json()},
                     {"rhs", r.rhs.to_json()},
                     {"outcome", outcome_name(r.outcome)}});
    j["rows"] = arr;
  }
  return j;
}

void RegularityReport::write_csv(std::ostream& os) const {
  os << "t,lhs_level,lhs_mantissa,rhs_level,rhs_mantissa,outcome,side\n";
  char buf[256];
  for (const ScanRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%d,%.17g,%s,%s\n", r.t, r.lhs.level(),
                  r.lhs.mantissa(), r.rhs.level(), r.rhs.mantissa(), outcome_name(r.outcome),
                  r.side.c_str());
    os << buf;
  }
}

}  // namespace fastesc
