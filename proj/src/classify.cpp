#include "fastesc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "fastesc/construction.hpp"

namespace fastesc {

nlohmann::ordered_json OrbitSource::to_json() const {
  nlohmann::ordered_json j;
  switch (type) {
    case Type::real_axis:
      j["type"] = "real_axis";
      j["lambda"] = lambda;
      j["x0"] = x0;
      break;
    case Type::synthetic:
      j["type"] = "synthetic";
      break;
    case Type::threshold:
      j["type"] = "threshold";
      break;
  }
  if (!description.empty()) j["description"] = description;
  return j;
}

nlohmann::ordered_json OrbitRecord::to_json() const {
  nlohmann::ordered_json j;
  j["source"] = source.to_json();
  j["depth"] = depth();
  auto arr = nlohmann::ordered_json::array();
  for (const Magnitude& m : magnitudes) arr.push_back(m.to_json());
  j["magnitudes"] = arr;
  return j;
}

OrbitRecord OrbitRecord::from_json(const nlohmann::json& j) {
  OrbitRecord orbit;
  orbit.source.type = OrbitSource::Type::synthetic;
  if (j.contains("source") && j["source"].contains("description"))
    orbit.source.description = j["source"]["description"].get<std::string>();
  else if (j.contains("description"))
    orbit.source.description = j["description"].get<std::string>();
  for (const auto& e : j.at("magnitudes")) orbit.magnitudes.push_back(Magnitude::from_json(e));
  if (orbit.magnitudes.empty())
    throw std::invalid_argument("OrbitRecord: empty magnitude sequence");
  return orbit;
}

nlohmann::ordered_json ClassificationParams::to_json() const {
  nlohmann::ordered_json j;
  j["R"] = R.to_json();
  j["max_lag"] = max_lag;
  j["eps_grid"] = eps_grid;
  j["m"] = m;
  return j;
}

nlohmann::ordered_json SpeedVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["a_compatible"] = a_lag.has_value();
  if (a_lag) j["a_lag"] = *a_lag;
  j["q_compatible"] = q_hit.has_value();
  if (q_hit) j["q"] = {{"eps", q_hit->first}, {"lag", q_hit->second}};
  j["q2_compatible"] = q2_hit.has_value();
  if (q2_hit) j["q2"] = {{"eps", q2_hit->first}, {"lag", q2_hit->second}};
  j["escaping_at_depth"] = escaping_at_depth;
  j["caveats"] = caveats;
  return j;
}

std::vector<Magnitude> threshold_sequence(const GrowthModel& model, const StepSpec& step,
                                          const Magnitude& R, int n) {
  return iterate(model, step, R, n);
}

namespace {

// Does the orbit dominate the thresholds with this lag? Ties pass (the
// definitions are non-strict); absorbed-uncertain comparisons do not.
bool dominates(const std::vector<Magnitude>& orbit, const std::vector<Magnitude>& thresholds,
               int lag, bool& saw_uncertain) {
  int depth = static_cast<int>(orbit.size()) - 1;
  for (int n = 0; n + lag <= depth && n < static_cast<int>(thresholds.size()); ++n) {
    Rel r = cmp(orbit[n + lag], thresholds[n]);
    if (r == Rel::less) return false;
    if (r == Rel::uncertain) {
      saw_uncertain = true;
      return false;
    }
  }
  return true;
}

}  // namespace

SpeedVerdict classify_orbit(const OrbitRecord& orbit, const GrowthModel& model,
                            const ClassificationParams& params) {
  int depth = orbit.depth();
  if (depth < params.max_lag + 2)
    throw std::domain_error("classify_orbit: depth must be at least max_lag + 2");
  if (params.eps_grid.empty())
    throw std::invalid_argument("classify_orbit: eps_grid must be nonempty");
  SpeedVerdict verdict;
  bool saw_uncertain = false;

  auto try_kind = [&](const StepSpec& step) -> std::optional<int> {
    std::vector<Magnitude> thresholds;
    try {
      thresholds = threshold_sequence(model, step, params.R, depth);
    } catch (const std::domain_error& e) {
      verdict.caveats.push_back(step.name() + " threshold not evaluable: " + e.what());
      return std::nullopt;
    }
    for (int lag = 0; lag <= params.max_lag; ++lag)
      if (dominates(orbit.magnitudes, thresholds, lag, saw_uncertain)) return lag;
    return std::nullopt;
  };

  verdict.a_lag = try_kind(StepSpec::M_step());
  std::vector<double> eps_sorted = params.eps_grid;
  std::sort(eps_sorted.begin(), eps_sorted.end());
  for (double eps : eps_sorted) {
    if (!verdict.q_hit)
      if (auto lag = try_kind(StepSpec::mu_step(1, eps))) verdict.q_hit = {eps, *lag};
    if (!verdict.q2_hit)
      if (auto lag = try_kind(StepSpec::mu_step(params.m, eps))) verdict.q2_hit = {eps, *lag};
  }
  if (saw_uncertain)
    verdict.caveats.push_back("some comparisons fell inside absorbed-arithmetic slack");

  // Escaping at this depth: strictly increasing from the orbit minimum on.
  int argmin = 0;
  for (int i = 1; i <= depth; ++i)
    if (cmp(orbit.magnitudes[i], orbit.magnitudes[argmin]) == Rel::less) argmin = i;
  bool escaping = argmin < depth;
  for (int i = argmin; i < depth && escaping; ++i)
    if (cmp(orbit.magnitudes[i + 1], orbit.magnitudes[i]) != Rel::greater) escaping = false;
  verdict.escaping_at_depth = escaping;
  return verdict;
}

OrbitRecord real_axis_orbit(double lambda, const Magnitude& x0, int depth) {
  if (!(lambda > 0.0)) throw std::domain_error("real_axis_orbit: lambda must be positive");
  if (depth < 0) throw std::domain_error("real_axis_orbit: depth must be nonnegative");
  OrbitRecord orbit;
  orbit.source.type = OrbitSource::Type::real_axis;
  orbit.source.lambda = lambda;
  orbit.source.x0 = x0.to_real();
  orbit.magnitudes.reserve(depth + 1);
  orbit.magnitudes.push_back(x0);
  for (int j = 0; j < depth; ++j)
    orbit.magnitudes.push_back(mul_scalar(exp(orbit.magnitudes.back()), lambda));
  return orbit;
}

Q2WitnessResult q2_not_a_witness(double eps, const Magnitude& R, int depth,
                                 const std::vector<int>& checkpoints,
                                 std::optional<GrowthModel> model_opt) {
  if (!(eps > 0.5 && eps < 1.0))
    throw std::domain_error("q2_not_a_witness: eps must lie in (1/2, 1)");
  if (depth < 1) throw std::domain_error("q2_not_a_witness: depth must be positive");
  for (int c : checkpoints)
    if (c < 1 || c > depth)
      throw std::invalid_argument("q2_not_a_witness: checkpoints must lie in [1, depth]");
  GrowthModel model = model_opt ? *model_opt : example2_model();

  std::vector<Magnitude> mu_seq = iterate(model, StepSpec::mu_step(2, eps), R, depth);
  // M thresholds reach index depth + 2 (the chain compares against
  // M^{n_c - m + 2}).
  std::vector<Magnitude> M_seq = iterate(model, StepSpec::M_step(), R, depth + 2);

  Q2WitnessResult out;
  out.orbit.source.type = OrbitSource::Type::synthetic;
  out.orbit.source.description =
      "extremal profile: mu_{2,eps}^n(R), lifted to M^2(mu_{2,eps}^n(R)) at checkpoints";
  out.orbit.magnitudes = mu_seq;
  for (int c : checkpoints)
    out.orbit.magnitudes[c] = model.apply_M(model.apply_M(mu_seq[c]));

  ClassificationParams params;
  params.R = R;
  params.max_lag = 5;
  params.eps_grid = {eps};
  params.m = 2;
  out.verdict = classify_orbit(out.orbit, model, params);

  // Lower sandwich: at non-checkpoints the orbit entry *is* the mu-iterate
  // (equality by construction); at checkpoints the two extra M-steps push it
  // strictly above. That establishes the Q2 clause at lag 0 even when the
  // recomputed values carry absorption flags.
  std::vector<ScanRow> rows;
  std::vector<std::string> notes;
  bool lower_ok = true;
  std::vector<bool> is_checkpoint(depth + 1, false);
  for (int c : checkpoints) is_checkpoint[c] = true;
  for (int n = 0; n <= depth; ++n) {
    ScanRow row;
    row.t = n;
    row.lhs = out.orbit.magnitudes[n];
    row.rhs = mu_seq[n];
    if (!is_checkpoint[n]) {
      row.side = "orbit = mu^n(R) by construction";
      row.outcome = PointOutcome::holds;
    } else {
      row.side = "orbit > mu^n(R) at checkpoint";
      row.outcome = outcome_of(cmp(row.lhs, row.rhs));
      if (row.outcome != PointOutcome::holds) lower_ok = false;
    }
    rows.push_back(std::move(row));
  }
  if (lower_ok && !out.verdict.q2_hit) {
    out.verdict.q2_hit = {eps, 0};
    out.verdict.caveats.push_back(
        "q2 clause established from the defining construction (orbit entries are the "
        "mu-iterates)");
  }
  for (int c : checkpoints) {
    ScanRow row;
    row.t = c;
    row.side = "orbit <= M^2(mu^n(R)) at checkpoint (by construction)";
    row.lhs = model.apply_M(model.apply_M(mu_seq[c]));
    row.rhs = out.orbit.magnitudes[c];
    row.outcome = PointOutcome::holds;
    rows.push_back(std::move(row));
  }
  for (int m = 1; m <= 3; ++m) {
    int onset = separation_onset(eps, m, 4 * (depth + m) + 64);
    for (int c : checkpoints) {
      if (c - m <= onset) {
        notes.push_back("checkpoint " + std::to_string(c) + " skipped for m = " +
                        std::to_string(m) + " (needs n_c - m > onset N = " +
                        std::to_string(onset) + ")");
        continue;
      }
      ScanRow row;
      row.t = c;
      row.side = "M^2(mu^{n_c}(R)) < M^{n_c-m+2}(R), m = " + std::to_string(m);
      row.lhs = out.orbit.magnitudes[c];
      row.rhs = M_seq[c - m + 2];
      Rel r = cmp(row.lhs, row.rhs);
      row.outcome = r == Rel::less ? PointOutcome::holds
                                   : (r == Rel::greater ? PointOutcome::fails
                                                        : outcome_of(r));
      rows.push_back(std::move(row));
    }
  }
  nlohmann::ordered_json params_json;
  params_json["eps"] = eps;
  params_json["R"] = R.to_json();
  params_json["depth"] = depth;
  params_json["checkpoints"] = checkpoints;
  params_json["model"] = model.spec_string();
  out.report = assemble_report("q2_not_a_witness: sandwich and non-membership chain",
                               {0.0, static_cast<double>(depth)},
                               static_cast<int>(rows.size()), std::move(params_json),
                               Strictness::non_strict, std::move(rows), std::move(notes));
  return out;
}

void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit,
                     const std::vector<Magnitude>& m_thresholds,
                     const std::vector<Magnitude>& mu_thresholds) {
  os << "n,orbit_level,orbit_mantissa,M_level,M_mantissa,mu_level,mu_mantissa\n";
  char buf[256];
  for (size_t n = 0; n < orbit.magnitudes.size(); ++n) {
    const Magnitude& o = orbit.magnitudes[n];
    auto cell = [&](const std::vector<Magnitude>& v) -> std::pair<int, double> {
      if (n < v.size()) return {v[n].level(), v[n].mantissa()};
      return {-1, 0.0};
    };
    auto [ml, mm] = cell(m_thresholds);
    auto [ul, um] = cell(mu_thresholds);
    std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%d,%.17g,%d,%.17g\n", n, o.level(),
                  o.mantissa(), ml, mm, ul, um);
    os << buf;
  }
}

}  // namespace fastesc
