// Escape-speed classification of magnitude sequences against the iterated
// M / mu comparison thresholds, at finite depth and bounded lag.
//
// Membership in the escape-speed sets is asymptotic; a finite orbit can only
// be "compatible at depth d with lag <= L". Every verdict says so.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastesc/growth.hpp"
#include "fastesc/magnitude.hpp"
#include "fastesc/report.hpp"

namespace fastesc {

struct OrbitSource {
  enum class Type { real_axis, synthetic, threshold };
  Type type = Type::synthetic;
  double lambda = 0.0;  // real_axis: x -> lambda e^x
  double x0 = 0.0;
  std::string description;
  nlohmann::ordered_json to_json() const;
};

struct OrbitRecord {
  std::vector<Magnitude> magnitudes;
  OrbitSource source;
  int depth() const { return static_cast<int>(magnitudes.size()) - 1; }
  nlohmann::ordered_json to_json() const;
  static OrbitRecord from_json(const nlohmann::json& j);
};

struct ClassificationParams {
  Magnitude R;                                // threshold base, from find_R
  int max_lag = 3;                            // lags 0..max_lag are searched
  std::vector<double> eps_grid{0.5, 0.75, 0.9};
  int m = 2;                                  // mu-level of the Q2-style test
  nlohmann::ordered_json to_json() const;
};

// Compatibility flags at finite depth. The inclusion chain (fast => quite
// fast => Q2-style) holds whenever all three thresholds were evaluable.
struct SpeedVerdict {
  std::optional<int> a_lag;                          // vs M^n(R)
  std::optional<std::pair<double, int>> q_hit;       // (eps, lag) vs mu_{1,eps}^n
  std::optional<std::pair<double, int>> q2_hit;      // (eps, lag) vs mu_{m,eps}^n
  bool escaping_at_depth = false;
  std::vector<std::string> caveats{"finite-depth verdict"};
  nlohmann::ordered_json to_json() const;
};

// Iterates of the chosen comparison function from R (length n+1).
std::vector<Magnitude> threshold_sequence(const GrowthModel& model, const StepSpec& step,
                                          const Magnitude& R, int n);

// Tests magnitudes[n + lag] >= threshold[n] for every n <= depth - lag, for
// each lag in [0, max_lag] and each threshold kind; records the least
// witnessing (eps, lag), smallest eps first.
SpeedVerdict classify_orbit(const OrbitRecord& orbit, const GrowthModel& model,
                            const ClassificationParams& params);

// Real-axis orbit of x -> lambda e^x from x0 >= 0. For this family the
// real axis is extremal (positive coefficients), so the orbit moduli are the
// iterated images themselves.
OrbitRecord real_axis_orbit(double lambda, const Magnitude& x0, int depth);

// Synthetic extremal orbit consistent with the separation construction:
// a_n = mu_{2,eps}^n(R) except at checkpoints, where a_n = M^2(mu_{2,eps}^n(R)).
// Classifies it (Q2-compatible, never A-compatible) and verifies the
// non-membership chain M^2(mu^n(R)) < M^{n-m+2}(R) at each usable checkpoint
// for m = 1..3; checkpoints before the separation onset are skipped with a
// notice.
struct Q2WitnessResult {
  OrbitRecord orbit;
  SpeedVerdict verdict;
  RegularityReport report;
};
Q2WitnessResult q2_not_a_witness(double eps, const Magnitude& R, int depth,
                                 const std::vector<int>& checkpoints,
                                 std::optional<GrowthModel> model = std::nullopt);

// CSV: n, orbit level/mantissa, M- and mu-threshold level/mantissa pairs.
void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit,
                     const std::vector<Magnitude>& m_thresholds,
                     const std::vector<Magnitude>& mu_thresholds);

}  // namespace fastesc
