#include "fastesc/classify.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "fastesc/construction.hpp"

using namespace fastesc;

namespace {
const GrowthModel kExp1 = GrowthModel::exp_order(1.0);
const Magnitude kE = exp(Magnitude::from_real(1.0));
}  // namespace

TEST_CASE("threshold_sequence") {
  auto seq = threshold_sequence(kExp1, StepSpec::M_step(), kE, 3);
  REQUIRE(seq.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(seq[j].level() == j + 1);
  CHECK(threshold_sequence(kExp1, StepSpec::M_step(), kE, 0).size() == 1);
}

TEST_CASE("real_axis_orbit") {
  auto tower = real_axis_orbit(1.0, Magnitude::from_real(1.0), 3);
  REQUIRE(tower.depth() == 3);
  CHECK(tower.magnitudes[0].to_real() == doctest::Approx(1.0));
  CHECK(tower.magnitudes[1].level() == 1);
  CHECK(tower.magnitudes[3].level() == 3);

  // lambda = 1/e fixes x = 1 exactly.
  auto fixed = real_axis_orbit(std::exp(-1.0), Magnitude::from_real(1.0), 5);
  for (const auto& x : fixed.magnitudes) CHECK(x.to_real() == doctest::Approx(1.0));

  auto two = real_axis_orbit(2.0, Magnitude::from_real(0.0), 2);
  CHECK(two.magnitudes[1].to_real() == doctest::Approx(2.0));
  CHECK(two.magnitudes[2].to_real() == doctest::Approx(2.0 * std::exp(2.0)));
}

TEST_CASE("classify_orbit: threshold orbit is A-compatible at lag 0") {
  OrbitRecord orbit;
  orbit.source.type = OrbitSource::Type::threshold;
  orbit.magnitudes = threshold_sequence(kExp1, StepSpec::M_step(), kE, 10);
  ClassificationParams params;
  params.R = kE;
  params.max_lag = 3;
  SpeedVerdict v = classify_orbit(orbit, kExp1, params);
  REQUIRE(v.a_lag.has_value());
  CHECK(*v.a_lag == 0);
  REQUIRE(v.q_hit.has_value());
  REQUIRE(v.q2_hit.has_value());
  CHECK(v.q_hit->first <= 0.5 + 1e-12);  // smallest eps wins
  CHECK(v.escaping_at_depth);
}

TEST_CASE("classify_orbit: constant orbit has no flags") {
  OrbitRecord orbit;
  orbit.magnitudes.assign(12, kE);
  ClassificationParams params;
  params.R = kE;
  params.max_lag = 3;
  SpeedVerdict v = classify_orbit(orbit, kExp1, params);
  CHECK_FALSE(v.a_lag.has_value());
  CHECK_FALSE(v.q_hit.has_value());
  CHECK_FALSE(v.q2_hit.has_value());
  CHECK_FALSE(v.escaping_at_depth);

  OrbitRecord shallow;
  shallow.magnitudes.assign(3, kE);
  CHECK_THROWS_AS(classify_orbit(shallow, kExp1, params), std::domain_error);
}

TEST_CASE("classify_orbit: mu-orbit under Power(2) is Q2- but not A-compatible") {
  GrowthModel p2 = example2_model();
  Magnitude R = exp(exp(Magnitude::from_real(2.0)));  // ln ln R = 2
  OrbitRecord orbit;
  orbit.magnitudes = threshold_sequence(p2, StepSpec::mu_step(2, 0.75), R, 20);
  ClassificationParams params;
  params.R = R;
  params.max_lag = 5;
  params.eps_grid = {0.75};
  SpeedVerdict v = classify_orbit(orbit, p2, params);
  REQUIRE(v.q2_hit.has_value());
  CHECK(v.q2_hit->first == doctest::Approx(0.75));
  CHECK(v.q2_hit->second == 0);
  CHECK_FALSE(v.a_lag.has_value());
  CHECK_FALSE(v.q_hit.has_value());  // mu_1 iterates outrun mu_2 iterates
}

TEST_CASE("real-axis tower equals the threshold sequence after one step") {
  // x0 = 1 sits below R = e, so lag 0 fails at the start; from lag 1 on the
  // orbit entries tie the M-iterates exactly.
  auto orbit = real_axis_orbit(1.0, Magnitude::from_real(1.0), 10);
  ClassificationParams params;
  params.R = kE;
  params.max_lag = 3;
  SpeedVerdict v = classify_orbit(orbit, kExp1, params);
  REQUIRE(v.a_lag.has_value());
  CHECK(*v.a_lag == 1);
  auto thr = threshold_sequence(kExp1, StepSpec::M_step(), kE, 9);
  for (int n = 0; n <= 9; ++n)
    CHECK(cmp(orbit.magnitudes[n + 1], thr[n]) == Rel::tie);
}

TEST_CASE("lag shift: prepending bounded entries raises the lag") {
  OrbitRecord orbit;
  orbit.magnitudes = threshold_sequence(kExp1, StepSpec::M_step(), kE, 10);
  ClassificationParams params;
  params.R = kE;
  params.max_lag = 4;
  for (int j = 1; j <= 2; ++j) {
    orbit.magnitudes.insert(orbit.magnitudes.begin(), Magnitude::from_real(1.5));
    SpeedVerdict v = classify_orbit(orbit, kExp1, params);
    REQUIRE(v.a_lag.has_value());
    CHECK(*v.a_lag == j);
  }
}

TEST_CASE("inclusion chain on randomly lagged threshold orbits") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> lag_dist(0, 3);
  for (int trial = 0; trial < 10; ++trial) {
    int lag = lag_dist(rng);
    OrbitRecord orbit;
    orbit.magnitudes.assign(lag, Magnitude::from_real(2.0));
    auto tail = threshold_sequence(kExp1, StepSpec::M_step(), kE, 12);
    orbit.magnitudes.insert(orbit.magnitudes.end(), tail.begin(), tail.end());
    ClassificationParams params;
    params.R = kE;
    params.max_lag = 5;
    SpeedVerdict v = classify_orbit(orbit, kExp1, params);
    REQUIRE(v.a_lag.has_value());
    // A-compatible forces the weaker flags, with eps no larger than the grid
    // minimum and lag no larger than the A-lag.
    REQUIRE(v.q_hit.has_value());
    REQUIRE(v.q2_hit.has_value());
    CHECK(v.q_hit->first <= 0.5 + 1e-12);
    CHECK(v.q_hit->second <= *v.a_lag);
    CHECK(v.q2_hit->second <= *v.a_lag);
  }
}

TEST_CASE("q2_not_a_witness") {
  Magnitude R = exp(exp(Magnitude::from_real(2.0)));
  auto res = q2_not_a_witness(0.75, R, 20, {10, 15, 20});
  REQUIRE(res.verdict.q2_hit.has_value());
  CHECK(res.verdict.q2_hit->second == 0);
  CHECK_FALSE(res.verdict.a_lag.has_value());
  CHECK(res.report.verdict == Verdict::holds_on_window);

  // Checkpoint before the onset is skipped with a notice.
  auto early = q2_not_a_witness(0.75, R, 20, {1, 10});
  bool skipped_note = false;
  for (const auto& n : early.report.notes)
    if (n.find("skipped") != std::string::npos) skipped_note = true;
  CHECK(skipped_note);

  CHECK_THROWS_AS(q2_not_a_witness(0.75, R, 0, {}), std::domain_error);
  CHECK_THROWS_AS(q2_not_a_witness(0.4, R, 20, {10}), std::domain_error);
  CHECK_THROWS_AS(q2_not_a_witness(0.75, R, 20, {25}), std::invalid_argument);

  // Verdict stability under the decaying perturbation delta(t) = A/t.
  for (double amp : {0.1, 1.0}) {
    auto pert = q2_not_a_witness(0.75, R, 20, {10, 15, 20},
                                 GrowthModel::perturbed(example2_model(), amp));
    CHECK(pert.verdict.q2_hit.has_value() == res.verdict.q2_hit.has_value());
    CHECK(pert.verdict.a_lag.has_value() == res.verdict.a_lag.has_value());
    CHECK(pert.report.verdict == Verdict::holds_on_window);
  }
}
