#include "fastesc/selftest.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "fastesc/classify.hpp"
#include "fastesc/construction.hpp"
#include "fastesc/growth.hpp"
#include "fastesc/magnitude.hpp"
#include "fastesc/regularity.hpp"
#include "oracle_mpfr.hpp"

namespace fastesc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- criterion 1: magnitude kernel against the high-precision oracle -------

CriterionResult criterion_magnitude_oracle(std::uint64_t seed) {
  CriterionResult res{1, "magnitude-kernel-vs-oracle", false, 0.0, {}};
  auto start = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> levels(0, 2);
  std::uniform_real_distribution<double> mantissas(0.0, std::exp(1.0) - 1e-9);
  std::uniform_real_distribution<double> expo(-3.0, 300.0);
  std::uniform_real_distribution<double> log_k(std::log(0.1), std::log(100.0));
  std::uniform_real_distribution<double> pow_a(0.2, 8.0);

  const int kSamples = 10000;
  const double kTol = 1e-9;
  int op_checks = 0, op_failures = 0, order_checks = 0, order_failures = 0;

  auto agree = [&](const Magnitude& got, const oracle::RefMagnitude& want) {
    ++op_checks;
    double scale = std::max(std::abs(want.mantissa), 1.0);
    bool ok = got.level() == want.level &&
              std::abs(got.mantissa() - want.mantissa) / scale <= kTol;
    if (!ok) ++op_failures;
  };

  Magnitude prev = Magnitude::from_real(1.0);
  oracle::RefValue prev_ref(1.0);
  for (int i = 0; i < kSamples; ++i) {
    // from_real over the documented range.
    double v = std::pow(10.0, expo(rng));
    agree(Magnitude::from_real(v), oracle::RefValue(v).canonical());

    // The remaining operations on a random canonical magnitude of level <= 2.
    int level = levels(rng);
    double m = std::max(mantissas(rng), level == 0 ? 0.0 : 1.0);
    Magnitude x = Magnitude::from_tower(level, m);
    oracle::RefValue ref = oracle::RefValue::tower(x.level(), x.mantissa());

    agree(exp(x), ref.exp().canonical());
    double k = std::exp(log_k(rng));
    agree(mul_scalar(x, k), ref.mul(k).canonical());
    if (x.level() >= 1 || x.mantissa() >= 1.0) {
      agree(ln(x), ref.ln().canonical());
      double a = pow_a(rng);
      agree(pow_scalar(x, a), ref.pow(a).canonical());
    }

    // Ordering against the oracle's exact comparison.
    ++order_checks;
    int ref_sign = ref.compare(prev_ref);
    Rel got = cmp(x, prev);
    bool ok = (got == Rel::less && ref_sign < 0) || (got == Rel::greater && ref_sign > 0) ||
              (got == Rel::tie);
    if (got == Rel::tie) {
      auto a = ref.canonical();
      auto b = prev_ref.canonical();
      ok = std::abs(a.level - b.level) <= 1 ||
           std::abs(a.mantissa - b.mantissa) <= 1e-8 * std::max(1.0, std::abs(a.mantissa));
    }
    if (!ok) ++order_failures;
    prev = x;
    prev_ref = ref;
  }

  res.seconds = elapsed_s(start);
  res.passed = op_failures == 0 && order_failures == 0 && res.seconds < 10.0;
  res.details["samples"] = kSamples;
  res.details["op_checks"] = op_checks;
  res.details["op_failures"] = op_failures;
  res.details["order_checks"] = order_checks;
  res.details["order_failures"] = order_failures;
  res.details["rel_tol"] = kTol;
  res.details["budget_seconds"] = 10.0;
  return res;
}

// --- criterion 2: strong log-regularity instance ---------------------------

CriterionResult criterion_strong_instance(std::uint64_t) {
  CriterionResult res{2, "strong-log-regularity-instance", false, 0.0, {}};
  auto start = Clock::now();
  GrowthModel model = GrowthModel::exp_order(1.0);
  auto holds = check_strong_log_regular(model, 0.5, 3.0, {{2.3, 50.0}, 256});
  auto fails = check_strong_log_regular(model, 0.5, 3.0, {{2.0, 50.0}, 256});
  res.seconds = elapsed_s(start);
  bool witness_ok = fails.first_failure && std::abs(fails.first_failure->t - 2.0) < 1e-12;
  res.passed = holds.verdict == Verdict::holds_on_window && fails.verdict == Verdict::fails &&
               witness_ok && res.seconds < 1.0;
  res.details["holds_on_2.3_50"] = verdict_name(holds.verdict);
  res.details["fails_on_2.0_50"] = verdict_name(fails.verdict);
  if (fails.first_failure) res.details["first_failure_t"] = fails.first_failure->t;
  res.details["budget_seconds"] = 1.0;
  return res;
}

// --- criterion 3: implication chain over the tuple suite -------------------

CriterionResult criterion_implication_chain(std::uint64_t) {
  CriterionResult res{3, "implication-chain", false, 0.0, {}};
  auto start = Clock::now();
  auto tuples = nlohmann::ordered_json::array();
  int failures = 0;
  for (double rho : {0.5, 1.0, 2.0}) {
    GrowthModel model = GrowthModel::exp_order(rho);
    for (double eps : {0.25, 0.5, 0.75, 0.9}) {
      double k = witness_k_from_order(rho * 1.001, rho * 0.999, eps);
      // Closed-form onset of e^{rho k t} >= (k e^{rho t})^{1/eps}.
      double T = std::log(k) / (rho * (eps * k - 1.0));
      GridSpec grid{{std::max(T * 1.02, 1e-3), 50.0}, 128};
      bool strong = check_strong_log_regular(model, eps, k, grid).holds();
      bool gen1 = check_generalized(model, 1, eps, k, grid).holds();
      auto d = find_log_witness_d(model, k, grid);
      bool ok = strong && gen1 && d.has_value();
      if (!ok) ++failures;
      tuples.push_back({{"rho", rho},
                        {"eps", eps},
                        {"k", k},
                        {"strong", strong},
                        {"generalized_m1", gen1},
                        {"d_witness", d ? nlohmann::ordered_json(*d)
                                        : nlohmann::ordered_json(nullptr)}});
    }
  }
  res.seconds = elapsed_s(start);
  res.passed = failures == 0;
  res.details["tuples"] = tuples;
  res.details["failures"] = failures;
  return res;
}

// --- criterion 4: Power(2) is not strongly log-regular ---------------------

CriterionResult criterion_power2_certificate(std::uint64_t) {
  CriterionResult res{4, "power2-not-strongly-log-regular", false, 0.0, {}};
  auto start = Clock::now();
  GrowthModel model = GrowthModel::power(2.0);
  int checked = 0, failed_as_expected = 0;
  double worst_hi = 1e6;
  for (double eps : {0.6, 0.75, 0.9}) {
    // Closed-form reduction: (kt)^2 >= (k t^2)^{1/eps} holds exactly up to
    // t* = k^{(2 eps - 1)/(2 - 2 eps)}, so the scan window must reach past
    // t* before it can witness the eventual failure. The nominal window
    // [1e3, 1e6] is extended accordingly for large k.
    double alpha = (2.0 * eps - 1.0) / (2.0 - 2.0 * eps);
    for (int j = 0; j <= 40; ++j) {
      double k = 1.1 * std::pow(2.0, j);
      double t_star = std::pow(k, alpha);
      double hi = std::max(1e6, 10.0 * t_star);
      worst_hi = std::max(worst_hi, hi);
      auto rep = check_strong_log_regular(model, eps, k, {{1e3, hi}, 256});
      ++checked;
      if (rep.verdict == Verdict::fails) ++failed_as_expected;
    }
  }
  bool log_regular_ok = check_log_regular(model, 2.0, 1.5, {{1e3, 1e6}, 256}).holds();
  res.seconds = elapsed_s(start);
  res.passed = checked == failed_as_expected && log_regular_ok;
  res.details["eps_grid"] = {0.6, 0.75, 0.9};
  res.details["k_grid"] = "1.1 * 2^j, j = 0..40";
  res.details["checked"] = checked;
  res.details["failed_as_expected"] = failed_as_expected;
  res.details["log_regular_k2_d1.5"] = log_regular_ok;
  res.details["window_note"] =
      "window [1e3, 1e6] extended to reach past the closed-form holds-region t <= "
      "k^{(2eps-1)/(2-2eps)} for large k";
  res.details["largest_t_hi"] = worst_hi;
  return res;
}

// --- criterion 5: the first example construction ----------------------------

CriterionResult criterion_example1_build(std::uint64_t) {
  CriterionResult res{5, "example1-build", false, 0.0, {}};
  auto start = Clock::now();
  PhiConstruction phi = build_phi(0.5, 5.0, 4.0, 6);
  bool schedule_ok = phi.schedule.size() >= 2 && phi.schedule[0] == 1 && phi.schedule[1] == 4;

  // a_2 = 25 e^40 and a_4 = e^2500 as level-index values (mantissa 1e-6).
  Magnitude a2_expect = Magnitude::from_ln(std::log(25.0) + 40.0);
  Magnitude a4_expect = Magnitude::from_ln(2500.0);
  auto close = [](const Magnitude& x, const Magnitude& y) {
    return x.level() == y.level() && std::abs(x.mantissa() - y.mantissa()) <= 1e-6;
  };
  bool values_ok = close(phi.a(2), a2_expect) && close(phi.a(4), a4_expect);

  bool convex_ok = verify_convexity(phi).holds();
  bool growth_ok = verify_growth_inequality(phi, 0.5, 5.0).holds();

  auto ratios = order_ratios(phi);
  bool ratios_ok = true;
  int m = 0;
  for (int N : phi.schedule) {
    ++m;
    ratios_ok = ratios_ok && std::abs(ratios[N].ratio - 1.0) < 1e-12 &&
                ratios[N - 1].ratio < std::pow(2.0, -m);
  }
  res.seconds = elapsed_s(start);
  res.passed = schedule_ok && values_ok && convex_ok && growth_ok && ratios_ok &&
               res.seconds < 1.0;
  res.details["schedule"] = phi.schedule;
  res.details["a2"] = phi.a(2).to_json();
  res.details["a4"] = phi.a(4).to_json();
  res.details["convexity"] = convex_ok;
  res.details["growth_inequality"] = growth_ok;
  res.details["breakpoint_ratios_ok"] = ratios_ok;
  res.details["budget_seconds"] = 1.0;
  return res;
}

// --- criterion 6: epsilon extension -----------------------------------------

CriterionResult criterion_epsilon_extension(std::uint64_t) {
  CriterionResult res{6, "epsilon-extension", false, 0.0, {}};
  auto start = Clock::now();
  PhiConstruction phi = build_phi(0.5, 5.0, 4.0, 6);
  EpsilonExtension ext = extend_epsilon(phi, 0.2);
  res.seconds = elapsed_s(start);
  res.passed = ext.k == 15625.0 && std::abs(ext.power_sum - 126.0) < 1e-9 &&
               std::abs(ext.power_sum_bound - 48.0) < 1e-9 &&
               ext.power_sum >= ext.power_sum_bound && ext.report.holds();
  res.details = ext.to_json();
  res.details.erase("growth_inequality");
  res.details["growth_inequality_verdict"] = verdict_name(ext.report.verdict);
  return res;
}

// --- criterion 7: separation of the second example --------------------------

CriterionResult criterion_separation(std::uint64_t) {
  CriterionResult res{7, "example2-separation", false, 0.0, {}};
  auto start = Clock::now();
  SeparationParams params = separation_bounds(0.75);
  bool ok = true;
  nlohmann::ordered_json onsets;
  try {
    auto r1 = verify_separation(params, 1, 60);   // route agreement asserted inside
    auto r3 = verify_separation(params, 3, 60);
    onsets["m1"] = r1.onset_N;
    onsets["m3"] = r3.onset_N;
    ok = r1.onset_N == 1 && r3.onset_N == 4 && r1.report.holds() && r3.report.holds();
  } catch (const std::logic_error& e) {
    ok = false;
    onsets["route_disagreement"] = e.what();
  }
  res.seconds = elapsed_s(start);
  res.passed = ok;
  res.details["params"] = params.to_json();
  res.details["onsets"] = onsets;
  res.details["n_range"] = 60;
  return res;
}

// --- criterion 8: the Q2-but-not-A witness ----------------------------------

CriterionResult criterion_q2_witness(std::uint64_t) {
  CriterionResult res{8, "q2-not-a-witness", false, 0.0, {}};
  auto start = Clock::now();
  Magnitude R = exp(exp(Magnitude::from_real(2.0)));  // ln ln R = 2
  std::vector<int> checkpoints{10, 15, 20};
  auto base = q2_not_a_witness(0.75, R, 20, checkpoints);
  bool base_ok = base.verdict.q2_hit.has_value() && !base.verdict.a_lag.has_value() &&
                 base.report.holds();
  auto pert = q2_not_a_witness(0.75, R, 20, checkpoints,
                               GrowthModel::perturbed(example2_model(), 1.0));
  bool pert_ok = pert.verdict.q2_hit.has_value() == base.verdict.q2_hit.has_value() &&
                 pert.verdict.a_lag.has_value() == base.verdict.a_lag.has_value() &&
                 pert.report.holds();
  res.seconds = elapsed_s(start);
  res.passed = base_ok && pert_ok;
  res.details["base_verdict"] = base.verdict.to_json();
  res.details["perturbed_verdict"] = pert.verdict.to_json();
  res.details["report_verdict"] = verdict_name(base.report.verdict);
  res.details["max_lag_tested"] = 5;
  return res;
}

// --- criterion 9: composition transfer --------------------------------------

CriterionResult criterion_composition_transfer(std::uint64_t) {
  CriterionResult res{9, "composition-transfer", false, 0.0, {}};
  auto start = Clock::now();
  auto rep = verify_composition_transfer(GrowthModel::exp_order(1.0), GrowthModel::power(2.0),
                                         0.75, {{1.0, 20.0}, 256}, 3.0);
  res.seconds = elapsed_s(start);
  res.passed = rep.verdict == Verdict::holds_on_window &&
               std::abs(rep.params["k_prime"].get<double>() - std::pow(3.0, 1.5)) < 1e-12;
  res.details["verdict"] = verdict_name(rep.verdict);
  res.details["k"] = 3.0;
  res.details["k_prime"] = rep.params["k_prime"];
  res.details["window"] = {{"t_lo", 1.0}, {"t_hi", 20.0}};
  return res;
}

// --- criterion 10: the iterated chain ----------------------------------------

CriterionResult criterion_theorem21_chain(std::uint64_t) {
  CriterionResult res{10, "theorem21-chain", false, 0.0, {}};
  auto start = Clock::now();
  Magnitude r0 = exp(Magnitude::from_real(3.0));
  auto rep = verify_theorem21_chain(GrowthModel::exp_order(1.0), 0.5, 3.0, r0, 4);
  bool shallow_ok = rep.verdict == Verdict::holds_on_window && rep.n_fails == 0 &&
                    rep.n_uncertain == 0;
  // Deeper steps may go inconclusive under absorption, never fail, and the
  // first four steps must stay decisively held.
  auto deep = verify_theorem21_chain(GrowthModel::exp_order(1.0), 0.5, 3.0, r0, 8);
  bool deep_ok = deep.n_fails == 0;
  int early_not_held = 0;
  for (const auto& row : deep.rows)
    if (row.t <= 4.0 && row.outcome != PointOutcome::holds) ++early_not_held;
  res.seconds = elapsed_s(start);
  res.passed = shallow_ok && deep_ok && early_not_held == 0;
  res.details["n_max_4_verdict"] = verdict_name(rep.verdict);
  res.details["n_max_8_fails"] = deep.n_fails;
  res.details["n_max_8_uncertain"] = deep.n_uncertain;
  res.details["steps_below_5_not_held"] = early_not_held;
  return res;
}

using CriterionFn = CriterionResult (*)(std::uint64_t);

struct Entry {
  CriterionFn fn;
};

const Entry kCriteria[] = {
    {criterion_magnitude_oracle},   {criterion_strong_instance},
    {criterion_implication_chain},  {criterion_power2_certificate},
    {criterion_example1_build},     {criterion_epsilon_extension},
    {criterion_separation},         {criterion_q2_witness},
    {criterion_composition_transfer}, {criterion_theorem21_chain},
};

std::vector<CriterionResult> run_pass(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (const Entry& e : kCriteria) {
    try {
      out.push_back(e.fn(seed));
    } catch (const std::exception& ex) {
      CriterionResult r;
      r.id = static_cast<int>(out.size()) + 1;
      r.name = "criterion-" + std::to_string(r.id);
      r.passed = false;
      r.details["exception"] = ex.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

nlohmann::ordered_json dump_without_timing(const std::vector<CriterionResult>& criteria) {
  auto arr = nlohmann::ordered_json::array();
  for (const CriterionResult& c : criteria)
    arr.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"details", c.details}});
  return arr;
}

}  // namespace

nlohmann::ordered_json SelftestReport::to_json() const {
  // No wall-clock fields in here: the JSON must be byte-identical across
  // identically-seeded runs (timings are printed by the runners instead).
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["seed"] = seed;
  j["criteria"] = dump_without_timing(criteria);
  j["all_passed"] = all_passed;
  return j;
}

SelftestReport run_selftest(std::uint64_t seed) {
  SelftestReport report;
  report.seed = seed;
  report.criteria = run_pass(seed);

  // Criterion 11: a second pass with the same seed serialises identically
  // (timings excluded; they are wall-clock).
  CriterionResult det{11, "selftest-determinism", false, 0.0, {}};
  auto start = Clock::now();
  std::vector<CriterionResult> second = run_pass(seed);
  std::string a = dump_without_timing(report.criteria).dump();
  std::string b = dump_without_timing(second).dump();
  det.seconds = elapsed_s(start);
  det.passed = a == b;
  det.details["bytes_compared"] = a.size();
  det.details["identical"] = det.passed;
  report.criteria.push_back(std::move(det));

  report.all_passed = true;
  for (const CriterionResult& c : report.criteria) report.all_passed &= c.passed;
  return report;
}

}  // namespace fastesc
