#include "fastesc/construction.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "fastesc/regularity.hpp"

using namespace fastesc;

namespace {
// Reference construction used throughout: eps~ = 0.5, k~ = 5, t0 = 4.
PhiConstruction reference_phi(int n_max = 6) { return build_phi(0.5, 5.0, 4.0, n_max); }
const double kLn5 = std::log(5.0);
}  // namespace

TEST_CASE("build_phi: reference values by direct recurrence") {
  PhiConstruction phi = reference_phi();
  REQUIRE(phi.schedule.size() >= 2);
  CHECK(phi.schedule[0] == 1);
  CHECK(phi.schedule[1] == 4);
  CHECK(phi.t[1] == doctest::Approx(20.0));
  CHECK(phi.t[4] == doctest::Approx(2500.0));

  // a_1 = e^20, a_2 = 25 e^40, a_3 = 15625 e^80, a_4 = e^2500.
  CHECK(phi.ln_a[0] == 0.0);
  CHECK(phi.ln_a[1] == doctest::Approx(20.0));
  CHECK(phi.ln_a[2] == doctest::Approx(2.0 * kLn5 + 40.0).epsilon(1e-14));
  CHECK(phi.ln_a[3] == doctest::Approx(6.0 * kLn5 + 80.0).epsilon(1e-14));
  CHECK(phi.ln_a[4] == doctest::Approx(2500.0));
  CHECK(phi.ln_a[5] == doctest::Approx(2.0 * kLn5 + 5000.0).epsilon(1e-14));

  // As level-index values: a_2 = 25 e^40 = exp^3(ln ln(ln 25 + 40)).
  Magnitude a2 = phi.a(2);
  CHECK(a2.level() == 3);
  CHECK(a2.mantissa() ==
        doctest::Approx(std::log(std::log(2.0 * kLn5 + 40.0))).epsilon(1e-12));
}

TEST_CASE("build_phi: admissibility rejections name the inequality") {
  CHECK_THROWS_WITH_AS(build_phi(0.5, 3.0, 4.0, 6), doctest::Contains("2/eps_tilde"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_phi(0.5, 5.0, 1.0, 6), doctest::Contains("log(k_tilde)/t0"),
                       std::invalid_argument);
  CHECK_THROWS_AS(build_phi(1.2, 5.0, 4.0, 6), std::invalid_argument);
}

TEST_CASE("phi_eval") {
  PhiConstruction phi = reference_phi();
  // Breakpoints are exact.
  Magnitude at_t1 = phi_eval(phi, 20.0);
  CHECK(cmp(at_t1, exp(Magnitude::from_real(20.0))) == Rel::tie);
  // Midpoint of the first segment: (a_0 + a_1)/2 ~ e^20 / 2.
  Magnitude mid = phi_eval(phi, 12.0);
  CHECK(mid.to_real() == doctest::Approx((1.0 + std::exp(20.0)) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(phi_eval(phi, 3.0), std::domain_error);
  CHECK_THROWS_AS(phi_eval(phi, 1e9), std::domain_error);
  // Tall segments return flagged approximations.
  Magnitude tall = phi_eval(phi, 1500.0);
  CHECK(tall.absorbed());
}

TEST_CASE("verify_convexity") {
  PhiConstruction phi = reference_phi();
  CHECK(verify_convexity(phi).verdict == Verdict::holds_on_window);

  // Degenerate two-point construction holds vacuously.
  CHECK(verify_convexity(reference_phi(1)).verdict == Verdict::holds_on_window);

  // Hand-corrupted a_2 breaks convexity with witness n = 2.
  PhiConstruction bad = phi;
  bad.ln_a[2] -= 100.0 * std::log(10.0);
  auto rep = verify_convexity(bad);
  CHECK(rep.verdict == Verdict::fails);
  CHECK(rep.first_failure->t == doctest::Approx(1.0));  // gradient row n=1 sees a_2
}

TEST_CASE("verify_growth_inequality at (eps~, k~)") {
  PhiConstruction phi = reference_phi();
  auto rep = verify_growth_inequality(phi, 0.5, 5.0);
  CHECK(rep.verdict == Verdict::holds_on_window);
  // The recurrence indices hold with equality: ties are expected and accepted.
  CHECK(rep.n_ties > 0);

  // A corrupted schedule (skip the N_2 designation) eventually fails.
  PhiConstruction bad = phi;
  bad.ln_a[4] = bad.d_tilde * (std::log(bad.k_tilde) + bad.ln_a[3]);  // pretend not designated
  bad.ln_a[5] = bad.d_tilde * (std::log(bad.k_tilde) + bad.ln_a[4]);
  bad.ln_a[6] = 100.0;  // grossly too small
  CHECK(verify_growth_inequality(bad, 0.5, 5.0).verdict == Verdict::fails);

  CHECK_THROWS_AS(verify_growth_inequality(phi, 0.5, 7.0), std::invalid_argument);
}

TEST_CASE("extend_epsilon") {
  PhiConstruction phi = reference_phi();
  EpsilonExtension ext = extend_epsilon(phi, 0.2);
  CHECK(ext.p == doctest::Approx(std::log2(5.0)));
  CHECK(ext.n == 2);
  CHECK(ext.k == 15625.0);
  CHECK(ext.power_sum == doctest::Approx(126.0));
  CHECK(ext.power_sum_bound == doctest::Approx(48.0));
  CHECK(ext.report.verdict == Verdict::holds_on_window);

  CHECK_THROWS_AS(extend_epsilon(phi, 0.5), std::domain_error);
  CHECK_THROWS_AS(extend_epsilon(phi, 0.7), std::domain_error);
}

TEST_CASE("order ratios at breakpoints") {
  PhiConstruction phi = reference_phi();
  auto ratios = order_ratios(phi);
  // ratio = 1 exactly at designated indices; below 2^-m just before them.
  CHECK(ratios[1].ratio == doctest::Approx(1.0));
  CHECK(ratios[4].ratio == doctest::Approx(1.0));
  CHECK(ratios[0].ratio < 0.5);        // before N_1 (m = 1)
  CHECK(ratios[3].ratio < 0.25);       // before N_2 (m = 2)
  CHECK(ratios[3].ratio == doctest::Approx((6.0 * kLn5 + 80.0) / 500.0));
}

TEST_CASE("build_phi: invariants over random admissible parameters") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> eps_dist(0.3, 0.7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    double eps = eps_dist(rng);
    double k = 2.0 / eps + 1.0 + 9.0 * unit(rng);
    double lo_t0 = 2.0 * std::log(k) + 0.5;
    double t0 = lo_t0 + (20.0 - lo_t0) * unit(rng);
    CAPTURE(eps);
    CAPTURE(k);
    CAPTURE(t0);
    PhiConstruction phi = build_phi(eps, k, t0, 8);

    // N_1 exists (a_0 = 1 designates n = 1 immediately) and a_{N_m} = e^{t_{N_m}}.
    REQUIRE(!phi.schedule.empty());
    CHECK(phi.schedule[0] == 1);
    int m = 0;
    for (int N : phi.schedule) {
      ++m;
      CHECK(phi.ln_a[N] == phi.t[N]);
      CHECK(phi.ln_a[N - 1] / phi.t[N - 1] < std::pow(2.0, -m));
    }
    // phi(t_n) <= e^{t_n} from the first designation on.
    for (int n = phi.schedule[0]; n <= phi.n_max; ++n)
      CHECK(phi.ln_a[n] <= phi.t[n] * (1.0 + 1e-12));

    CHECK(verify_convexity(phi).verdict == Verdict::holds_on_window);
    CHECK(verify_growth_inequality(phi, eps, k).verdict == Verdict::holds_on_window);

    // The order scan of the piecewise model stays below k_tilde.
    auto est = estimate_order(phi.model(), phi.t0, phi.t.back(), 96);
    CHECK(est.rho_hi <= k + 1e-6);
  }
}

TEST_CASE("hadamard consequence on the piecewise model (exact segments)") {
  PhiConstruction phi = reference_phi();
  // Keep c*t inside the segments whose values fit a double so the scan stays
  // exact end to end.
  for (double c : {1.5, 2.0, 5.0})
    CHECK(check_hadamard(phi.model(), c, GridSpec{{4.0, 20.0}, 64}).holds());
}

TEST_CASE("example2_model") {
  GrowthModel m = example2_model();
  CHECK(m.eval_psi_at(10.0).to_real() == doctest::Approx(100.0));
  CHECK(check_log_regular(m, 2.0, 1.5, {{1.5, 1e5}, 128}).holds());
  auto strong = check_strong_log_regular(m, 0.9, 10.0, {{1e5, 1e6}, 64});
  CHECK(strong.verdict == Verdict::fails);
}

TEST_CASE("separation_bounds") {
  SeparationParams p = separation_bounds(0.75);
  CHECK(p.c_tilde == doctest::Approx(2.0 * 0.75 + (2.0 - 1.5) / 3.0));  // ~1.6667
  CHECK(p.c == doctest::Approx(2.0 * 0.75 + 2.0 * (2.0 - 1.5) / 3.0));  // ~1.8333
  // R0 just above e so that u0 = ln ln R0 > 0.
  CHECK(ln(ln(p.R0)).to_real() > 0.0);

  CHECK_THROWS_AS(separation_bounds(0.5), std::domain_error);
  CHECK_THROWS_AS(separation_bounds(1.0), std::domain_error);

  // The perturbed variant pushes R0 up but still succeeds.
  SeparationParams pp = separation_bounds(0.75, GrowthModel::perturbed(example2_model(), 1.0));
  CHECK(pp.R0.to_real() >= p.R0.to_real());
}

TEST_CASE("verify_separation") {
  SeparationParams p = separation_bounds(0.75);
  // m=1: 1.5^2 = 2.25 > 2 at n=1, 1.5^3 = 3.375 < 4 at n=2 => N = 1.
  auto r1 = verify_separation(p, 1, 60);
  CHECK(r1.onset_N == 1);
  CHECK(r1.report.verdict == Verdict::holds_on_window);
  // m=3: first pass at n=5 (1.5^8 ~ 25.6 < 32) => N = 4.
  auto r3 = verify_separation(p, 3, 60);
  CHECK(r3.onset_N == 4);
  // m=0: mu-iterate below M-iterate from the start.
  CHECK(verify_separation(p, 0, 60).onset_N == 0);

  // Onsets agree across eps and m between both routes (asserted inside).
  for (double eps : {0.6, 0.75, 0.9}) {
    SeparationParams q = separation_bounds(eps);
    for (int m = 1; m <= 3; ++m) {
      auto r = verify_separation(q, m, 60);
      CHECK(r.onset_N == separation_onset(eps, m, 60));
    }
  }
}
