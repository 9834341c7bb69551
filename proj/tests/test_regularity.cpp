#include "fastesc/regularity.hpp"

#include <doctest.h>

#include <cmath>

using namespace fastesc;

namespace {
const GrowthModel kExp1 = GrowthModel::exp_order(1.0);
const GrowthModel kPow2 = GrowthModel::power(2.0);
}  // namespace

TEST_CASE("strong log-regularity: exponential instance") {
  // e^{3t} >= (3 e^t)^2 reduces to t >= 2 ln 3 ~ 2.197.
  auto holds = check_strong_log_regular(kExp1, 0.5, 3.0, {{2.3, 50.0}, 256});
  CHECK(holds.verdict == Verdict::holds_on_window);
  CHECK(holds.n_holds == 256);

  auto fails = check_strong_log_regular(kExp1, 0.5, 3.0, {{2.0, 50.0}, 256});
  CHECK(fails.verdict == Verdict::fails);
  REQUIRE(fails.first_failure.has_value());
  CHECK(fails.first_failure->t == doctest::Approx(2.0));
}

TEST_CASE("strong log-regularity: Power(2) fails at large t") {
  // (kt)^2 >= (k t^2)^{1/eps} fails beyond t = k^{(2 eps - 1)/(2 - 2 eps)};
  // for eps = 0.9, k = 10 that is t > 10^4, so [1e5, 1e6] fails throughout.
  auto rep = check_strong_log_regular(kPow2, 0.9, 10.0, {{1e5, 1e6}, 256});
  CHECK(rep.verdict == Verdict::fails);
  CHECK(rep.first_failure->t == doctest::Approx(1e5));
  CHECK(rep.n_holds == 0);
}

TEST_CASE("eps-monotonicity of the strong check") {
  // If it holds at (eps, k) it holds at (eps', k) for eps' > eps.
  REQUIRE(check_strong_log_regular(kExp1, 0.5, 3.0, {{2.3, 50.0}, 64}).holds());
  for (double eps : {0.6, 0.75, 0.9})
    CHECK(check_strong_log_regular(kExp1, eps, 3.0, {{2.3, 50.0}, 64}).holds());
}

TEST_CASE("log-regularity") {
  // Power(2): psi(kt) = k^2 t^2 >= k d t^2 whenever k >= d.
  CHECK(check_log_regular(kPow2, 2.0, 1.5, {{1.0, 1e6}, 256}).holds());

  // ExpOrder(1), k = 2, d = 2: e^{2t} >= 4 e^t iff t >= ln 4.
  CHECK(check_log_regular(kExp1, 2.0, 2.0, {{1.4, 50.0}, 128}).holds());
  auto fails = check_log_regular(kExp1, 2.0, 2.0, {{1.0, 50.0}, 128});
  CHECK(fails.verdict == Verdict::fails);
  CHECK(fails.first_failure->t == doctest::Approx(1.0));

  // d > k on Power(2) fails everywhere.
  CHECK(check_log_regular(kPow2, 2.0, 3.0, {{1.5, 1e4}, 128}).verdict == Verdict::fails);

  CHECK_THROWS_AS(check_log_regular(kPow2, 1.0, 1.5, {{1.0, 10.0}, 16}), std::invalid_argument);
}

TEST_CASE("generalized condition") {
  // m = 1: eps psi(kt) >= k psi(t); for the exponential model this reduces to
  // 2t >= ln 6, comfortably true on [2, 50].
  CHECK(check_generalized(kExp1, 1, 0.5, 3.0, {{2.0, 50.0}, 128}).holds());

  // m = 2 agrees with the strong checker pointwise.
  for (auto grid : {GridSpec{{2.0, 50.0}, 64}, GridSpec{{1e5, 1e6}, 64}}) {
    auto a = check_strong_log_regular(kPow2, 0.9, 10.0, grid);
    auto b = check_generalized(kPow2, 2, 0.9, 10.0, grid);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].outcome == b.rows[i].outcome);
    auto c = check_strong_log_regular(kExp1, 0.5, 3.0, grid);
    auto d = check_generalized(kExp1, 2, 0.5, 3.0, grid);
    for (size_t i = 0; i < c.rows.size(); ++i) CHECK(c.rows[i].outcome == d.rows[i].outcome);
  }

  // m = 3: e^z does not satisfy the generalised condition for any eps, k.
  // eps ln(kt) >= ln(t + ln k) fails once ln t (1 - eps) outruns eps ln k;
  // extend the window past that onset for each k.
  for (double k : {2.0, 64.0, 1e3, 1e6}) {
    for (double eps : {0.5, 0.9}) {
      double onset = std::exp(eps * std::log(k) / (1.0 - eps));
      GridSpec grid{{2.0, std::max(50.0, 20.0 * onset)}, 256};
      auto rep = check_generalized(kExp1, 3, eps, k, grid);
      CHECK(rep.verdict == Verdict::fails);
    }
  }

  // Window too low for the iterated log: domain error.
  CHECK_THROWS_AS(check_generalized(kPow2, 3, 0.5, 2.0, {{1.0, 2.0}, 16}), std::domain_error);
}

TEST_CASE("doubling condition") {
  // ExpOrder(1), C = e: psi(t+1) = e psi(t), and 2 <= e <= 3.
  DoublingParams dp{2.0, 3.0, std::exp(1.0)};
  CHECK(check_doubling(kExp1, dp, {{1.0, 50.0}, 128}).holds());

  // Power(2): the ratio (t+1)^2/t^2 tends to 1 < A, so the lower bound fails.
  auto rep = check_doubling(kPow2, dp, {{2.5, 1e4}, 128});
  CHECK(rep.verdict == Verdict::fails);
  CHECK(rep.first_failure->side == "lower");

  DoublingParams degenerate{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(check_doubling(kExp1, degenerate, {{1.0, 10.0}, 16}), std::invalid_argument);
}

TEST_CASE("witness_k_from_order") {
  CHECK(witness_k_from_order(1.001, 0.999, 0.5) == doctest::Approx(2.2044).epsilon(1e-3));
  CHECK(witness_k_from_order(2.0, 1.0, 0.5) == doctest::Approx(4.4));
  CHECK(witness_k_from_order(1.0, 0.5, 0.25) == doctest::Approx(8.8));
  CHECK_THROWS_AS(witness_k_from_order(1.0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(witness_k_from_order(0.5, 1.0, 0.5), std::domain_error);
}

TEST_CASE("implication chain: strong => generalized(m=1) => log-regular witness") {
  for (double rho : {0.5, 1.0, 2.0}) {
    GrowthModel model = GrowthModel::exp_order(rho);
    for (double eps : {0.25, 0.5, 0.9}) {
      double k = witness_k_from_order(rho * 1.001, rho * 0.999, eps);
      // The closed-form onset for e^{rho k t} >= (k e^{rho t})^{1/eps}.
      double T = std::log(k) / (rho * (eps * k - 1.0));
      GridSpec grid{{std::max(T * 1.02, 1e-3), 50.0}, 128};
      REQUIRE(check_strong_log_regular(model, eps, k, grid).holds());
      CHECK(check_generalized(model, 1, eps, k, grid).holds());
      auto d = find_log_witness_d(model, k, grid);
      REQUIRE(d.has_value());
      CHECK(*d > 1.0);
    }
  }
}

TEST_CASE("theorem 2.1 chain") {
  Magnitude r0 = exp(Magnitude::from_real(3.0));  // e^3
  auto rep = verify_theorem21_chain(kExp1, 0.5, 3.0, r0, 4);
  CHECK(rep.verdict == Verdict::holds_on_window);
  CHECK(rep.n_fails == 0);
  CHECK(rep.n_uncertain == 0);
  CHECK(rep.rows.size() == 12);  // three comparisons per step

  // Deeper runs may go inconclusive but must never fail.
  auto deep = verify_theorem21_chain(kExp1, 0.5, 3.0, r0, 8);
  CHECK(deep.n_fails == 0);
  for (const auto& row : deep.rows)
    if (row.t <= 4.0) CHECK(row.outcome == PointOutcome::holds);

  // n_max = 0 is the empty chain.
  CHECK(verify_theorem21_chain(kExp1, 0.5, 3.0, r0, 0).holds());

  // Power(2) is not strongly log-regular: precondition fails.
  CHECK_THROWS_AS(verify_theorem21_chain(kPow2, 0.9, 10.0, r0, 3), std::domain_error);
}

TEST_CASE("composition transfer") {
  // Outer witness k = 3 at eps = (2/3) 0.75 = 0.5; k' = 3^{3/2}.
  auto rep = verify_composition_transfer(kExp1, kPow2, 0.75, {{1.0, 20.0}, 256}, 3.0);
  CHECK(rep.verdict == Verdict::holds_on_window);
  CHECK(rep.params["k_prime"].get<double>() == doctest::Approx(std::pow(3.0, 1.5)));

  // exp o exp with a searched witness.
  auto rep2 = verify_composition_transfer(kExp1, kExp1, 0.75, {{2.0, 20.0}, 128});
  CHECK(rep2.verdict == Verdict::holds_on_window);

  // A non-strongly-log-regular outer model has no witness.
  CHECK_THROWS_WITH_AS(
      verify_composition_transfer(kPow2, kExp1, 0.75, {{1.0, 20.0}, 64}),
      doctest::Contains("hypothesis unmet"), std::domain_error);
}
