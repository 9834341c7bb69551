#include "fastesc/magnitude.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_mpfr.hpp"

using namespace fastesc;

namespace {

// Random canonical magnitude with level <= max_level.
Magnitude random_magnitude(std::mt19937_64& rng, int max_level) {
  std::uniform_int_distribution<int> lev(0, max_level);
  int level = lev(rng);
  double lo = level == 0 ? 0.0 : 1.0;
  std::uniform_real_distribution<double> man(lo, std::exp(1.0) - 1e-12);
  return Magnitude::from_tower(level, man(rng));
}

double oracle_mantissa_gap(const Magnitude& got, const oracle::RefMagnitude& want) {
  REQUIRE(got.level() == want.level);
  double scale = std::max(std::abs(want.mantissa), 1.0);
  return std::abs(got.mantissa() - want.mantissa) / scale;
}

}  // namespace

TEST_CASE("canonical form of plain reals") {
  Magnitude one = Magnitude::from_real(1.0);
  CHECK(one.level() == 0);
  CHECK(one.mantissa() == doctest::Approx(1.0));

  // e itself sits on the canonical boundary; either side of it must compare
  // as a tie with the exact boundary form exp(1).
  Magnitude e_in = Magnitude::from_real(std::exp(1.0));
  CHECK(cmp(e_in, exp(Magnitude::from_real(1.0))) == Rel::tie);

  Magnitude big = Magnitude::from_real(1e10);
  CHECK(big.level() == 3);
  CHECK(big.mantissa() == doctest::Approx(1.1430).epsilon(2e-3));
  auto ref = oracle::RefValue(1e10).canonical();
  CHECK(oracle_mantissa_gap(big, ref) < 1e-12);

  CHECK(Magnitude::from_real(0.0).is_zero());
  CHECK_THROWS_AS(Magnitude::from_real(-1.0), std::domain_error);
  CHECK_THROWS_AS(Magnitude::from_real(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("ln: level decrement and level-0 evaluation") {
  Magnitude x = Magnitude::from_tower(3, 1.143);
  Magnitude lx = ln(x);
  CHECK(lx.level() == 2);
  CHECK(lx.mantissa() == doctest::Approx(1.143));

  Magnitude two = Magnitude::from_real(2.0);
  CHECK(ln(two).level() == 0);
  CHECK(ln(two).mantissa() == doctest::Approx(std::log(2.0)));

  CHECK(ln(Magnitude::from_tower(1, 1.0)).mantissa() == doctest::Approx(1.0));

  CHECK_THROWS_AS(ln(Magnitude::from_real(0.5)), std::domain_error);
  CHECK_THROWS_AS(ln(Magnitude::from_real(0.0)), std::domain_error);
}

TEST_CASE("exp: level increment and level-0 evaluation") {
  Magnitude x = Magnitude::from_tower(1, 2.0);
  CHECK(exp(x).level() == 2);
  CHECK(exp(x).mantissa() == doctest::Approx(2.0));

  Magnitude half = Magnitude::from_real(0.5);
  CHECK(exp(half).level() == 0);
  CHECK(exp(half).mantissa() == doctest::Approx(1.6487212707));

  Magnitude one = Magnitude::from_real(1.0);
  CHECK(exp(one).level() == 1);
  CHECK(exp(one).mantissa() == doctest::Approx(1.0));
}

TEST_CASE("mul_scalar") {
  Magnitude two = Magnitude::from_real(2.0);
  Magnitude six = mul_scalar(two, 3.0);
  CHECK(six.level() == 1);
  CHECK(six.mantissa() == doctest::Approx(std::log(6.0)));

  Magnitude x = Magnitude::from_tower(1, 2.0);
  Magnitude same = mul_scalar(x, 1.0);
  CHECK(same.level() == 1);
  CHECK(same.mantissa() == 2.0);
  CHECK_FALSE(same.absorbed());

  // Saturation at level >= 3: value unchanged, flagged, slack widened.
  Magnitude high = Magnitude::from_tower(5, 1.5);
  Magnitude absorbed = mul_scalar(high, 2.0);
  CHECK(absorbed.level() == 5);
  CHECK(absorbed.mantissa() == 1.5);
  CHECK(absorbed.absorbed());
  CHECK(cmp(absorbed, high) == Rel::uncertain);

  // Scalars below 1 can pull a value down through the level-0 window.
  Magnitude small = mul_scalar(exp(Magnitude::from_real(1.0)), std::exp(-1.0));
  CHECK(small.level() == 0);
  CHECK(small.mantissa() == doctest::Approx(1.0));

  CHECK_THROWS_AS(mul_scalar(two, 0.0), std::domain_error);
  CHECK_THROWS_AS(mul_scalar(two, -2.0), std::domain_error);
}

TEST_CASE("add_scalar") {
  Magnitude two = Magnitude::from_real(2.0);
  CHECK(add_scalar(two, 3.0).to_real() == doctest::Approx(5.0));
  CHECK(add_scalar(two, -1.5).to_real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(add_scalar(two, -3.0), std::domain_error);

  Magnitude high = Magnitude::from_tower(4, 1.2);
  Magnitude absorbed = add_scalar(high, 100.0);
  CHECK(absorbed.absorbed());
  CHECK(absorbed.mantissa() == 1.2);
}

TEST_CASE("pow_scalar") {
  Magnitude e2 = Magnitude::from_tower(1, 2.0);
  Magnitude cubed = pow_scalar(e2, 3.0);
  CHECK(cubed.level() == 2);
  CHECK(cubed.mantissa() == doctest::Approx(std::log(6.0)));

  Magnitude any = Magnitude::from_tower(2, 1.7);
  Magnitude same = pow_scalar(any, 1.0);
  CHECK(same.mantissa() == 1.7);

  Magnitude one = Magnitude::from_real(1.0);
  Magnitude p = pow_scalar(one, 7.0);
  CHECK(p.level() == 0);
  CHECK(p.mantissa() == doctest::Approx(1.0));

  CHECK(pow_scalar(Magnitude::from_real(0.5), 2.0).to_real() == doctest::Approx(0.25));
  CHECK_THROWS_AS(pow_scalar(Magnitude::from_real(0.5), 1.5), std::domain_error);
  CHECK_THROWS_AS(pow_scalar(e2, 0.0), std::domain_error);
}

TEST_CASE("cmp: lexicographic order with tolerance") {
  CHECK(cmp(Magnitude::from_tower(2, 1.0), Magnitude::from_tower(1, 2.7)) == Rel::greater);
  CHECK(cmp(Magnitude::from_real(1.0), Magnitude::from_real(1.0)) == Rel::tie);
  CHECK(cmp(Magnitude::from_real(1e10), Magnitude::from_real(1e10 + 1.0)) == Rel::tie);
  CHECK(cmp(Magnitude::from_real(3.0), Magnitude::from_real(4.0)) == Rel::less);
  // Near the canonical boundary a one-level gap can still be a tie.
  CHECK(cmp(Magnitude::from_tower(1, std::exp(1.0) - 1e-13), Magnitude::from_tower(2, 1.0)) ==
        Rel::tie);
}

TEST_CASE("rendering, parsing, json") {
  Magnitude x = Magnitude::from_tower(3, 1.14315);
  Magnitude back = Magnitude::parse(x.to_string());
  CHECK(back.level() == 3);
  CHECK(back.mantissa() == doctest::Approx(1.14315).epsilon(1e-11));

  Magnitude plain = Magnitude::parse("42.5");
  CHECK(plain.to_real() == doctest::Approx(42.5));

  auto j = x.to_json();
  CHECK(j["level"] == 3);
  Magnitude jback = Magnitude::from_json(j);
  CHECK(jback.mantissa() == doctest::Approx(x.mantissa()));

  // Non-canonical inputs normalise.
  Magnitude n = Magnitude::parse("E^2(5.0)");
  CHECK(n.level() == 3);
  CHECK(n.mantissa() == doctest::Approx(std::log(std::log(5.0)) + 1.0).epsilon(0.5));

  CHECK_THROWS_AS(Magnitude::parse("nonsense"), std::invalid_argument);
}

TEST_CASE("round trip to_real/from_real within 1e-12 up to 1e300") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> expo(-3.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    double v = std::pow(10.0, expo(rng));
    double w = Magnitude::from_real(v).to_real();
    CHECK(std::abs(w - v) <= 1e-12 * v);
  }
  CHECK(Magnitude::from_real(0.0).to_real() == 0.0);
}

TEST_CASE("order embedding: from_real preserves strict order") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> expo(-2.0, 250.0);
  for (int i = 0; i < 2000; ++i) {
    double a = std::pow(10.0, expo(rng));
    double b = std::pow(10.0, expo(rng));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    Rel r = cmp(Magnitude::from_real(a), Magnitude::from_real(b));
    if (r != Rel::tie) CHECK(r == Rel::less);
  }
}

TEST_CASE("exp(ln(x)) is the identity for values >= 1") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    Magnitude x = random_magnitude(rng, 4);
    if (x.level() == 0 && x.mantissa() < 1.0) continue;
    Magnitude y = exp(ln(x));
    CHECK(y.level() == x.level());
    CHECK(y.mantissa() == doctest::Approx(x.mantissa()).epsilon(1e-14));
  }
}

TEST_CASE("monotonicity of ln/exp/mul/pow on exact values") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ks(1.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    Magnitude x = random_magnitude(rng, 3);
    Magnitude y = random_magnitude(rng, 3);
    if (cmp(x, y) == Rel::greater) std::swap(x, y);
    if (cmp(x, y) != Rel::less) continue;
    double k = ks(rng);
    double a = ks(rng) / 10.0 + 1.0;

    CHECK(cmp(exp(x), exp(y)) != Rel::greater);
    Magnitude mx = mul_scalar(x, k), my = mul_scalar(y, k);
    if (!mx.absorbed() && !my.absorbed()) CHECK(cmp(mx, my) != Rel::greater);
    bool x_has_ln = x.level() >= 1 || x.mantissa() >= 1.0;
    if (x_has_ln) {
      CHECK(cmp(ln(x), ln(y)) != Rel::greater);
      Magnitude px = pow_scalar(x, a), py = pow_scalar(y, a);
      if (!px.absorbed() && !py.absorbed()) CHECK(cmp(px, py) != Rel::greater);
    }
  }
}

TEST_CASE("kernel agrees with the high-precision oracle at levels <= 2") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ks(0.1, 100.0);
  std::uniform_real_distribution<double> as(0.2, 8.0);
  for (int i = 0; i < 1000; ++i) {
    Magnitude x = random_magnitude(rng, 2);
    if (x.is_zero()) continue;
    oracle::RefValue ref = oracle::RefValue::tower(x.level(), x.mantissa());

    CHECK(oracle_mantissa_gap(exp(x), ref.exp().canonical()) < 1e-9);
    double k = ks(rng);
    CHECK(oracle_mantissa_gap(mul_scalar(x, k), ref.mul(k).canonical()) < 1e-9);
    if (x.level() >= 1 || x.mantissa() >= 1.0) {
      CHECK(oracle_mantissa_gap(ln(x), ref.ln().canonical()) < 1e-9);
      double a = as(rng);
      CHECK(oracle_mantissa_gap(pow_scalar(x, a), ref.pow(a).canonical()) < 1e-9);
    }
  }
}
