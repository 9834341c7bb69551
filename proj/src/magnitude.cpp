#include "fastesc/magnitude.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace fastesc {

namespace {

const long double kE = expl(1.0L);

// Product exp^1(m) * exp^2(m) * ... * exp^count(m), saturating to +inf.
// This is the derivative of the value of exp^count(.) at mantissa m, and the
// denominator of every honest slack bound below.
long double tower_deriv(int count, double m) {
  long double prod = 1.0L;
  long double x = m;
  for (int i = 0; i < count; ++i) {
    x = expl(x);
    if (std::isinf(x)) return std::numeric_limits<long double>::infinity();
    prod *= x;
    if (std::isinf(prod)) return std::numeric_limits<long double>::infinity();
  }
  return prod;
}

// log-value of a magnitude with level in [1, 3]: exp^(level-1)(mantissa).
long double log_value(int level, double m) {
  long double x = m;
  for (int i = 1; i < level; ++i) x = expl(x);
  return x;
}

bool nearly_integer(double a) {
  return std::abs(a - std::round(a)) < 1e-9 && std::round(a) >= 0.0;
}

}  // namespace

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::less: return "less";
    case Rel::tie: return "tie";
    case Rel::greater: return "greater";
    case Rel::uncertain: return "uncertain";
  }
  return "?";
}

Magnitude Magnitude::canonical(long double value, long double value_slack, bool absorbed) {
  if (!(value >= 0.0L))
    throw std::domain_error("Magnitude: canonical form requires a nonnegative value");
  int level = 0;
  long double x = value;
  long double s = value_slack;
  while (x >= kE) {
    // d log(x)/dx = 1/x, so the uncertainty contracts with each peel.
    s /= x;
    x = logl(x);
    ++level;
  }
  return Magnitude(level, static_cast<double>(x), static_cast<double>(s), absorbed);
}

Magnitude Magnitude::from_real(double v) {
  if (!std::isfinite(v) || v < 0.0)
    throw std::domain_error("Magnitude::from_real: requires a finite nonnegative value");
  return canonical(static_cast<long double>(v), 0.0L, false);
}

Magnitude Magnitude::from_ln(double u) {
  if (!std::isfinite(u)) throw std::domain_error("Magnitude::from_ln: requires a finite exponent");
  return from_tower(1, u);
}

Magnitude Magnitude::from_tower(int level, double x) {
  if (level < 0) throw std::domain_error("Magnitude::from_tower: negative level");
  if (!std::isfinite(x)) throw std::domain_error("Magnitude::from_tower: non-finite mantissa");
  if (level == 0) return from_real(x);
  long double m = x;
  // exp^L(m) = exp^(L+1)(log m); raise while the mantissa is too large.
  while (m >= kE) {
    m = logl(m);
    ++level;
  }
  // exp^L(m) with m < 1 collapses one level: exp^L(m) = exp^(L-1)(e^m).
  while (level > 0 && m < 1.0L) {
    m = expl(m);
    --level;
  }
  return Magnitude(level, static_cast<double>(m), 0.0, false);
}

Magnitude Magnitude::approx_tower(int level, double x, double x_slack) {
  if (level < 0) throw std::domain_error("Magnitude::approx_tower: negative level");
  if (!std::isfinite(x) || !(x_slack >= 0.0))
    throw std::domain_error("Magnitude::approx_tower: bad value or slack");
  if (level == 0 && x < 0.0)
    throw std::domain_error("Magnitude::approx_tower: negative value");
  long double m = x;
  long double s = x_slack;
  while (m >= kE) {
    s /= m;
    m = logl(m);
    ++level;
  }
  while (level > 0 && m < 1.0L) {
    m = expl(m);
    s *= m;
    --level;
  }
  return Magnitude(level, static_cast<double>(m), static_cast<double>(s), true);
}

double Magnitude::to_real() const {
  long double x = mantissa_;
  for (int i = 0; i < level_; ++i) {
    if (x > 11400.0L) return std::numeric_limits<double>::infinity();
    x = expl(x);
  }
  if (x > std::numeric_limits<double>::max())
    return std::numeric_limits<double>::infinity();
  return static_cast<double>(x);
}

std::string Magnitude::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "E^%d(%.12g)", level_, mantissa_);
  return buf;
}

Magnitude Magnitude::parse(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i + 1 < text.size() && (text[i] == 'E' || text[i] == 'e') && text[i + 1] == '^') {
    int level = 0;
    double mantissa = 0.0;
    if (std::sscanf(text.c_str() + i, text[i] == 'E' ? "E^%d(%lf)" : "e^%d(%lf)", &level,
                    &mantissa) != 2)
      throw std::invalid_argument("Magnitude::parse: expected E^level(mantissa), got '" + text +
                                  "'");
    return from_tower(level, mantissa);
  }
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw std::invalid_argument("");
    return from_real(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("Magnitude::parse: cannot parse '" + text + "'");
  }
}

nlohmann::ordered_json Magnitude::to_json() const {
  nlohmann::ordered_json j;
  j["level"] = level_;
  j["mantissa"] = mantissa_;
  if (absorbed_) {
    j["absorbed"] = true;
    j["slack"] = slack_;
  }
  return j;
}

Magnitude Magnitude::from_json(const nlohmann::json& j) {
  return from_tower(j.at("level").get<int>(), j.at("mantissa").get<double>());
}

Magnitude ln(const Magnitude& x) {
  if (x.level_ >= 1) return Magnitude(x.level_ - 1, x.mantissa_, x.slack_, x.absorbed_);
  if (x.mantissa_ < 1.0)
    throw std::domain_error("ln: value below 1 has no nonnegative logarithm (got " +
                            x.to_string() + ")");
  return Magnitude(0, static_cast<double>(logl(x.mantissa_)), x.slack_ / x.mantissa_,
                   x.absorbed_);
}

Magnitude exp(const Magnitude& x) {
  if (x.level_ >= 1 || x.mantissa_ >= 1.0)
    return Magnitude(x.level_ + 1, x.mantissa_, x.slack_, x.absorbed_);
  double m = static_cast<double>(expl(x.mantissa_));
  return Magnitude(0, m, x.slack_ * m, x.absorbed_);
}

Magnitude mul_scalar(const Magnitude& x, double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::domain_error("mul_scalar: scalar must be positive and finite");
  if (k == 1.0) return x;
  if (x.is_zero()) return x;
  if (x.level_ >= kAbsorbLevel) {
    // Saturation: the multiplicative update shifts log(value) by ln k, which
    // moves the stored mantissa by at most |ln k| / tower_deriv(level-1, m).
    double m_lo = std::max(x.mantissa_ - x.slack_, 1.0);
    double inc = static_cast<double>(std::abs(std::log(k)) / tower_deriv(x.level_ - 1, m_lo));
    return Magnitude(x.level_, x.mantissa_, x.slack_ + inc, true);
  }
  if (x.level_ == 0) {
    long double v = static_cast<long double>(k) * x.mantissa_;
    return Magnitude::canonical(v, static_cast<long double>(x.slack_) * k, x.absorbed_);
  }
  // level 1..2: work on u = log(value), which fits comfortably in a double.
  long double u = log_value(x.level_, x.mantissa_);
  long double du_dm = x.level_ == 1 ? 1.0L : u;  // d exp^(L-1)(m) / dm
  long double u2 = u + logl(static_cast<long double>(k));
  Magnitude r = u2 < 0.0L
                    ? Magnitude(0, static_cast<double>(expl(u2)),
                                static_cast<double>(x.slack_ * du_dm * expl(u2)), x.absorbed_)
                    : exp(Magnitude::canonical(u2, x.slack_ * du_dm, x.absorbed_));
  return r;
}

Magnitude add_scalar(const Magnitude& x, double c) {
  if (!std::isfinite(c)) throw std::domain_error("add_scalar: scalar must be finite");
  if (c == 0.0) return x;
  if (x.level_ >= kAbsorbLevel) {
    double m_lo = std::max(x.mantissa_ - x.slack_, 1.0);
    double inc = static_cast<double>(std::abs(c) / tower_deriv(x.level_, m_lo));
    return Magnitude(x.level_, x.mantissa_, x.slack_ + inc, true);
  }
  long double v = x.mantissa_;
  long double dv_dm = 1.0L;
  for (int i = 0; i < x.level_; ++i) {
    v = expl(v);
    dv_dm *= v;
  }
  long double v2 = v + c;
  if (v2 < 0.0L)
    throw std::domain_error("add_scalar: result would be negative");
  return Magnitude::canonical(v2, static_cast<long double>(x.slack_) * dv_dm, x.absorbed_);
}

Magnitude pow_scalar(const Magnitude& x, double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::domain_error("pow_scalar: exponent must be positive and finite");
  if (a == 1.0) return x;
  if (x.is_zero()) return x;
  if (x.level_ == 0 && x.mantissa_ < 1.0) {
    if (!nearly_integer(a))
      throw std::domain_error(
          "pow_scalar: value below 1 requires an integer exponent (ln undefined)");
    long double m = powl(x.mantissa_, std::round(a));
    long double dm = a * powl(x.mantissa_, std::round(a) - 1.0);
    return Magnitude(0, static_cast<double>(m), static_cast<double>(x.slack_ * dm), x.absorbed_);
  }
  return exp(mul_scalar(ln(x), a));
}

Rel cmp(const Magnitude& x, const Magnitude& y, double rel_tol) {
  bool flagged = x.absorbed_ || y.absorbed_;
  auto settle = [&](double gap, double window) {
    if (gap > window) return Rel::greater;
    if (gap < -window) return Rel::less;
    return flagged ? Rel::uncertain : Rel::tie;
  };
  if (x.level_ == y.level_) {
    double scale = std::max({std::abs(x.mantissa_), std::abs(y.mantissa_), 1.0});
    double window = rel_tol * scale + x.slack_ + y.slack_;
    return settle(x.mantissa_ - y.mantissa_, window);
  }
  // Across a one-level gap the lower value's mantissa is compared against
  // e^(mantissa of the upper); near the canonical boundary (m -> e vs m -> 1)
  // this still detects ties. Across two or more levels the order is strict.
  if (y.level_ == x.level_ + 1) {
    double b = std::exp(y.mantissa_);
    double window = rel_tol * b + x.slack_ + y.slack_ * b;
    Rel r = settle(x.mantissa_ - b, window);
    return r == Rel::greater ? Rel::less : r;  // canonical forms: never greater
  }
  if (x.level_ == y.level_ + 1) {
    double b = std::exp(x.mantissa_);
    double window = rel_tol * b + y.slack_ + x.slack_ * b;
    Rel r = settle(b - y.mantissa_, window);
    return r == Rel::less ? Rel::greater : r;
  }
  return x.level_ < y.level_ ? Rel::less : Rel::greater;
}

std::ostream& operator<<(std::ostream& os, const Magnitude& x) { return os << x.to_string(); }

}  // namespace fastesc
