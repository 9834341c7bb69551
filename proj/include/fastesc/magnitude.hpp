// Level-index arithmetic for magnitudes of the form exp^level(mantissa).
//
// Iterated maximum-modulus functions outgrow every floating-point format
// after a handful of steps, so all growth quantities in this library live in
// a canonical level-index form: a tower height plus a mantissa in a fixed
// window. Ordering of represented values is then lexicographic on
// (level, mantissa), which is what makes inequality scans cheap.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace fastesc {

// Outcome of a tolerance-aware comparison. `tie` means the values agree
// within tolerance and both operands are exact; `uncertain` means the gap is
// inside the error window of a saturated (absorbed) operation, so no verdict
// may honestly be drawn from the comparison.
enum class Rel { less, tie, greater, uncertain };

const char* rel_name(Rel r);

// Default relative tolerance on mantissas compared at equal level.
inline constexpr double kMantissaRelTol = 1e-9;

// Scalar multiply/add saturate ("absorb" the scalar) at this level and above:
// the update would land below the mantissa resolution that the representation
// can honestly claim. Absorbed results carry a flag plus an explicit error
// bound (`slack`) so that comparisons near the bound report `uncertain`.
inline constexpr int kAbsorbLevel = 3;

// A nonnegative real number v stored canonically as v = exp^level(mantissa):
//   level == 0  =>  mantissa in [0, e)
//   level >= 1  =>  mantissa in [1, e)
// The representation of any nonnegative real is unique, and lexicographic
// order on (level, mantissa) equals numeric order of the represented values.
//
// Values are immutable; all operations are pure functions. Safe for
// unrestricted concurrent use.
class Magnitude {
 public:
  Magnitude() = default;  // zero

  // Canonical form of a finite real v >= 0.
  static Magnitude from_real(double v);

  // Canonical form of e^u for any finite u (u may be negative).
  static Magnitude from_ln(double u);

  // Canonical form of exp^level(x), normalising as needed. x must be finite
  // and, at level 0, nonnegative.
  static Magnitude from_tower(int level, double x);

  // Canonical form of exp^level(x) carrying an explicit uncertainty bound on
  // x, for computations that can only bracket their result. The result is
  // flagged absorbed so comparisons near the bound report `uncertain`.
  static Magnitude approx_tower(int level, double x, double x_slack);

  int level() const { return level_; }
  double mantissa() const { return mantissa_; }

  // Upper bound on |true mantissa - stored mantissa| accumulated through
  // saturated operations. Zero for exactly computed values.
  double slack() const { return slack_; }
  bool absorbed() const { return absorbed_; }

  // Represented value as a double; +inf if it exceeds double range.
  double to_real() const;

  bool is_zero() const { return level_ == 0 && mantissa_ == 0.0; }

  // Rendering "E^level(mantissa)", e.g. "E^3(1.14315)".
  std::string to_string() const;

  // Parses either the "E^level(mantissa)" form or a plain nonnegative real.
  static Magnitude parse(const std::string& text);

  nlohmann::ordered_json to_json() const;
  static Magnitude from_json(const nlohmann::json& j);

  friend Magnitude ln(const Magnitude& x);
  friend Magnitude exp(const Magnitude& x);
  friend Magnitude mul_scalar(const Magnitude& x, double k);
  friend Magnitude add_scalar(const Magnitude& x, double c);
  friend Magnitude pow_scalar(const Magnitude& x, double a);
  friend Rel cmp(const Magnitude& x, const Magnitude& y, double rel_tol);

 private:
  Magnitude(int level, double mantissa, double slack, bool absorbed)
      : level_(level), mantissa_(mantissa), slack_(slack), absorbed_(absorbed) {}

  static Magnitude canonical(long double value, long double value_slack, bool absorbed);

  int level_ = 0;
  double mantissa_ = 0.0;
  double slack_ = 0.0;
  bool absorbed_ = false;
};

// Natural logarithm. Requires value >= 1: magnitudes are nonnegative, so the
// logarithm of a value below 1 is not representable. Exact level decrement
// for level >= 1.
Magnitude ln(const Magnitude& x);

// e^value. Exact level increment when mantissa is in [1, e).
Magnitude exp(const Magnitude& x);

// k * value for k > 0. Exact through level 2; at level >= kAbsorbLevel the
// scalar is absorbed (result unchanged, flagged, slack widened by an upper
// bound on the discarded mantissa shift).
Magnitude mul_scalar(const Magnitude& x, double k);

// value + c, for value + c >= 0. Same saturation rule as mul_scalar.
Magnitude add_scalar(const Magnitude& x, double c);

// value^a for a > 0. Requires value >= 1 unless a is a positive integer.
Magnitude pow_scalar(const Magnitude& x, double a);

// Tolerance-aware total-order comparison; see Rel. Ties compare mantissas at
// relative `rel_tol` (after mapping across a level-1 gap); the tie window is
// widened by the operands' slack, and a tie involving an absorbed operand is
// reported `uncertain`.
Rel cmp(const Magnitude& x, const Magnitude& y, double rel_tol = kMantissaRelTol);

inline bool definitely_less(const Magnitude& x, const Magnitude& y,
                            double rel_tol = kMantissaRelTol) {
  return cmp(x, y, rel_tol) == Rel::less;
}
inline bool definitely_greater(const Magnitude& x, const Magnitude& y,
                               double rel_tol = kMantissaRelTol) {
  return cmp(x, y, rel_tol) == Rel::greater;
}

std::ostream& operator<<(std::ostream& os, const Magnitude& x);

}  // namespace fastesc
