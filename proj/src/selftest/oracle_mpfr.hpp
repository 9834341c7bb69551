// High-precision reference for the level-index kernel. 256-bit MPFR
// arithmetic (~77 decimal digits), used only by tests and the selftest
// harness; the runtime library never touches it.

#pragma once

#include <string>

namespace fastesc::oracle {

// Canonical level-index form computed in high precision.
struct RefMagnitude {
  int level = 0;
  double mantissa = 0.0;
};

// Opaque high-precision nonnegative value.
class RefValue {
 public:
  explicit RefValue(double v);
  static RefValue tower(int level, double mantissa);  // exp^level(mantissa)
  RefValue(const RefValue&);
  RefValue& operator=(const RefValue&);
  ~RefValue();

  RefValue ln() const;
  RefValue exp() const;
  RefValue mul(double k) const;
  RefValue add(double c) const;
  RefValue pow(double a) const;

  // -1 / 0 / +1 against another reference value.
  int compare(const RefValue& other) const;

  // Peel logs until the residue drops below e.
  RefMagnitude canonical() const;

  double to_double() const;

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace fastesc::oracle
