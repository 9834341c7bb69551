#include "oracle_mpfr.hpp"

#include <mpfr.h>

#include <stdexcept>

namespace fastesc::oracle {

namespace {
constexpr mpfr_prec_t kPrec = 256;
}

struct RefValue::Impl {
  mpfr_t v;
  Impl() { mpfr_init2(v, kPrec); }
  ~Impl() { mpfr_clear(v); }
};

RefValue::RefValue(double v) : impl_(new Impl) {
  if (v < 0.0) throw std::domain_error("oracle: negative value");
  mpfr_set_d(impl_->v, v, MPFR_RNDN);
}

RefValue RefValue::tower(int level, double mantissa) {
  RefValue r(mantissa);
  for (int i = 0; i < level; ++i) mpfr_exp(r.impl_->v, r.impl_->v, MPFR_RNDN);
  return r;
}

RefValue::RefValue(const RefValue& o) : impl_(new Impl) {
  mpfr_set(impl_->v, o.impl_->v, MPFR_RNDN);
}

RefValue& RefValue::operator=(const RefValue& o) {
  if (this != &o) mpfr_set(impl_->v, o.impl_->v, MPFR_RNDN);
  return *this;
}

RefValue::~RefValue() { delete impl_; }

RefValue RefValue::ln() const {
  RefValue r(*this);
  mpfr_log(r.impl_->v, r.impl_->v, MPFR_RNDN);
  return r;
}

RefValue RefValue::exp() const {
  RefValue r(*this);
  mpfr_exp(r.impl_->v, r.impl_->v, MPFR_RNDN);
  return r;
}

RefValue RefValue::mul(double k) const {
  RefValue r(*this);
  mpfr_mul_d(r.impl_->v, r.impl_->v, k, MPFR_RNDN);
  return r;
}

RefValue RefValue::add(double c) const {
  RefValue r(*this);
  mpfr_add_d(r.impl_->v, r.impl_->v, c, MPFR_RNDN);
  return r;
}

RefValue RefValue::pow(double a) const {
  RefValue r(*this);
  mpfr_t e;
  mpfr_init2(e, kPrec);
  mpfr_set_d(e, a, MPFR_RNDN);
  mpfr_pow(r.impl_->v, r.impl_->v, e, MPFR_RNDN);
  mpfr_clear(e);
  return r;
}

int RefValue::compare(const RefValue& other) const {
  return mpfr_cmp(impl_->v, other.impl_->v);
}

RefMagnitude RefValue::canonical() const {
  mpfr_t x, e;
  mpfr_init2(x, kPrec);
  mpfr_init2(e, kPrec);
  mpfr_set(x, impl_->v, MPFR_RNDN);
  mpfr_set_ui(e, 1, MPFR_RNDN);
  mpfr_exp(e, e, MPFR_RNDN);
  RefMagnitude out;
  while (mpfr_cmp(x, e) >= 0) {
    mpfr_log(x, x, MPFR_RNDN);
    ++out.level;
  }
  out.mantissa = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  mpfr_clear(e);
  return out;
}

double RefValue::to_double() const { return mpfr_get_d(impl_->v, MPFR_RNDN); }

}  // namespace fastesc::oracle
