#include "fastesc/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fastesc {

namespace {
constexpr double kNoMin = -std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// PwlCurve

Magnitude PwlCurve::eval(double at) const {
  if (t.size() < 2 || t.size() != ln_a.size())
    throw std::logic_error("PwlCurve: malformed breakpoint table");
  if (at < t.front() || at > t.back())
    throw std::domain_error("PwlCurve: t outside [" + std::to_string(t.front()) + ", " +
                            std::to_string(t.back()) + "]");
  auto it = std::lower_bound(t.begin(), t.end(), at);
  size_t n = it == t.end() ? t.size() - 1 : static_cast<size_t>(it - t.begin());
  if (n < t.size() && t[n] == at) return exp(Magnitude::from_real(ln_a[n]));
  --n;

  double theta = (at - t[n]) / (t[n + 1] - t[n]);
  // Exact path: interpolate the values themselves while they fit a double.
  if (ln_a[n + 1] < 700.0) {
    double v = std::exp(ln_a[n]) + theta * (std::exp(ln_a[n + 1]) - std::exp(ln_a[n]));
    return Magnitude::from_real(v);
  }
  // Tall segment: interpolate ln a instead. The true ln phi(at) lies within
  // [L, L + g] of the interpolated L = ln a_n + theta * delta, where g is the
  // linear-vs-geometric gap. Return the midpoint with slack g/2, flagged, so
  // that verdicts leaning on such points come out inconclusive.
  double delta = ln_a[n + 1] - ln_a[n];
  double L = ln_a[n] + theta * delta;
  double tail = delta > 40.0 ? 0.0 : (1.0 - theta) * std::exp(-delta);
  double g = std::max((1.0 - theta) * delta + std::log(theta + tail), 0.0);
  return exp(Magnitude::approx_tower(0, L + 0.5 * g, 0.5 * g));
}

// ---------------------------------------------------------------------------
// GrowthModel factories

GrowthModel GrowthModel::exp_order(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("exp_order: rho must be positive");
  GrowthModel m(Kind::exp_order, rho);
  m.t_min_ = kNoMin;
  return m;
}

GrowthModel GrowthModel::power(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("power: exponent must exceed 1");
  GrowthModel m(Kind::power, a);
  m.t_min_ = 1.0;
  return m;
}

GrowthModel GrowthModel::piecewise_linear(PwlCurve curve) {
  if (curve.t.size() < 2 || curve.t.size() != curve.ln_a.size())
    throw std::invalid_argument("piecewise_linear: need matching t / ln_a tables, length >= 2");
  if (!std::is_sorted(curve.t.begin(), curve.t.end()))
    throw std::invalid_argument("piecewise_linear: breakpoints must increase");
  GrowthModel m(Kind::piecewise, 0.0);
  m.t_min_ = curve.t_min();
  m.curve_ = std::make_shared<const PwlCurve>(std::move(curve));
  return m;
}

GrowthModel GrowthModel::compose(GrowthModel outer, GrowthModel inner) {
  GrowthModel m(Kind::composite, 0.0);
  double lo = std::max(inner.t_min_, -700.0);
  if (std::isfinite(outer.t_min_) && outer.t_min_ > 0.0) {
    auto reaches = [&](double t) { return inner.eval_psi_at(t).to_real() >= outer.t_min_; };
    double cap = inner.t_max().value_or(1e12);
    if (!reaches(lo)) {
      double hi = lo;
      double step = std::max(1.0, std::abs(lo));
      while (hi <= cap && !reaches(hi)) {
        hi += step;
        step *= 2.0;
      }
      if (hi > cap)
        throw std::domain_error(
            "compose: inner model never reaches the outer threshold; required t_min exceeds " +
            std::to_string(cap));
      for (int i = 0; i < 80; ++i) {
        double mid = lo + (hi - lo) / 2.0;
        (reaches(mid) ? hi : lo) = mid;
      }
      // Nudge past rounding so evaluation at the stored threshold is valid.
      while (!reaches(hi)) hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
      lo = hi;
    }
  }
  m.t_min_ = std::max(lo, inner.t_min_);
  m.outer_ = std::make_shared<const GrowthModel>(std::move(outer));
  m.inner_ = std::make_shared<const GrowthModel>(std::move(inner));
  return m;
}

GrowthModel GrowthModel::perturbed(GrowthModel base, double delta_amp) {
  GrowthModel m(Kind::perturbed, delta_amp);
  m.t_min_ = std::max(base.t_min_, 1.0);
  m.base_ = std::make_shared<const GrowthModel>(std::move(base));
  return m;
}

std::optional<double> GrowthModel::t_max() const {
  switch (kind_) {
    case Kind::piecewise: return curve_->t_max();
    case Kind::composite: return inner_->t_max();
    case Kind::perturbed: return base_->t_max();
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Evaluation

Magnitude GrowthModel::eval_psi_at(double t) const {
  if (!std::isfinite(t)) throw std::domain_error("eval_psi: non-finite t");
  if (t < t_min_)
    throw std::domain_error("eval_psi: t below the model threshold t_min = " +
                            std::to_string(t_min_));
  switch (kind_) {
    case Kind::exp_order:
      return Magnitude::from_ln(param_ * t);
    case Kind::power:
      return Magnitude::from_ln(param_ * std::log(t));
    case Kind::piecewise:
      return curve_->eval(t);
    case Kind::composite:
      return outer_->eval_psi(inner_->eval_psi_at(t));
    case Kind::perturbed: {
      Magnitude base = base_->eval_psi_at(t);
      double factor = 1.0 + param_ / t;
      if (!(factor > 0.0)) throw std::domain_error("perturbed: 1 + delta(t) must stay positive");
      return factor == 1.0 ? base : mul_scalar(base, factor);
    }
  }
  throw std::logic_error("eval_psi: unknown kind");
}

Magnitude GrowthModel::eval_psi(const Magnitude& t) const {
  // The analytic variants stay in magnitude arithmetic: that keeps towers
  // exact (e.g. psi(exp^k(1)) at rho = 1) and propagates slack honestly.
  switch (kind_) {
    case Kind::exp_order:
      return exp(mul_scalar(t, param_));
    case Kind::power:
      if (t.level() == 0 && t.mantissa() < t_min_)
        throw std::domain_error("eval_psi: t below the model threshold t_min = " +
                                std::to_string(t_min_));
      return pow_scalar(t, param_);
    case Kind::composite:
      return outer_->eval_psi(inner_->eval_psi(t));
    case Kind::piecewise:
    case Kind::perturbed: {
      double td = t.to_real();
      if (std::isfinite(td)) return eval_psi_at(td);
      if (kind_ == Kind::perturbed) return base_->eval_psi(t);  // delta below resolution
      throw std::domain_error("eval_psi: t beyond the last breakpoint");
    }
  }
  throw std::logic_error("eval_psi: unknown kind");
}

Magnitude GrowthModel::apply_M(const Magnitude& r) const {
  if (r.is_zero()) throw std::domain_error("apply_M: r must be positive");
  if (r.level() == 0 && r.mantissa() < 1.0)
    return exp(eval_psi_at(std::log(r.mantissa())));
  return exp(eval_psi(ln(r)));
}

Magnitude GrowthModel::apply_mu(int m, double eps, const Magnitude& r) const {
  if (m < 1) throw std::domain_error("apply_mu: m must be a positive integer");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("apply_mu: eps must lie in (0,1)");
  if (r.is_zero()) throw std::domain_error("apply_mu: r must be positive");
  Magnitude x = (r.level() == 0 && r.mantissa() < 1.0) ? eval_psi_at(std::log(r.mantissa()))
                                                       : eval_psi(ln(r));
  for (int j = 0; j < m - 1; ++j) {
    try {
      x = ln(x);
    } catch (const std::domain_error&) {
      throw std::domain_error("apply_mu: log^" + std::to_string(m - 1) +
                              " of psi undefined at this r (value too small)");
    }
  }
  x = mul_scalar(x, eps);
  for (int j = 0; j < m; ++j) x = exp(x);
  return x;
}

// ---------------------------------------------------------------------------
// Iteration and thresholds

std::string StepSpec::name() const {
  if (type == Type::M) return "M";
  char buf[48];
  std::snprintf(buf, sizeof buf, "mu(m=%d,eps=%g)", m, eps);
  return buf;
}

Magnitude apply_step(const GrowthModel& model, const StepSpec& step, const Magnitude& r) {
  return step.type == StepSpec::Type::M ? model.apply_M(r) : model.apply_mu(step.m, step.eps, r);
}

std::vector<Magnitude> iterate(const GrowthModel& model, const StepSpec& step,
                               const Magnitude& start, int n) {
  if (n < 0) throw std::domain_error("iterate: n must be nonnegative");
  std::vector<Magnitude> out;
  out.reserve(n + 1);
  out.push_back(start);
  for (int j = 1; j <= n; ++j) {
    Magnitude next = apply_step(model, step, out.back());
    Rel r = cmp(next, out.back());
    // `uncertain` only means the increase is smaller than accumulated
    // absorption slack; the step map is still strictly increasing there.
    if (r == Rel::less || r == Rel::tie)
      throw std::domain_error("iterate: " + step.name() + " below fixed threshold at index " +
                              std::to_string(j) + " (step(x) <= x; start beneath find_R)");
    out.push_back(std::move(next));
  }
  return out;
}

FindRResult find_R(const GrowthModel& model, const StepSpec& step,
                   std::span<const double> r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("find_R: empty grid");
  FindRResult res;
  std::vector<bool> ok(r_grid.size(), false);
  bool had_error = false;
  for (size_t i = 0; i < r_grid.size(); ++i) {
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw std::invalid_argument("find_R: grid must strictly increase");
    try {
      Magnitude r = Magnitude::from_real(r_grid[i]);
      ok[i] = cmp(apply_step(model, step, r), r) == Rel::greater;
    } catch (const std::domain_error&) {
      ok[i] = false;
      had_error = true;
    }
  }
  size_t first_good = r_grid.size();
  for (size_t i = r_grid.size(); i-- > 0;) {
    if (ok[i])
      first_good = i;
    else
      break;
  }
  if (first_good < r_grid.size()) {
    res.R = Magnitude::from_real(r_grid[first_good]);
    if (first_good > 0)
      res.note = "threshold verified on the grid tail from r = " +
                 std::to_string(r_grid[first_good]);
  } else {
    res.largest_violation = r_grid.back();
    res.note = std::string("threshold not found: step(r) <= r at the largest grid point") +
               (had_error ? " (some points were outside the step's domain)" : "");
  }
  return res;
}

nlohmann::ordered_json FindRResult::to_json() const {
  nlohmann::ordered_json j;
  j["found"] = R.has_value();
  if (R) j["R"] = R->to_json();
  if (largest_violation) j["largest_violation_r"] = *largest_violation;
  if (!note.empty()) j["note"] = note;
  return j;
}

// ---------------------------------------------------------------------------
// Order estimation

OrderEstimate estimate_order(const GrowthModel& model, double t_lo, double t_hi, int grid_count) {
  if (!(t_lo >= std::max(model.t_min(), 1.0)))
    throw std::domain_error("estimate_order: t_lo must be >= max(t_min, 1)");
  if (grid_count < 2) throw std::invalid_argument("estimate_order: need at least 2 grid points");
  std::vector<double> grid = geometric_grid({t_lo, t_hi}, grid_count);
  std::vector<double> ratio(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    Magnitude lp = ln(model.eval_psi_at(grid[i]));  // throws if psi < 1
    double v = lp.to_real();
    if (!std::isfinite(v))
      throw std::domain_error("estimate_order: log psi exceeds double range on this window");
    ratio[i] = v / grid[i];
  }
  OrderEstimate est;
  est.window = {t_lo, t_hi};
  est.grid_count = grid_count;
  est.rho_lo = *std::min_element(ratio.begin(), ratio.end());
  est.rho_hi = *std::max_element(ratio.begin(), ratio.end());
  // liminf-oriented scan: extremes over locally minimal ratios only.
  double tiny = 1e-12 * std::max(std::abs(est.rho_hi), 1.0);
  double lam_lo = std::numeric_limits<double>::infinity();
  double lam_hi = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < ratio.size(); ++i) {
    bool left_ok = i == 0 || ratio[i] <= ratio[i - 1] + tiny;
    bool right_ok = i + 1 == ratio.size() || ratio[i] <= ratio[i + 1] + tiny;
    if (left_ok && right_ok) {
      lam_lo = std::min(lam_lo, ratio[i]);
      lam_hi = std::max(lam_hi, ratio[i]);
    }
  }
  est.lambda_lo = lam_lo;
  est.lambda_hi = lam_hi;
  return est;
}

nlohmann::ordered_json OrderEstimate::to_json() const {
  nlohmann::ordered_json j;
  j["rho_window"] = {rho_lo, rho_hi};
  j["lambda_window"] = {lambda_lo, lambda_hi};
  j["window"] = {{"t_lo", window.lo}, {"t_hi", window.hi}};
  j["grid_count"] = grid_count;
  if (p) j["p"] = *p;
  if (q) j["q"] = *q;
  j["caveat"] = "finite-window estimate, not a limit";
  return j;
}

// ---------------------------------------------------------------------------
// Hadamard-style check

RegularityReport check_hadamard(const GrowthModel& model, double c, const GridSpec& grid) {
  if (!(c >= 1.0)) throw std::invalid_argument("check_hadamard: c must be >= 1");
  nlohmann::ordered_json params;
  params["model"] = model.spec_string();
  params["c"] = c;
  params["rel_tol"] = kMantissaRelTol;
  return scan_condition(
      "hadamard: psi(c t) >= c psi(t)", grid, std::move(params), Strictness::strict,
      [&](double t, std::vector<ScanRow>& rows) {
        ScanRow row;
        row.t = t;
        try {
          row.lhs = ln(model.eval_psi_at(c * t));
          row.rhs = add_scalar(ln(model.eval_psi_at(t)), std::log(c));
          row.outcome = outcome_of(cmp(row.lhs, row.rhs));
        } catch (const std::domain_error&) {
          row.outcome = PointOutcome::uncertain;
          row.side = "psi below 1 (log undefined)";
        }
        rows.push_back(std::move(row));
      });
}

// ---------------------------------------------------------------------------
// Description

std::string GrowthModel::spec_string() const {
  char buf[64];
  switch (kind_) {
    case Kind::exp_order:
      std::snprintf(buf, sizeof buf, "exp(rho=%g)", param_);
      return buf;
    case Kind::power:
      std::snprintf(buf, sizeof buf, "power(a=%g)", param_);
      return buf;
    case Kind::piecewise:
      return pwl_origin_.empty() ? "pwl(inline)" : "pwl(file=" + pwl_origin_ + ")";
    case Kind::composite:
      return "compose(" + outer_->spec_string() + "," + inner_->spec_string() + ")";
    case Kind::perturbed:
      std::snprintf(buf, sizeof buf, ",delta=%g)", param_);
      return "perturbed(" + base_->spec_string() + buf;
  }
  return "?";
}

nlohmann::ordered_json GrowthModel::to_json() const {
  nlohmann::ordered_json j;
  j["spec"] = spec_string();
  j["t_min"] = std::isfinite(t_min_) ? nlohmann::ordered_json(t_min_)
                                     : nlohmann::ordered_json(nullptr);
  if (auto tm = t_max()) j["t_max"] = *tm;
  if (kind_ == Kind::piecewise) {
    j["breakpoints"] = curve_->t.size();
  }
  return j;
}

}  // namespace fastesc
