// Growth models psi(t) = log M(e^t): the log-log-coordinate form of an
// entire function's maximum modulus, plus the mu_{m,eps} comparison family,
// iteration, order estimation and composition.
//
// Working in t = log r coordinates turns r^k into k*t and M(r)^k into
// k*psi(t), which removes one exponential level from every inequality and is
// what keeps desk-scale scans inside exact arithmetic.

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastesc/magnitude.hpp"
#include "fastesc/report.hpp"

namespace fastesc {

// Piecewise-linear growth data: breakpoints t[n] with phi(t[n]) = e^{ln_a[n]}.
// Between breakpoints whose values fit in a double, evaluation interpolates
// the values themselves; on taller segments it interpolates ln_a and returns
// a flagged magnitude whose slack bounds the linear-vs-geometric gap.
struct PwlCurve {
  std::vector<double> t;
  std::vector<double> ln_a;

  double t_min() const { return t.front(); }
  double t_max() const { return t.back(); }
  Magnitude eval(double at) const;
};

// Immutable growth model. Copies are cheap (shared nodes).
class GrowthModel {
 public:
  enum class Kind { exp_order, power, piecewise, composite, perturbed };

  // psi(t) = e^{rho t}; models M(r) = e^{r^rho}, order rho.
  static GrowthModel exp_order(double rho);
  // psi(t) = t^a for a > 1; models M(r) = exp((log r)^a), order zero.
  static GrowthModel power(double a);
  static GrowthModel piecewise_linear(PwlCurve curve);
  // psi = outer o inner. The composite's validity threshold is raised until
  // the inner model's values reach the outer's threshold.
  static GrowthModel compose(GrowthModel outer, GrowthModel inner);
  // psi = base * (1 + delta_amp / t), the synthetic decaying error term.
  static GrowthModel perturbed(GrowthModel base, double delta_amp);

  Kind kind() const { return kind_; }
  double t_min() const { return t_min_; }
  std::optional<double> t_max() const;  // only piecewise models are bounded

  // psi at a real t (most scans run on double grids).
  Magnitude eval_psi_at(double t) const;
  // psi at a magnitude t, for arguments beyond double range.
  Magnitude eval_psi(const Magnitude& t) const;
  // M(r) = exp(psi(ln r)).
  Magnitude apply_M(const Magnitude& r) const;
  // mu_{m,eps}(r) = exp^m(eps * log^{m-1} psi(ln r)). m=1 is M(r)^eps,
  // m=2 is exp((log M(r))^eps).
  Magnitude apply_mu(int m, double eps, const Magnitude& r) const;

  // Round-trippable description in the model mini-language, e.g.
  // "compose(exp(rho=1),power(a=2))".
  std::string spec_string() const;
  nlohmann::ordered_json to_json() const;

  // Parses the mini-language: exp(rho=), power(a=), compose(outer,inner),
  // perturbed(base,delta=), pwl(file=).
  static GrowthModel parse(const std::string& text);

 private:
  GrowthModel(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_ = 0.0;  // rho, a, or delta amplitude
  double t_min_ = 0.0;
  std::shared_ptr<const GrowthModel> outer_, inner_, base_;
  std::shared_ptr<const PwlCurve> curve_;
  std::string pwl_origin_;  // file the curve came from, for echoing
  friend GrowthModel parse_model_expr(const std::string&, size_t&);
};

// One iteration step: either r -> M(r) or r -> mu_{m,eps}(r).
struct StepSpec {
  enum class Type { M, mu };
  Type type = Type::M;
  int m = 2;
  double eps = 0.75;

  static StepSpec M_step() { return {Type::M, 0, 0.0}; }
  static StepSpec mu_step(int m, double eps) { return {Type::mu, m, eps}; }
  std::string name() const;
};

Magnitude apply_step(const GrowthModel& model, const StepSpec& step, const Magnitude& r);

// x_0 = start, x_{j+1} = step(x_j); length n+1. Throws std::domain_error
// naming the index if the sequence ever fails to strictly increase.
std::vector<Magnitude> iterate(const GrowthModel& model, const StepSpec& step,
                               const Magnitude& start, int n);

// Least grid point R such that step(r) > r holds at every grid point >= R.
struct FindRResult {
  std::optional<Magnitude> R;
  std::optional<double> largest_violation;  // grid point, when no R exists
  std::string note;
  nlohmann::ordered_json to_json() const;
};
FindRResult find_R(const GrowthModel& model, const StepSpec& step,
                   std::span<const double> r_grid);

// Window estimates of order/lower order: extrema of log(psi(t))/t over the
// scan grid (the liminf side additionally restricted to local minima).
// These are finite-window figures, not limits; the window is part of the
// result.
struct OrderEstimate {
  double rho_lo = 0.0, rho_hi = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  Window window;
  int grid_count = 0;
  std::optional<double> p, q;  // caller-supplied envelope exponents, echoed
  nlohmann::ordered_json to_json() const;
};
OrderEstimate estimate_order(const GrowthModel& model, double t_lo, double t_hi, int grid_count);

// Hadamard-style convexity consequence: psi(c t) >= c psi(t) on the grid,
// for c >= 1 (c = 1 degenerates to equality and reports ties).
RegularityReport check_hadamard(const GrowthModel& model, double c, const GridSpec& grid);

}  // namespace fastesc
