// Executable constructions of the two example growth functions: the convex
// piecewise-linear phi with zero lower order and order in [1, k_tilde] that
// stays strongly log-regular, and the quadratic-psi model whose mu-iterates
// separate from its M-iterates.

#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "fastesc/growth.hpp"
#include "fastesc/magnitude.hpp"
#include "fastesc/report.hpp"

namespace fastesc {

// Breakpoint construction: t_n = k_tilde^n t0; a_n = e^{t_n} at the
// designated indices N_1 < N_2 < ... and a_n = (k_tilde a_{n-1})^{d_tilde}
// elsewhere, with d_tilde = 1/eps_tilde. Designation is greedy: scanning
// upward, n becomes the next N_m exactly when log a_{n-1} / t_{n-1} < 2^{-m}.
struct PhiConstruction {
  double eps_tilde = 0.5;
  double k_tilde = 5.0;
  double d_tilde = 2.0;
  double t0 = 4.0;
  int n_max = 12;
  std::vector<double> t;        // breakpoints, size n_max + 1
  std::vector<double> ln_a;     // ln a_n (a_0 = 1)
  std::vector<bool> designated; // per n
  std::vector<int> schedule;    // N_1, N_2, ...

  Magnitude a(int n) const;
  PwlCurve curve() const;
  GrowthModel model() const;

  nlohmann::ordered_json to_json() const;
  static PhiConstruction from_json(const nlohmann::json& j);
  // Columns: n, t_n, ln_a_n_level, ln_a_n_mantissa, designated.
  void write_csv(std::ostream& os) const;
};

// Validates the admissibility inequalities and runs the greedy designation.
// Throws std::invalid_argument naming the violated inequality, and
// std::logic_error if a designated index ever fails e^{t_N} >= (k a_{N-1})^d
// (the construction proves this cannot happen when k_tilde > 2 d_tilde).
PhiConstruction build_phi(double eps_tilde, double k_tilde, double t0, int n_max);

// phi at a real t in [t0, t_{n_max}] (piecewise-linear interpolation in
// magnitude arithmetic; flagged on segments beyond double range).
Magnitude phi_eval(const PhiConstruction& phi, double t);

// Gradient monotonicity at every interior breakpoint, plus the sufficient
// bound a_{n+1} >= k^d a_n >= (k+1) a_n.
RegularityReport verify_convexity(const PhiConstruction& phi);

// phi(k t) >= (k phi(t))^{1/eps} via the endpoint reduction
// (k a_n)^{1/eps} <= a_{n+j} (k = k_tilde^j maps breakpoints to breakpoints),
// corroborated by 16 interior samples per segment. Interior samples on
// segments beyond double range are informational only; the verdict rests on
// the endpoint check.
RegularityReport verify_growth_inequality(const PhiConstruction& phi, double eps, double k);

// Extends the construction's regularity from eps_tilde down to eps: with
// d = d_tilde^p and n = floor(p), k = k_tilde^{2n+2} works. Verifies the
// supporting power-sum inequality and the growth inequality at (eps, k).
struct EpsilonExtension {
  double k = 0.0;
  double p = 0.0;
  int n = 0;
  double power_sum = 0.0;       // d~ + d~^2 + ... + d~^{2n+2}
  double power_sum_bound = 0.0; // (2n+2) d~^{n+1}
  RegularityReport report;
  nlohmann::ordered_json to_json() const;
};
EpsilonExtension extend_epsilon(const PhiConstruction& phi, double eps);

// Breakpoint growth ratios ln a_n / t_n (1 at designated indices, below
// 2^{-m} just before the m-th designation).
struct OrderRatio {
  int n;
  double t;
  double ratio;
  bool designated;
};
std::vector<OrderRatio> order_ratios(const PhiConstruction& phi);

// The second example's growth model: psi(t) = t^2 on t >= 1. Verified
// log-regular at (k, d) = (2, 1.5) on construction.
GrowthModel example2_model();

// Envelope exponents and base point for the separation argument. c~ and c
// are placed at thirds of (2 eps, 2); R0 is the first grid point where the
// envelopes hold and mu_{2,eps}(r) > r strictly.
struct SeparationParams {
  double eps = 0.75;
  double c_tilde = 0.0;
  double c = 0.0;
  Magnitude R0;
  nlohmann::ordered_json to_json() const;
};
SeparationParams separation_bounds(double eps,
                                   std::optional<GrowthModel> model = std::nullopt);

// Smallest N such that (2 eps)^{n+m} u0 < 2^n u0 for all n in (N, n_range],
// computed in closed form. Throws if even n = n_range fails.
int separation_onset(double eps, int m, int n_range);

// mu_{2,eps}^{m+n}(R0) < M^n(R0) for n > N: determines N two ways (closed
// form on the exponents, and direct double-log iteration from
// u0 = ln ln R0) and insists they agree.
struct SeparationResult {
  int onset_N = -1;
  RegularityReport report;
};
SeparationResult verify_separation(const SeparationParams& params, int m, int n_range);

}  // namespace fastesc
