// Numerical checkers for the growth-regularity conditions and executable
// versions of the theorem proof chains built on them.
//
// Every check compares log-peeled forms: an inequality A >= B between
// positive quantities is decided as ln A >= ln B, with scalar factors turned
// into scalar addends. That keeps both sides of desk-scale scans inside
// exact level-index arithmetic instead of saturating at tower level 3.

#pragma once

#include <optional>

#include "fastesc/growth.hpp"
#include "fastesc/magnitude.hpp"
#include "fastesc/report.hpp"

namespace fastesc {

// Parameter bundle for the CLI and report echoes.
struct RegularityParams {
  double eps = 0.5;
  double k = 2.0;
  double d = 1.5;
  int m = 2;
  GridSpec grid;
  nlohmann::ordered_json to_json() const;
};

struct DoublingParams {
  double A = 2.0;
  double B = 3.0;
  double C = 2.0;  // radius factor: compares psi(t + ln C) against psi(t)
};

// Strong log-regularity at (eps, k): psi(k t) >= (k psi(t))^(1/eps) on the
// grid. Also evaluates the equivalent mu-form (eps ln psi(kt) >= ln(k psi(t)))
// pointwise as a self-test; a decisive disagreement is an internal error.
RegularityReport check_strong_log_regular(const GrowthModel& model, double eps, double k,
                                          const GridSpec& grid);

// Log-regularity at (k, d): psi(k t) >= k d psi(t) on the grid.
RegularityReport check_log_regular(const GrowthModel& model, double k, double d,
                                   const GridSpec& grid);

// Generalised condition at level m: mu_{m,eps}(r^k) >= M(r)^k, i.e.
// eps log^{m-1} psi(kt) >= log^{m-1}(k psi(t)). Throws std::domain_error when
// the iterated log is undefined somewhere on the window.
RegularityReport check_generalized(const GrowthModel& model, int m, double eps, double k,
                                   const GridSpec& grid);

// Doubling-type regularity: A psi(t) <= psi(t + ln C) <= B psi(t).
RegularityReport check_doubling(const GrowthModel& model, const DoublingParams& dp,
                                const GridSpec& grid);

// Witness k for strong log-regularity of a function squeezed between
// e^{r^q} and e^{r^p}: any k > p/(q eps) works; returns that bound widened
// by `margin`.
double witness_k_from_order(double p, double q, double eps, double margin = 0.1);

// First k on the geometric candidate grid {1.1 * 2^j : j = 0..40} for which
// the strong check holds from some grid point through the end of `window`.
struct WitnessK {
  double k = 0.0;
  double holds_from = 0.0;  // first grid t of the verified tail
};
std::optional<WitnessK> find_strong_witness_k(const GrowthModel& model, double eps,
                                              const GridSpec& grid);

// First d > 1 on a geometric candidate grid with check_log_regular holding on
// the whole window.
std::optional<double> find_log_witness_d(const GrowthModel& model, double k,
                                         const GridSpec& grid);

// Iterated consequence of strong log-regularity:
// mu_{2,eps}^n(r0^k) >= (M^n(r0))^k >= M^n(r0) for n = 1..n_max, verified on
// materialised magnitude iterates. Steps whose comparison falls inside
// absorbed-arithmetic slack are inconclusive, never holds/fails. Throws
// std::domain_error if the model fails the strong check near r0 first.
RegularityReport verify_theorem21_chain(const GrowthModel& model, double eps, double k,
                                        const Magnitude& r0, int n_max);

// Transfer of strong log-regularity through composition: with
// eps = (2/3) eps', a witness k for `outer` yields k' = k^(3/2) for
// outer o inner. Verifies the composite strong check at (eps', k') on the
// grid. If `k_witness` is absent a grid search supplies it. Throws
// std::domain_error ("hypothesis unmet") when no witness validates.
RegularityReport verify_composition_transfer(const GrowthModel& outer, const GrowthModel& inner,
                                             double eps_prime, const GridSpec& grid,
                                             std::optional<double> k_witness = std::nullopt);

}  // namespace fastesc
