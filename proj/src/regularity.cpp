#include "fastesc/regularity.hpp"

#include <cmath>
#include <stdexcept>

namespace fastesc {

namespace {

// ln(psi(t)), or nullopt when psi(t) < 1 (the peeled comparison is then not
// defined at this grid point).
std::optional<Magnitude> ln_psi(const GrowthModel& model, double t) {
  try {
    return ln(model.eval_psi_at(t));
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

ScanRow uncertain_row(double t, const char* why) {
  ScanRow row;
  row.t = t;
  row.outcome = PointOutcome::uncertain;
  row.side = why;
  return row;
}

nlohmann::ordered_json base_params(const GrowthModel& model) {
  nlohmann::ordered_json j;
  j["model"] = model.spec_string();
  j["rel_tol"] = kMantissaRelTol;
  return j;
}

}  // namespace

nlohmann::ordered_json RegularityParams::to_json() const {
  nlohmann::ordered_json j;
  j["eps"] = eps;
  j["k"] = k;
  j["d"] = d;
  j["m"] = m;
  j["t_lo"] = grid.window.lo;
  j["t_hi"] = grid.window.hi;
  j["grid_count"] = grid.count;
  return j;
}

RegularityReport check_strong_log_regular(const GrowthModel& model, double eps, double k,
                                          const GridSpec& grid) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("check_strong_log_regular: eps must lie in (0,1)");
  if (!(k > 1.0)) throw std::invalid_argument("check_strong_log_regular: k must exceed 1");
  auto params = base_params(model);
  params["eps"] = eps;
  params["k"] = k;
  int mu_form_soft_disagreements = 0;
  RegularityReport rep = scan_condition(
      "strong_log_regular: psi(k t) >= (k psi(t))^(1/eps)", grid, std::move(params),
      Strictness::strict, [&](double t, std::vector<ScanRow>& rows) {
        auto big = ln_psi(model, k * t);
        auto small = ln_psi(model, t);
        if (!big || !small) {
          rows.push_back(uncertain_row(t, "psi below 1 (log undefined)"));
          return;
        }
        ScanRow row;
        row.t = t;
        row.lhs = *big;
        row.rhs = mul_scalar(add_scalar(*small, std::log(k)), 1.0 / eps);
        row.outcome = outcome_of(cmp(row.lhs, row.rhs));
        // Self-test: the mu-form of the same condition,
        // mu_{2,eps}(r^k) >= M(r)^k, must agree verdict-by-verdict.
        PointOutcome mu_form =
            outcome_of(cmp(mul_scalar(*big, eps), add_scalar(*small, std::log(k))));
        bool decisive_clash = (row.outcome == PointOutcome::holds && mu_form == PointOutcome::fails) ||
                              (row.outcome == PointOutcome::fails && mu_form == PointOutcome::holds);
        if (decisive_clash)
          throw std::logic_error(
              "check_strong_log_regular: the direct form and the mu-form disagree decisively "
              "at t = " + std::to_string(t));
        if (mu_form != row.outcome) ++mu_form_soft_disagreements;
        rows.push_back(std::move(row));
      });
  if (mu_form_soft_disagreements > 0)
    rep.notes.push_back("mu-form self-test differed only at tolerance margins on " +
                        std::to_string(mu_form_soft_disagreements) + " point(s)");
  return rep;
}

RegularityReport check_log_regular(const GrowthModel& model, double k, double d,
                                   const GridSpec& grid) {
  if (!(k > 1.0) || !(d > 1.0))
    throw std::invalid_argument("check_log_regular: k and d must exceed 1");
  auto params = base_params(model);
  params["k"] = k;
  params["d"] = d;
  return scan_condition("log_regular: psi(k t) >= k d psi(t)", grid, std::move(params),
                        Strictness::strict, [&](double t, std::vector<ScanRow>& rows) {
                          auto big = ln_psi(model, k * t);
                          auto small = ln_psi(model, t);
                          if (!big || !small) {
                            rows.push_back(uncertain_row(t, "psi below 1 (log undefined)"));
                            return;
                          }
                          ScanRow row;
                          row.t = t;
                          row.lhs = *big;
                          row.rhs = add_scalar(*small, std::log(k * d));
                          row.outcome = outcome_of(cmp(row.lhs, row.rhs));
                          rows.push_back(std::move(row));
                        });
}

RegularityReport check_generalized(const GrowthModel& model, int m, double eps, double k,
                                   const GridSpec& grid) {
  if (m < 1) throw std::invalid_argument("check_generalized: m must be a positive integer");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("check_generalized: eps must lie in (0,1)");
  if (!(k > 1.0)) throw std::invalid_argument("check_generalized: k must exceed 1");
  auto params = base_params(model);
  params["m"] = m;
  params["eps"] = eps;
  params["k"] = k;
  return scan_condition(
      "generalized: mu_{m,eps}(r^k) >= M(r)^k", grid, std::move(params), Strictness::strict,
      [&](double t, std::vector<ScanRow>& rows) {
        auto big = ln_psi(model, k * t);
        auto small = ln_psi(model, t);
        if (!big || !small) {
          rows.push_back(uncertain_row(t, "psi below 1 (log undefined)"));
          return;
        }
        ScanRow row;
        row.t = t;
        try {
          if (m == 1) {
            // eps psi(kt) >= k psi(t), peeled once.
            row.lhs = add_scalar(*big, std::log(eps));
            row.rhs = add_scalar(*small, std::log(k));
          } else {
            // eps log^{m-1} psi(kt) >= log^{m-1}(k psi(t)); `big` and the
            // scaled add already carry the first log.
            Magnitude u = *big;
            for (int j = 0; j < m - 2; ++j) u = ln(u);
            row.lhs = mul_scalar(u, eps);
            Magnitude w = add_scalar(*small, std::log(k));
            for (int j = 0; j < m - 2; ++j) w = ln(w);
            row.rhs = w;
          }
        } catch (const std::domain_error&) {
          throw std::domain_error("check_generalized: log^" + std::to_string(m - 1) +
                                  " undefined at t = " + std::to_string(t) +
                                  " (window too low for m = " + std::to_string(m) + ")");
        }
        row.outcome = outcome_of(cmp(row.lhs, row.rhs));
        rows.push_back(std::move(row));
      });
}

RegularityReport check_doubling(const GrowthModel& model, const DoublingParams& dp,
                                const GridSpec& grid) {
  if (!(dp.A > 1.0) || !(dp.B > 1.0) || !(dp.C > 1.0))
    throw std::invalid_argument("check_doubling: A, B, C must all exceed 1");
  if (!(dp.A <= dp.B)) throw std::invalid_argument("check_doubling: requires A <= B");
  auto params = base_params(model);
  params["A"] = dp.A;
  params["B"] = dp.B;
  params["C"] = dp.C;
  double shift = std::log(dp.C);
  return scan_condition(
      "doubling: A psi(t) <= psi(t + ln C) <= B psi(t)", grid, std::move(params),
      Strictness::strict, [&](double t, std::vector<ScanRow>& rows) {
        auto mid = ln_psi(model, t + shift);
        auto base = ln_psi(model, t);
        if (!mid || !base) {
          rows.push_back(uncertain_row(t, "psi below 1 (log undefined)"));
          return;
        }
        ScanRow lower;
        lower.t = t;
        lower.side = "lower";
        lower.lhs = *mid;
        lower.rhs = add_scalar(*base, std::log(dp.A));
        lower.outcome = outcome_of(cmp(lower.lhs, lower.rhs));
        rows.push_back(std::move(lower));
        ScanRow upper;
        upper.t = t;
        upper.side = "upper";
        upper.lhs = add_scalar(*base, std::log(dp.B));
        upper.rhs = *mid;
        upper.outcome = outcome_of(cmp(upper.lhs, upper.rhs));
        rows.push_back(std::move(upper));
      });
}

double witness_k_from_order(double p, double q, double eps, double margin) {
  if (!(q > 0.0) || !(p > q))
    throw std::domain_error("witness_k_from_order: requires 0 < q < p (strictly)");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("witness_k_from_order: eps must lie in (0,1)");
  return (p / (q * eps)) * (1.0 + margin);
}

namespace {

// Index of the first row from which every later row holds; rows.size() if none.
size_t tail_start(const std::vector<ScanRow>& rows) {
  size_t first = rows.size();
  for (size_t i = rows.size(); i-- > 0;) {
    if (rows[i].outcome == PointOutcome::holds)
      first = i;
    else
      break;
  }
  return first;
}

}  // namespace

std::optional<WitnessK> find_strong_witness_k(const GrowthModel& model, double eps,
                                              const GridSpec& grid) {
  for (int j = 0; j <= 40; ++j) {
    double k = 1.1 * std::pow(2.0, j);
    RegularityReport rep = check_strong_log_regular(model, eps, k, grid);
    size_t i = tail_start(rep.rows);
    if (i + 1 < rep.rows.size()) return WitnessK{k, rep.rows[i].t};
  }
  return std::nullopt;
}

std::optional<double> find_log_witness_d(const GrowthModel& model, double k,
                                         const GridSpec& grid) {
  for (int j = 0; j <= 24; ++j) {
    double d = 1.0 + 0.05 * std::pow(2.0, j);
    if (!(d < k)) break;  // log-regularity on these models needs d < k
    if (check_log_regular(model, k, d, grid).holds()) return d;
  }
  return std::nullopt;
}

RegularityReport verify_theorem21_chain(const GrowthModel& model, double eps, double k,
                                        const Magnitude& r0, int n_max) {
  if (n_max < 0) throw std::invalid_argument("verify_theorem21_chain: n_max must be >= 0");
  if (r0.level() == 0 && r0.mantissa() < std::exp(1.0))
    throw std::domain_error("verify_theorem21_chain: r0 must be at least e");
  double t0 = ln(r0).to_real();
  if (!std::isfinite(t0))
    throw std::domain_error("verify_theorem21_chain: r0 beyond double range");

  // The induction applies the strong inequality at r = M^n(r0), which runs
  // away immediately, so the precondition scan reaches far beyond t0.
  GridSpec hyp{{std::max(std::max(model.t_min(), 1.0), t0 * 0.99), std::max(50.0, 1e6 * t0)},
               192};
  RegularityReport pre = check_strong_log_regular(model, eps, k, hyp);
  if (!pre.holds())
    throw std::domain_error(
        "verify_theorem21_chain: precondition unmet: strong log-regularity " +
        std::string(verdict_name(pre.verdict)) + " on [" + std::to_string(hyp.window.lo) + ", " +
        std::to_string(hyp.window.hi) + "]");

  auto params = base_params(model);
  params["eps"] = eps;
  params["k"] = k;
  params["r0"] = r0.to_json();
  params["n_max"] = n_max;
  params["precondition_window"] = {{"t_lo", hyp.window.lo}, {"t_hi", hyp.window.hi}};

  Magnitude r0k = pow_scalar(r0, k);
  std::vector<Magnitude> mu_seq = iterate(model, StepSpec::mu_step(2, eps), r0k, n_max);
  std::vector<Magnitude> M_seq = iterate(model, StepSpec::M_step(), r0, n_max);

  std::vector<ScanRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    Magnitude Mk = pow_scalar(M_seq[n], k);
    ScanRow first;
    first.t = n;
    first.side = "mu^n(r0^k) >= (M^n(r0))^k";
    first.lhs = mu_seq[n];
    first.rhs = Mk;
    first.outcome = outcome_of(cmp(first.lhs, first.rhs));
    rows.push_back(std::move(first));

    ScanRow second;
    second.t = n;
    second.side = "(M^n(r0))^k >= M^n(r0)";
    second.lhs = Mk;
    second.rhs = M_seq[n];
    // x^k >= x is sign((k-1) ln x): exact for k > 1 and x >= e, regardless of
    // how far the materialised power saturated.
    second.outcome = M_seq[n].level() >= 1 && k > 1.0 ? PointOutcome::holds
                                                      : outcome_of(cmp(second.lhs, second.rhs));
    rows.push_back(std::move(second));

    ScanRow span;
    span.t = n;
    span.side = "mu^n(r0^k) >= M^n(r0)";
    span.lhs = mu_seq[n];
    span.rhs = M_seq[n];
    span.outcome = outcome_of(cmp(span.lhs, span.rhs));
    rows.push_back(std::move(span));
  }
  return assemble_report("theorem21_chain: mu_{2,eps}^n(r0^k) >= (M^n(r0))^k >= M^n(r0)",
                         {t0, t0}, n_max, std::move(params), Strictness::non_strict,
                         std::move(rows));
}

RegularityReport verify_composition_transfer(const GrowthModel& outer, const GrowthModel& inner,
                                             double eps_prime, const GridSpec& grid,
                                             std::optional<double> k_witness) {
  if (!(eps_prime > 0.0 && eps_prime < 1.0))
    throw std::invalid_argument("verify_composition_transfer: eps' must lie in (0,1)");
  double eps = (2.0 / 3.0) * eps_prime;
  GridSpec hyp{{std::max(outer.t_min(), 1.0), std::max(50.0, grid.window.hi)}, 128};

  double k;
  double holds_from;
  if (k_witness) {
    k = *k_witness;
    RegularityReport h = check_strong_log_regular(outer, eps, k, hyp);
    size_t i = tail_start(h.rows);
    if (i + 1 >= h.rows.size())
      throw std::domain_error(
          "verify_composition_transfer: hypothesis unmet: outer model fails the strong check "
          "at (eps=" + std::to_string(eps) + ", k=" + std::to_string(k) + ")");
    holds_from = h.rows[i].t;
  } else {
    auto found = find_strong_witness_k(outer, eps, hyp);
    if (!found)
      throw std::domain_error(
          "verify_composition_transfer: hypothesis unmet: no witness k on the candidate grid "
          "makes the outer model strongly log-regular at eps = " + std::to_string(eps));
    k = found->k;
    holds_from = found->holds_from;
  }

  double k_prime = std::pow(k, 1.5);
  GrowthModel composite = GrowthModel::compose(outer, inner);
  auto params = base_params(composite);
  params["outer"] = outer.spec_string();
  params["inner"] = inner.spec_string();
  params["eps_prime"] = eps_prime;
  params["eps"] = eps;
  params["k"] = k;
  params["k_prime"] = k_prime;
  params["outer_hypothesis_holds_from_t"] = holds_from;

  return scan_condition(
      "composition_transfer: psi_{outer o inner}(k' t) >= (k' psi(t))^(1/eps')", grid,
      std::move(params), Strictness::strict, [&](double t, std::vector<ScanRow>& rows) {
        auto big = ln_psi(composite, k_prime * t);
        auto small = ln_psi(composite, t);
        if (!big || !small) {
          rows.push_back(uncertain_row(t, "psi below 1 (log undefined)"));
          return;
        }
        ScanRow row;
        row.t = t;
        row.lhs = *big;
        row.rhs = mul_scalar(add_scalar(*small, std::log(k_prime)), 1.0 / eps_prime);
        row.outcome = outcome_of(cmp(row.lhs, row.rhs));
        rows.push_back(std::move(row));
      });
}

}  // namespace fastesc
