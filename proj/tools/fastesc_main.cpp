// fastesc: experiment CLI over the growth/regularity/construction/classify
// library. Every run emits a JSON report (stdout or --json PATH) echoing its
// configuration; scans can additionally dump row-level CSV. Exit codes:
// 0 holds/success, 1 fails (witness in the report), 2 inconclusive,
// 3 usage or domain error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastesc/classify.hpp"
#include "fastesc/construction.hpp"
#include "fastesc/growth.hpp"
#include "fastesc/magnitude.hpp"
#include "fastesc/regularity.hpp"
#include "fastesc/selftest.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct Output {
  std::string json_path;
  std::string csv_path;
  bool allow_inconclusive = false;
};

std::string g_invocation;  // verbatim command line, echoed into every report

std::string timestamp_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

nlohmann::ordered_json report_shell(const std::string& command) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["version"] = kVersion;
  j["command"] = command;
  j["invocation"] = g_invocation;
  return j;
}

void emit(const Output& out, nlohmann::ordered_json report) {
  report["timestamp"] = timestamp_now();
  if (out.json_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream f(out.json_path);
    f << report.dump(2) << "\n";
    std::cout << "report written to " << out.json_path << "\n";
  }
}

void emit_csv(const Output& out, const fastesc::RegularityReport& rep) {
  if (out.csv_path.empty()) return;
  std::ofstream f(out.csv_path);
  rep.write_csv(f);
}

int verdict_exit(fastesc::Verdict v, const Output& out) {
  switch (v) {
    case fastesc::Verdict::holds_on_window: return 0;
    case fastesc::Verdict::fails: return 1;
    case fastesc::Verdict::inconclusive: return out.allow_inconclusive ? 0 : 2;
  }
  return 3;
}

int finish_scan(const Output& out, const std::string& command,
                const fastesc::RegularityReport& rep,
                nlohmann::ordered_json extra = {}) {
  nlohmann::ordered_json j = report_shell(command);
  j["report"] = rep.to_json();
  if (!extra.empty()) j["extra"] = extra;
  j["caveats"] = {"verdict speaks only for the scanned window"};
  emit(out, std::move(j));
  emit_csv(out, rep);
  return verdict_exit(rep.verdict, out);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) {
    if (i) g_invocation += ' ';
    g_invocation += argv[i];
  }
  CLI::App app{"growth regularity and escape-speed experiments"};
  app.set_config("--config");
  app.require_subcommand(1);
  app.fallthrough();  // global --json/--csv/... may follow the subcommand

  Output out;
  app.add_option("--json", out.json_path, "write the JSON report to this path");
  app.add_option("--csv", out.csv_path, "write row-level CSV to this path");
  app.add_flag("--allow-inconclusive", out.allow_inconclusive,
               "exit 0 instead of 2 on inconclusive verdicts");

  std::string model_spec = "exp(rho=1)";
  double eps = 0.5, k = 3.0, d = 1.5, eps_prime = 0.75;
  double t_lo = 1.0, t_hi = 50.0;
  int grid_count = 256, m_level = 2, n_max = 4;
  std::uint64_t seed = 12345;

  // ---- growth ----
  auto* growth = app.add_subcommand("growth", "evaluate growth models");
  auto* g_eval = growth->add_subcommand("eval", "evaluate psi / M / mu at a point");
  std::string eval_t, eval_r;
  g_eval->add_option("--model", model_spec, "model spec")->required();
  g_eval->add_option("--t", eval_t, "evaluate psi(t) (real or E^l(m))");
  g_eval->add_option("--r", eval_r, "evaluate M(r) and mu_{m,eps}(r)");
  g_eval->add_option("--m", m_level, "mu level");
  g_eval->add_option("--eps", eps, "mu epsilon");

  auto* g_order = growth->add_subcommand("order", "order / lower-order window estimate");
  std::optional<double> p_opt, q_opt;
  g_order->add_option("--model", model_spec)->required();
  g_order->add_option("--t-lo", t_lo);
  g_order->add_option("--t-hi", t_hi);
  g_order->add_option("--grid", grid_count);
  g_order->add_option("--p", p_opt, "claimed upper envelope exponent");
  g_order->add_option("--q", q_opt, "claimed lower envelope exponent");

  auto* g_findr = growth->add_subcommand("find-r", "least R with step(r) > r on the grid tail");
  std::string step_kind = "M";
  double r_lo = 1.5, r_hi = 100.0;
  g_findr->add_option("--model", model_spec)->required();
  g_findr->add_option("--step", step_kind, "M or mu");
  g_findr->add_option("--m", m_level);
  g_findr->add_option("--eps", eps);
  g_findr->add_option("--r-lo", r_lo);
  g_findr->add_option("--r-hi", r_hi);
  g_findr->add_option("--grid", grid_count);

  // ---- regularity ----
  auto* reg = app.add_subcommand("regularity", "regularity condition checks");
  auto add_window = [&](CLI::App* sub) {
    sub->add_option("--t-lo", t_lo);
    sub->add_option("--t-hi", t_hi);
    sub->add_option("--grid", grid_count);
  };
  auto* r_strong = reg->add_subcommand("strong", "psi(kt) >= (k psi(t))^(1/eps)");
  r_strong->add_option("--model", model_spec)->required();
  r_strong->add_option("--eps", eps)->required();
  r_strong->add_option("--k", k)->required();
  add_window(r_strong);

  auto* r_log = reg->add_subcommand("log", "psi(kt) >= k d psi(t)");
  r_log->add_option("--model", model_spec)->required();
  r_log->add_option("--k", k)->required();
  r_log->add_option("--d", d)->required();
  add_window(r_log);

  auto* r_general = reg->add_subcommand("general", "mu_{m,eps}(r^k) >= M(r)^k");
  r_general->add_option("--model", model_spec)->required();
  r_general->add_option("--m", m_level)->required();
  r_general->add_option("--eps", eps)->required();
  r_general->add_option("--k", k)->required();
  add_window(r_general);

  auto* r_doubling = reg->add_subcommand("doubling", "A psi(t) <= psi(t + ln C) <= B psi(t)");
  fastesc::DoublingParams dp;
  r_doubling->add_option("--model", model_spec)->required();
  r_doubling->add_option("--A", dp.A)->required();
  r_doubling->add_option("--B", dp.B)->required();
  r_doubling->add_option("--C", dp.C)->required();
  add_window(r_doubling);

  auto* r_compose = reg->add_subcommand("compose", "strong-regularity transfer to a composite");
  std::string outer_spec, inner_spec;
  std::optional<double> k_witness;
  r_compose->add_option("--outer", outer_spec)->required();
  r_compose->add_option("--inner", inner_spec)->required();
  r_compose->add_option("--eps-prime", eps_prime)->required();
  r_compose->add_option("--k", k_witness, "outer witness k (searched when omitted)");
  add_window(r_compose);

  auto* r_chain = reg->add_subcommand("chain21", "mu^n(r0^k) >= (M^n(r0))^k >= M^n(r0)");
  std::string r0_text = "20.085536923187668";
  r_chain->add_option("--model", model_spec)->required();
  r_chain->add_option("--eps", eps)->required();
  r_chain->add_option("--k", k)->required();
  r_chain->add_option("--r0", r0_text, "start point (real or E^l(m))");
  r_chain->add_option("--n-max", n_max);

  // ---- construct ----
  auto* construct = app.add_subcommand("construct", "build the example growth functions");
  auto* c_ex1 = construct->add_subcommand("example1", "convex piecewise-linear phi");
  double eps_tilde = 0.5, k_tilde = 5.0, t0 = 4.0;
  int phi_n_max = 6;
  c_ex1->add_option("--eps-tilde", eps_tilde);
  c_ex1->add_option("--k-tilde", k_tilde);
  c_ex1->add_option("--t0", t0);
  c_ex1->add_option("--n-max", phi_n_max);

  auto* c_ex2 = construct->add_subcommand("example2", "quadratic psi and its separation");
  int sep_m = 1, sep_range = 60;
  c_ex2->add_option("--eps", eps_prime);
  c_ex2->add_option("--m", sep_m);
  c_ex2->add_option("--n-max", sep_range);

  auto* c_ext = construct->add_subcommand("extend-eps", "regularity witness below eps-tilde");
  double new_eps = 0.2;
  c_ext->add_option("--eps", new_eps)->required();
  c_ext->add_option("--eps-tilde", eps_tilde);
  c_ext->add_option("--k-tilde", k_tilde);
  c_ext->add_option("--t0", t0);
  c_ext->add_option("--n-max", phi_n_max);

  // ---- classify ----
  auto* classify_cmd = app.add_subcommand("classify", "escape-speed classification");
  std::string orbit_spec = "real:1,1";
  std::string r_text = "2.718281828459045";
  int depth = 12, max_lag = 3;
  std::vector<double> eps_grid{0.5, 0.75, 0.9};
  classify_cmd->add_option("--model", model_spec)->required();
  classify_cmd->add_option("--orbit", orbit_spec, "real:lambda,x0 or synthetic:FILE");
  classify_cmd->add_option("--depth", depth);
  classify_cmd->add_option("--max-lag", max_lag);
  classify_cmd->add_option("--eps", eps_grid, "epsilon grid for the mu thresholds");
  classify_cmd->add_option("--r", r_text, "threshold base R (real or E^l(m))");
  classify_cmd->add_option("--m", m_level, "mu level of the Q2-style test");

  // ---- selftest ----
  auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance suite");
  selftest_cmd->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;  // usage errors
  }

  try {
    using namespace fastesc;

    if (g_eval->parsed()) {
      GrowthModel model = GrowthModel::parse(model_spec);
      auto j = report_shell("growth eval");
      j["model"] = model.to_json();
      if (!eval_t.empty()) {
        Magnitude t = Magnitude::parse(eval_t);
        j["psi"] = model.eval_psi(t).to_json();
      }
      if (!eval_r.empty()) {
        Magnitude r = Magnitude::parse(eval_r);
        j["M"] = model.apply_M(r).to_json();
        j["mu"] = model.apply_mu(m_level, eps, r).to_json();
        j["mu_params"] = {{"m", m_level}, {"eps", eps}};
      }
      if (eval_t.empty() && eval_r.empty())
        throw std::invalid_argument("growth eval: give --t and/or --r");
      emit(out, std::move(j));
      return 0;
    }
    if (g_order->parsed()) {
      GrowthModel model = GrowthModel::parse(model_spec);
      OrderEstimate est = estimate_order(model, t_lo, t_hi, grid_count);
      est.p = p_opt;
      est.q = q_opt;
      auto j = report_shell("growth order");
      j["model"] = model.to_json();
      j["estimate"] = est.to_json();
      emit(out, std::move(j));
      return 0;
    }
    if (g_findr->parsed()) {
      GrowthModel model = GrowthModel::parse(model_spec);
      StepSpec step = step_kind == "M" ? StepSpec::M_step() : StepSpec::mu_step(m_level, eps);
      auto grid = geometric_grid({r_lo, r_hi}, grid_count);
      FindRResult res = find_R(model, step, grid);
      auto j = report_shell("growth find-r");
      j["model"] = model.to_json();
      j["step"] = step.name();
      j["result"] = res.to_json();
      emit(out, std::move(j));
      return res.R ? 0 : 1;
    }

    if (r_strong->parsed()) {
      auto rep = check_strong_log_regular(GrowthModel::parse(model_spec), eps, k,
                                          {{t_lo, t_hi}, grid_count});
      return finish_scan(out, "regularity strong", rep);
    }
    if (r_log->parsed()) {
      auto rep =
          check_log_regular(GrowthModel::parse(model_spec), k, d, {{t_lo, t_hi}, grid_count});
      return finish_scan(out, "regularity log", rep);
    }
    if (r_general->parsed()) {
      auto rep = check_generalized(GrowthModel::parse(model_spec), m_level, eps, k,
                                   {{t_lo, t_hi}, grid_count});
      return finish_scan(out, "regularity general", rep);
    }
    if (r_doubling->parsed()) {
      auto rep =
          check_doubling(GrowthModel::parse(model_spec), dp, {{t_lo, t_hi}, grid_count});
      return finish_scan(out, "regularity doubling", rep);
    }
    if (r_compose->parsed()) {
      auto rep = verify_composition_transfer(GrowthModel::parse(outer_spec),
                                             GrowthModel::parse(inner_spec), eps_prime,
                                             {{t_lo, t_hi}, grid_count}, k_witness);
      return finish_scan(out, "regularity compose", rep);
    }
    if (r_chain->parsed()) {
      auto rep = verify_theorem21_chain(GrowthModel::parse(model_spec), eps, k,
                                        Magnitude::parse(r0_text), n_max);
      return finish_scan(out, "regularity chain21", rep);
    }

    if (c_ex1->parsed()) {
      PhiConstruction phi = build_phi(eps_tilde, k_tilde, t0, phi_n_max);
      auto convexity = verify_convexity(phi);
      auto growth_ineq = verify_growth_inequality(phi, eps_tilde, k_tilde);
      auto j = report_shell("construct example1");
      j["construction"] = phi.to_json();
      j["certificate"] = {{"convexity", convexity.to_json()},
                          {"growth_inequality", growth_ineq.to_json()}};
      emit(out, std::move(j));
      if (!out.csv_path.empty()) {
        std::ofstream f(out.csv_path);
        phi.write_csv(f);
      }
      bool ok = convexity.holds() && growth_ineq.holds();
      Verdict v = ok ? Verdict::holds_on_window
                     : (convexity.verdict == Verdict::fails ||
                                growth_ineq.verdict == Verdict::fails
                            ? Verdict::fails
                            : Verdict::inconclusive);
      return verdict_exit(v, out);
    }
    if (c_ex2->parsed()) {
      SeparationParams params = separation_bounds(eps_prime);
      SeparationResult res = verify_separation(params, sep_m, sep_range);
      auto j = report_shell("construct example2");
      j["separation"] = res.report.to_json();
      j["onset_N"] = res.onset_N;
      emit(out, std::move(j));
      if (!out.csv_path.empty()) {
        std::ofstream f(out.csv_path);
        f << "n,exponent_lhs,exponent_rhs,verdict\n";
        for (const auto& row : res.report.rows) {
          double lhs = ln(ln(row.lhs)).to_real();
          double rhs = ln(ln(row.rhs)).to_real();
          f << row.t << "," << lhs << "," << rhs << ","
            << (row.outcome == PointOutcome::holds ? "holds" : "fails") << "\n";
        }
      }
      return verdict_exit(res.report.verdict, out);
    }
    if (c_ext->parsed()) {
      PhiConstruction phi = build_phi(eps_tilde, k_tilde, t0, phi_n_max);
      EpsilonExtension ext = extend_epsilon(phi, new_eps);
      auto j = report_shell("construct extend-eps");
      j["construction"] = phi.to_json();
      j["extension"] = ext.to_json();
      emit(out, std::move(j));
      return verdict_exit(ext.report.verdict, out);
    }

    if (classify_cmd->parsed()) {
      GrowthModel model = GrowthModel::parse(model_spec);
      OrbitRecord orbit;
      if (orbit_spec.rfind("real:", 0) == 0) {
        double lambda = 0.0, x0 = 0.0;
        if (std::sscanf(orbit_spec.c_str(), "real:%lf,%lf", &lambda, &x0) != 2)
          throw std::invalid_argument("classify: --orbit real:LAMBDA,X0");
        orbit = real_axis_orbit(lambda, Magnitude::from_real(x0), depth);
      } else if (orbit_spec.rfind("synthetic:", 0) == 0) {
        std::ifstream f(orbit_spec.substr(10));
        if (!f) throw std::invalid_argument("classify: cannot open orbit file");
        nlohmann::json oj;
        f >> oj;
        orbit = OrbitRecord::from_json(oj);
      } else {
        throw std::invalid_argument("classify: --orbit must be real:... or synthetic:FILE");
      }
      ClassificationParams params;
      params.R = Magnitude::parse(r_text);
      params.max_lag = max_lag;
      params.eps_grid = eps_grid;
      params.m = m_level;
      SpeedVerdict verdict = classify_orbit(orbit, model, params);
      auto j = report_shell("classify");
      j["model"] = model.to_json();
      j["params"] = params.to_json();
      j["orbit_source"] = orbit.source.to_json();
      j["depth"] = orbit.depth();
      j["verdict"] = verdict.to_json();
      emit(out, std::move(j));
      if (!out.csv_path.empty()) {
        std::vector<Magnitude> m_thr, mu_thr;
        try {
          m_thr = threshold_sequence(model, StepSpec::M_step(), params.R, orbit.depth());
        } catch (const std::domain_error&) {}
        try {
          mu_thr = threshold_sequence(model, StepSpec::mu_step(params.m, eps_grid.front()),
                                      params.R, orbit.depth());
        } catch (const std::domain_error&) {}
        std::ofstream f(out.csv_path);
        write_orbit_csv(f, orbit, m_thr, mu_thr);
      }
      return 0;
    }

    if (selftest_cmd->parsed()) {
      SelftestReport report = run_selftest(seed);
      for (const auto& c : report.criteria)
        std::fprintf(stderr, "[%s] %2d %s\n", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str());
      auto j = report_shell("selftest");
      j["config"] = {{"seed", seed}};
      j["result"] = report.to_json();
      emit(out, std::move(j));
      return report.all_passed ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::logic_error& e) {
    std::cerr << "internal-consistency error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
