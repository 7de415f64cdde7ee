// Command-line front end.  Subcommands:
//   eval       strategy values and derivatives at one (wealth, time) point
//   sweep      both strategies on a fraction x time lattice, CSV
//   classify   regime of the configured market with the evidence behind it
//   threshold  wealth threshold curve w*(t) with validity verdicts, CSV
//   vicheck    variational-inequality check of a candidate lattice, CSV
//   dp         discrete-time policy table plus exhaustive-oracle comparison
//   simulate   Monte Carlo estimate of a policy's success probability
//
// Exit codes: 0 success, 2 invalid input or domain error, 3 numerical
// failure (root finding or quadrature did not converge).
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bequest/scenario.hpp"

namespace {

using namespace bequest;

// Streams command output to the configured path, or stdout when none is set.
struct OutTarget {
  std::ofstream file;
  std::ostream* out = &std::cout;

  explicit OutTarget(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      domain_check(file.good(), "output: cannot write " + path);
      out = &file;
    }
  }
  std::ostream& stream() { return *out; }
};

void require_csv(const ScenarioConfig& cfg) {
  domain_check(cfg.out_format == "csv", "output: this command only writes csv");
}

void run_eval(const ScenarioConfig& cfg, double w, double t) {
  ProblemSpec spec = cfg.spec();
  StrategyEval full = eval_full(spec, w, t);
  StrategyEval wait = eval_wait(spec, w, t);
  std::cout << "phi_full " << format_f9(full.phi) << '\n'
            << "phi_wait " << format_f9(wait.phi) << '\n'
            << "phi_full_dw " << format_f9(full.phi_w) << '\n'
            << "phi_wait_dw " << format_f9(wait.phi_w) << '\n'
            << "tf " << format_f9(full.hit_time) << '\n'
            << "t0 " << format_f9(wait.hit_exists ? wait.hit_time : kNaN) << '\n'
            << "safe_level " << format_f9(safe_level(spec, t)) << '\n';
}

void run_sweep(const ScenarioConfig& cfg) {
  require_csv(cfg);
  OutTarget target(cfg.out_path);
  write_sweep_csv(target.stream(), run_sweep(cfg.spec(), cfg.times(), cfg.fractions()));
}

void run_classify(const ScenarioConfig& cfg) {
  ProblemSpec spec = cfg.spec();
  Regime regime = classify(spec);
  const char* name = regime.kind == RegimeKind::WaitUntilSafe   ? "WaitUntilSafe"
                     : regime.kind == RegimeKind::FullInsurance ? "FullInsurance"
                     : regime.kind == RegimeKind::WaitThenFull  ? "WaitThenFull"
                                                                : "Unverified";
  std::optional<double> tr = compute_tr(spec);

  // Evidence grid: the same density scan the classifier uses.
  const double T = horizon(spec.law);
  double hi = std::isfinite(T) ? T - detail::kHorizonPad : truncation_horizon(spec, 0.0);
  double density_min = kInf;
  bool nondecreasing = true;
  double prev = -kInf;
  for (double s : detail::density_grid(hi)) {
    double g = density(spec.law, s);
    density_min = std::min(density_min, g);
    if (g < prev - 1e-12) nondecreasing = false;
    prev = std::max(prev, g);
  }

  std::cout << "regime " << name << '\n'
            << "t_r " << (tr ? format_g9(*tr) : "never") << '\n'
            << "r " << format_g9(spec.r) << '\n'
            << "theta " << format_g9(spec.theta) << '\n'
            << "sup_hazard " << format_g9(sup_hazard(spec.law)) << '\n'
            << "hazard_at_0 " << format_g9(hazard(spec.law, 0.0)) << '\n'
            << "density_min " << format_g9(density_min) << '\n'
            << "density_nondecreasing " << (nondecreasing ? 1 : 0) << '\n';
}

void run_threshold(const ScenarioConfig& cfg) {
  require_csv(cfg);
  OutTarget target(cfg.out_path);
  write_threshold_csv(target.stream(), build_threshold_curve(cfg.spec(), cfg.times()));
}

void run_vicheck(const ScenarioConfig& cfg, const std::string& candidate,
                 const std::string& sweep_path) {
  require_csv(cfg);
  ProblemSpec spec = cfg.spec();
  CandidateLattice cand;
  if (!sweep_path.empty()) {
    std::ifstream in(sweep_path);
    domain_check(in.good(), "vicheck: cannot open sweep csv " + sweep_path);
    cand = lattice_from_sweep_csv(in, spec);
  } else if (candidate == "full") {
    cand = make_full_lattice(spec, cfg.times(), cfg.fractions());
  } else if (candidate == "wait") {
    cand = make_wait_lattice(spec, cfg.times(), cfg.fractions());
  } else if (candidate == "optimal") {
    cand = make_optimal_lattice(spec, cfg.times(), cfg.fractions());
  } else if (candidate == "threshold") {
    cand = make_threshold_lattice(spec, cfg.times(), cfg.fractions());
  } else {
    throw std::domain_error("vicheck: unknown candidate \"" + candidate + "\"");
  }
  VIReport rep = vi_check(spec, cand);
  OutTarget target(cfg.out_path);
  write_vireport_csv(target.stream(), rep);
  std::cout << "verdict " << (rep.pass ? "pass" : "fail") << " residual_max "
            << format_g9(rep.pde_residual_max) << " violations " << rep.violations.size()
            << " skipped " << rep.skipped << '\n';
}

void run_dp(const ScenarioConfig& cfg, double w0) {
  require_csv(cfg);
  DiscreteSpec dspec = discrete_from_json(cfg.raw);
  PolicyTable table = dp_policy_path(dspec, w0);
  OutTarget target(cfg.out_path);
  write_policy_csv(target.stream(), table);

  std::size_t n = dspec.mortality.periods();
  if (n <= 24) {
    OracleResult oracle = enumerate_oracle(dspec, w0);
    double dp = dp_value(dspec, w0, 0);
    std::cout << "oracle value=" << format_g9(oracle.value) << " dp=" << format_g9(dp)
              << " exact=" << (dp == oracle.value ? 1 : 0) << " best={";
    for (std::size_t k = 0; k < oracle.best.size(); ++k) {
      if (k) std::cout << ',';
      for (std::size_t bit = 0; bit + 1 < n; ++bit)
        std::cout << ((oracle.best[k] >> bit) & 1u ? 'b' : 'w');
    }
    std::cout << "}\n";
  } else {
    std::cout << "oracle skipped (more than 24 periods)\n";
  }
}

void run_simulate(const ScenarioConfig& cfg, const std::string& policy_name, double w, double t,
                  std::int64_t n, double t_prime, std::uint64_t seed) {
  ProblemSpec spec = cfg.spec();
  Policy policy;
  if (policy_name == "full") {
    policy = FullUntilRuin{};
  } else if (policy_name == "wait") {
    policy = WaitUntilSafe{};
  } else if (policy_name == "deferred") {
    domain_check(!std::isnan(t_prime), "simulate: deferred policy needs --tprime");
    policy = Deferred{t_prime};
  } else if (policy_name == "threshold") {
    policy = Threshold{build_threshold_curve(spec, cfg.times())};
  } else {
    throw std::domain_error("simulate: unknown policy \"" + policy_name + "\"");
  }
  SimResult res = simulate(spec, policy, w, t, n, seed);
  OutTarget target(cfg.out_path);
  if (cfg.out_format == "json")
    target.stream() << sim_to_json(policy_name, w, t, res).dump(2) << '\n';
  else
    write_sim_csv(target.stream(), policy_name, w, t, res);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bequest-probability toolkit: strategy values, regime classification,\n"
               "optimality checks, discrete-time recursions and Monte Carlo simulation."};
  app.require_subcommand(1);

  std::string config_path;
  double w = 0.0, t = 0.0, w0 = 0.0, t_prime = bequest::kNaN;
  std::int64_t n_paths = 100000;
  std::uint64_t seed_override = 0;
  std::string candidate = "threshold", sweep_path, policy_name;

  CLI::App* eval = app.add_subcommand("eval", "Strategy values at one (wealth, time) point");
  eval->add_option("--config", config_path, "Scenario JSON")->required();
  eval->add_option("--w", w, "Wealth level")->required();
  eval->add_option("--t", t, "Evaluation time")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Strategy values on the configured lattice");
  sweep->add_option("--config", config_path, "Scenario JSON")->required();

  CLI::App* classify = app.add_subcommand("classify", "Regime of the configured market");
  classify->add_option("--config", config_path, "Scenario JSON")->required();

  CLI::App* threshold = app.add_subcommand("threshold", "Threshold curve on the time grid");
  threshold->add_option("--config", config_path, "Scenario JSON")->required();

  CLI::App* vicheck = app.add_subcommand("vicheck", "Variational-inequality check");
  vicheck->add_option("--config", config_path, "Scenario JSON")->required();
  vicheck->add_option("--candidate", candidate, "full|wait|optimal|threshold");
  vicheck->add_option("--sweep", sweep_path, "Re-verify a sweep CSV instead");

  CLI::App* dp = app.add_subcommand("dp", "Discrete-time policy table");
  dp->add_option("--config", config_path, "Discrete spec JSON")->required();
  dp->add_option("--w0", w0, "Initial wealth")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo success probability");
  simulate->add_option("--config", config_path, "Scenario JSON")->required();
  simulate->add_option("--policy", policy_name, "full|wait|deferred|threshold")->required();
  simulate->add_option("--w", w, "Initial wealth")->required();
  simulate->add_option("--t", t, "Start time")->required();
  simulate->add_option("--n", n_paths, "Number of paths");
  simulate->add_option("--tprime", t_prime, "Coverage start (deferred policy)");
  CLI::Option* seed_opt = simulate->add_option("--seed", seed_override, "Override config seed");

  try {
    app.parse(argc, argv);
    bequest::ScenarioConfig cfg = bequest::load_scenario(config_path);
    if (*eval) run_eval(cfg, w, t);
    if (*sweep) run_sweep(cfg);
    if (*classify) run_classify(cfg);
    if (*threshold) run_threshold(cfg);
    if (*vicheck) run_vicheck(cfg, candidate, sweep_path);
    if (*dp) run_dp(cfg, w0);
    if (*simulate)
      run_simulate(cfg, policy_name, w, t, n_paths, t_prime,
                   seed_opt->count() ? seed_override : cfg.seed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help or the usage error
    return rc == 0 ? 0 : 2;
  } catch (const bequest::numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
