// Scenario configuration (JSON) and the CSV/JSON serialization used by
// the command-line front end:
//   * mortality laws from a tagged JSON object,
//   * discrete-time specs from {"q": [...], "i": ..., "theta": ...},
//   * fixed-schema CSV writers for sweeps, threshold curves, VI reports,
//     policy tables and simulation results,
//   * a loader that reconstructs a candidate lattice from sweep CSV so
//     serialized values can be re-verified.
// All numeric output uses 9 significant digits; absent values serialize
// as "nan".
#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bequest/actuarial.hpp"
#include "bequest/common.hpp"
#include "bequest/discrete_dp.hpp"
#include "bequest/montecarlo.hpp"
#include "bequest/mortality.hpp"
#include "bequest/optimal.hpp"
#include "bequest/strategies.hpp"

namespace bequest {

// ---------------------------------------------------------------------------
// Numeric formatting

inline std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string format_f9(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON -> domain objects

// Tagged law description, e.g. {"type": "gamma2", "mu": 0.05}.  The
// linearpdf law pairs with an interest rate; it defaults to the scenario
// rate but may carry its own "r".
inline MortalityLaw law_from_json(const nlohmann::json& j, double default_r) {
  domain_check(j.is_object() && j.contains("type"), "config: law needs a \"type\" tag");
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return ConstantForce(j.at("mu").get<double>());
  if (type == "demoivre") return DeMoivre(j.at("T").get<double>());
  if (type == "gamma2") return GammaTwo(j.at("mu").get<double>());
  if (type == "linearpdf")
    return LinearPdf(j.value("r", default_r), j.at("T").get<double>());
  if (type == "tabulated") {
    Interp interp = j.value("interp", std::string("linear")) == "step" ? Interp::Step
                                                                       : Interp::Linear;
    Tail tail = j.value("tail", std::string("constant")) == "finite" ? Tail::FiniteHorizon
                                                                     : Tail::ConstantRate;
    if (j.contains("csv")) {
      std::ifstream in(j.at("csv").get<std::string>());
      domain_check(in.good(), "config: cannot open tabulated csv " +
                                  j.at("csv").get<std::string>());
      return tabulated_from_csv(in, interp, tail);
    }
    return Tabulated(j.at("knots").get<std::vector<double>>(),
                     j.at("rates").get<std::vector<double>>(), interp, tail);
  }
  throw std::domain_error("config: unknown law type \"" + type + "\"");
}

struct GridConfig {
  int w_points = 21;
  double t_min = 0.0;
  double t_max = 50.0;
  int t_points = 21;
};

struct ScenarioConfig {
  MortalityLaw law = ConstantForce(0.05);
  double r = 0.0;
  double theta = 0.0;
  GridConfig grid;
  std::string out_path;             // empty = stdout
  std::string out_format = "csv";   // csv | json (json: simulate only)
  std::uint64_t seed = 1;
  nlohmann::json raw;               // full document, for command extras

  ProblemSpec spec() const { return ProblemSpec(law, r, theta); }
  std::vector<double> times() const { return linspace(grid.t_min, grid.t_max, grid.t_points); }
  std::vector<double> fractions() const { return linspace(0.0, 1.0, grid.w_points); }
};

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  cfg.raw = j;
  cfg.r = j.value("r", 0.0);
  cfg.theta = j.value("theta", 0.0);
  if (j.contains("law")) cfg.law = law_from_json(j.at("law"), cfg.r);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid.w_points = g.value("w_points", cfg.grid.w_points);
    cfg.grid.t_min = g.value("t_min", cfg.grid.t_min);
    cfg.grid.t_max = g.value("t_max", cfg.grid.t_max);
    cfg.grid.t_points = g.value("t_points", cfg.grid.t_points);
    domain_check(cfg.grid.w_points >= 2 && cfg.grid.t_points >= 2,
                 "config: grid axes need at least 2 points");
    domain_check(cfg.grid.t_min >= 0.0 && cfg.grid.t_max >= cfg.grid.t_min,
                 "config: need 0 <= t_min <= t_max");
    domain_check(cfg.grid.t_max < horizon(cfg.law), "config: t_max must be below the horizon");
  }
  if (j.contains("output")) {
    cfg.out_path = j.at("output").value("path", std::string());
    cfg.out_format = j.at("output").value("format", std::string("csv"));
    domain_check(cfg.out_format == "csv" || cfg.out_format == "json",
                 "config: output format must be csv or json");
  }
  cfg.seed = j.value("seed", std::uint64_t{1});
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  domain_check(in.good(), "config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::domain_error("config: malformed JSON in " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

// {"q": [...], "i": ..., "theta": ...}, either at the top level or under
// a "dp" key.
inline DiscreteSpec discrete_from_json(const nlohmann::json& j) {
  const nlohmann::json& d = j.contains("dp") ? j.at("dp") : j;
  domain_check(d.contains("q"), "config: discrete spec needs a \"q\" array");
  return DiscreteSpec(DiscreteMortality(d.at("q").get<std::vector<double>>()),
                      d.value("i", 0.0), d.value("theta", 0.0));
}

// ---------------------------------------------------------------------------
// Sweep rows

struct SweepRow {
  double w = 0.0, t = 0.0;
  double phi_full = 0.0, phi_wait = 0.0;
  double phi_full_dw = 0.0, phi_wait_dw = 0.0;
  double tf = 0.0, t0 = kNaN;
  double safe = 0.0;
};

// Both strategy values on the lattice w = fraction * safe_level(t).
inline std::vector<SweepRow> run_sweep(const ProblemSpec& spec, const std::vector<double>& times,
                                       const std::vector<double>& fractions) {
  std::vector<SweepRow> rows;
  rows.reserve(times.size() * fractions.size());
  for (double t : times) {
    double wbar = safe_level(spec, t);
    for (double f : fractions) {
      SweepRow row;
      row.t = t;
      row.w = f * wbar;
      row.safe = wbar;
      StrategyEval full = eval_full(spec, row.w, t);
      StrategyEval wait = eval_wait(spec, row.w, t);
      row.phi_full = full.phi;
      row.phi_wait = wait.phi;
      row.phi_full_dw = full.phi_w;
      row.phi_wait_dw = wait.phi_w;
      row.tf = full.hit_time;
      row.t0 = wait.hit_exists ? wait.hit_time : kNaN;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "w,t,phi_full,phi_wait,phi_full_dw,phi_wait_dw,tf,t0,safe_level\n";
  for (const SweepRow& r : rows)
    out << format_g9(r.w) << ',' << format_g9(r.t) << ',' << format_g9(r.phi_full) << ','
        << format_g9(r.phi_wait) << ',' << format_g9(r.phi_full_dw) << ','
        << format_g9(r.phi_wait_dw) << ',' << format_g9(r.tf) << ',' << format_g9(r.t0) << ','
        << format_g9(r.safe) << '\n';
}

namespace detail {
inline std::vector<double> split_csv_row(const std::string& line) {
  std::vector<double> vals;
  std::istringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  return vals;
}
}  // namespace detail

// Rebuilds the composite max(full, wait) candidate from serialized sweep
// rows; the safe-level slope is recomputed analytically from the spec.
inline CandidateLattice lattice_from_sweep_csv(std::istream& in, const ProblemSpec& spec) {
  std::string line;
  domain_check(static_cast<bool>(std::getline(in, line)), "sweep csv: empty input");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v = detail::split_csv_row(line);
    domain_check(v.size() == 9, "sweep csv: expected 9 columns");
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  domain_check(!rows.empty(), "sweep csv: no data rows");

  CandidateLattice c;
  std::size_t per_time = 0;
  while (per_time < rows.size() && rows[per_time].t == rows[0].t) ++per_time;
  domain_check(per_time >= 3 && rows.size() % per_time == 0,
               "sweep csv: not a rectangular lattice");
  for (std::size_t j = 0; j < per_time; ++j)
    c.fractions.push_back(rows[0].safe > 0.0 ? rows[j].w / rows[0].safe : 0.0);
  for (std::size_t i = 0; i * per_time < rows.size(); ++i) {
    const SweepRow& first = rows[i * per_time];
    c.times.push_back(first.t);
    c.safe.push_back(first.safe);
    c.safe_slope.push_back(safe_level_derivative(spec, first.t));
    std::vector<double> phi(per_time), phi_w(per_time);
    std::vector<Action> action(per_time, Action::Wait);
    std::vector<int> branch(per_time, 0);
    for (std::size_t j = 0; j < per_time; ++j) {
      const SweepRow& r = rows[i * per_time + j];
      bool buy = r.phi_full >= r.phi_wait;
      phi[j] = buy ? r.phi_full : r.phi_wait;
      phi_w[j] = buy ? r.phi_full_dw : r.phi_wait_dw;
      action[j] = buy ? Action::Buy : Action::Wait;
      branch[j] = buy ? 0 : 1;
    }
    c.phi.push_back(std::move(phi));
    c.phi_w.push_back(std::move(phi_w));
    c.action.push_back(std::move(action));
    c.branch.push_back(std::move(branch));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Other fixed-schema writers

inline void write_threshold_csv(std::ostream& out, const ThresholdCurve& curve) {
  out << "t,wstar,valid\n";
  for (std::size_t k = 0; k < curve.times.size(); ++k)
    out << format_g9(curve.times[k]) << ',' << format_g9(curve.wstar[k]) << ','
        << (curve.valid[k] ? 1 : 0) << '\n';
}

inline void write_vireport_csv(std::ostream& out, const VIReport& rep) {
  out << "w,t,residual,action,violation\n";
  for (const VIPoint& p : rep.points) {
    const char* violation = p.pde_violation && p.sign_violation ? "pde+sign"
                            : p.pde_violation                   ? "pde"
                            : p.sign_violation                  ? "sign"
                                                                : "none";
    out << format_g9(p.w) << ',' << format_g9(p.t) << ',' << format_g9(p.residual) << ','
        << (p.action == Action::Buy ? "buy" : "wait") << ',' << violation << '\n';
  }
}

inline void write_policy_csv(std::ostream& out, const PolicyTable& table) {
  out << "k,wealth,action,value,tie\n";
  for (const PolicyStep& s : table)
    out << s.k << ',' << format_g9(s.wealth) << ','
        << (s.action == Action::Buy ? "buy" : "wait") << ',' << format_g9(s.value) << ','
        << (s.tie ? 1 : 0) << '\n';
}

inline void write_sim_csv(std::ostream& out, const std::string& policy, double w, double t,
                          const SimResult& res) {
  out << "policy,w,t,n,seed,estimate,stderr\n";
  out << policy << ',' << format_g9(w) << ',' << format_g9(t) << ',' << res.n_paths << ','
      << res.seed << ',' << format_g9(res.estimate) << ',' << format_g9(res.std_error) << '\n';
}

inline nlohmann::json sim_to_json(const std::string& policy, double w, double t,
                                  const SimResult& res) {
  return nlohmann::json{{"policy", policy},     {"w", w},
                        {"t", t},               {"n_paths", res.n_paths},
                        {"seed", res.seed},     {"estimate", res.estimate},
                        {"std_error", res.std_error}};
}

}  // namespace bequest
