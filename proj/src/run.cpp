#include "sree/run.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sree/checks.hpp"

#ifndef SREE_VERSION
#define SREE_VERSION "0.0.0"
#endif

namespace sree {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string checksum(const std::vector<double>& values) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::vector<double> load_K_table(const std::string& path, const std::vector<double>& nodes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("location.K_table: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> ts, Ks;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double t = 0.0, K = 0.0;
    char comma = 0;
    std::istringstream ss(line);
    if (!(ss >> t >> comma >> K) || comma != ',')
      throw ConfigError("location.K_table: " + path + ":" + std::to_string(lineno) + ": expected 't,K'");
    if (!ts.empty() && !(t > ts.back()))
      throw ConfigError("location.K_table: " + path + ": times must increase");
    if (!(K > 0.0)) throw ConfigError("location.K_table: " + path + ": K must be positive");
    ts.push_back(t);
    Ks.push_back(K);
  }
  if (ts.empty()) throw ConfigError("location.K_table: " + path + ": no rows");
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = nodes[i];
    if (t <= ts.front()) {
      out[i] = Ks.front();
    } else if (t >= ts.back()) {
      out[i] = Ks.back();
    } else {
      const auto j = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
      const double s = (t - ts[j]) / (ts[j + 1] - ts[j]);
      out[i] = (1.0 - s) * Ks[j] + s * Ks[j + 1];
    }
  }
  return out;
}

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... xs) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(xs), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "true" : "false"; }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }

  std::ofstream out_;
};

class Session {
 public:
  explicit Session(const RunRequest& req) : req_(req) {
    manifest_["tool"] = "sree";
    manifest_["version"] = SREE_VERSION;
    manifest_["command"] = req.command;
    manifest_["config"] = req.config_path;
    manifest_["seed"] = req.config.seed;
    manifest_["env_overrides"] = req.env_overrides;
    manifest_["status"] = "running";
    manifest_["timings"] = json::object();
    manifest_["outputs"] = json::array();
    manifest_["results"] = json::object();
  }

  json& manifest() { return manifest_; }
  json& results() { return manifest_["results"]; }

  template <class F>
  auto phase(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    struct Stop {
      Session* s;
      std::string name;
      Clock::time_point t0;
      ~Stop() { s->manifest_["timings"][name] = std::chrono::duration<double>(Clock::now() - t0).count(); }
    } stop{this, name, t0};
    return f();
  }

  Csv csv(const std::string& name, const std::string& header) {
    manifest_["outputs"].push_back(name);
    return Csv(req_.out_dir / name, header);
  }

  bool wants(const std::string& kind) const { return req_.config.output.wants(kind); }

  int finish(int code, const std::string& status, const std::vector<std::string>& errors = {}) {
    manifest_["status"] = status;
    manifest_["exit_code"] = code;
    manifest_["errors"] = errors;
    for (const auto& e : errors) std::fprintf(stderr, "error: %s\n", e.c_str());
    std::ofstream out(req_.out_dir / "manifest.json", std::ios::binary);
    out << manifest_.dump(2) << '\n';
    return code;
  }

 private:
  const RunRequest& req_;
  json manifest_;
};

void record_summary(Session& s, const RunConfig& cfg, const ValidationResult& v) {
  auto& m = s.manifest();
  const auto& sum = v.summary;
  m["horizon_T"] = sum.horizon_T;
  m["phi_T"] = sum.phi_T;
  m["tail_epsilon"] = cfg.grid.tail_epsilon;
  m["schauder_M"] = sum.schauder_M;
  m["lipschitz_S"] = sum.lipschitz_S;
  m["S_zero_sup"] = sum.S_zero_sup;
  m["C1"] = sum.C1;
  m["K_sup"] = sum.K_sup;
  const Economy& eco = *v.economy;
  m["grid"] = {{"spatial_nodes", eco.op.size()},
               {"periodic", eco.op.grid().periodic},
               {"time_nodes", eco.time.size()},
               {"spatial_checksum", checksum(eco.op.grid().locations)},
               {"time_checksum", checksum(eco.time.nodes)}};
}

LocationProblem single_location(const RunConfig& cfg, const Economy& eco) {
  LocationProblem prob;
  prob.primitives = eco.primitives;
  prob.grid = eco.time;
  prob.k0 = cfg.location.k0 > 0.0 ? cfg.location.k0 : k0_profile(cfg.k0, 0.5);
  if (cfg.location.K_table.empty())
    prob.K_traj.assign(eco.time.size(), cfg.location.K);
  else
    prob.K_traj = load_K_table(cfg.location.K_table, eco.time.nodes);
  return prob;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void write_path(Session& s, const LocationPath& path, const LocationProblem& prob) {
  const auto dyn = dynamics_residuals(path, prob);
  const auto eul = euler_residuals(path, prob);
  s.results()["max_dynamics_residual"] = max_of(dyn);
  s.results()["max_euler_residual"] = max_of(eul);
  s.results()["objective"] = path.objective;
  s.results()["tail_bound"] = path.tail_bound;
  if (!s.wants("path")) return;
  // Residual columns describe the step starting at t; the final row has none.
  Csv csv = s.csv("path.csv", "t,k,c,theta,dynamics_residual,euler_residual");
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    const bool step = i < dyn.size();
    csv.row(path.t[i], path.k[i], path.c[i], path.theta[i], step ? dyn[i] : 0.0, step ? eul[i] : 0.0);
  }
}

void write_bounds(Session& s, const LocationPath& path, const LocationProblem& prob) {
  const ConsumptionBounds b = check_consumption_bounds(path, prob);
  s.results()["c_min"] = b.c_min;
  s.results()["c_max"] = b.c_max;
  s.results()["mass_ok"] = b.mass_ok;
  if (!s.wants("bounds")) return;
  Csv csv = s.csv("bounds.csv", "c_min,c_max,positive,variation,mass_bound,mass_ok");
  csv.row(b.c_min, b.c_max, b.positive, b.variation, b.mass_bound, b.mass_ok);
}

void write_field(Session& s, const std::string& name, const SpaceTimeField& f, const Economy& eco) {
  Csv csv = s.csv(name, "t,z,value");
  const auto& z = eco.op.grid().locations;
  for (std::size_t i = 0; i < f.n_time(); ++i)
    for (std::size_t j = 0; j < f.n_space(); ++j) csv.row(eco.time.nodes[i], z[j], f(i, j));
}

int run_location(Session& s, const RunRequest& req, const Economy& eco) {
  const RunConfig& cfg = req.config;
  const LocationProblem prob = single_location(cfg, eco);
  const LocationPath path = s.phase("solve", [&] { return solve_shooting(prob, eco.shooting); });
  s.phase("write", [&] {
    write_path(s, path, prob);
    write_bounds(s, path, prob);
  });
  if (req.force_oracle || cfg.solver.oracle) {
    const OracleResult orc = s.phase("oracle", [&] { return solve_direct_oracle(prob, eco.oracle); });
    const OracleComparison cmp = compare_with_oracle(path, orc.path);
    s.results()["oracle"] = {{"objective", orc.path.objective},
                             {"objective_rel_gap", cmp.objective_rel_gap},
                             {"path_gap", cmp.path_gap},
                             {"iterations", orc.iterations},
                             {"grad_norm", orc.grad_norm},
                             {"agrees", cmp.passed}};
    if (s.wants("path")) {
      Csv csv = s.csv("oracle.csv", "t,k,c,multiplier");
      for (std::size_t i = 0; i < orc.path.t.size(); ++i)
        csv.row(orc.path.t[i], orc.path.k[i], orc.path.c[i], orc.multipliers[i]);
    }
  }
  return s.finish(exit_ok, "ok");
}

int run_equilibrium(Session& s, const RunRequest& req, const Economy& eco) {
  const RunConfig& cfg = req.config;
  EquilibriumOptions opts;
  opts.gamma = cfg.solver.gamma;
  opts.tol = cfg.solver.tol;
  opts.max_sweeps = static_cast<int>(cfg.solver.max_sweeps);
  const EquilibriumResult res = s.phase("solve", [&] { return solve_equilibrium(eco, opts); });
  const auto& st = res.state;
  const CertificationReport cert = s.phase("certify", [&] { return equilibrium_residual(st, eco); });
  const bool certified = cert.certified(cfg.solver.certify_consistency, cfg.solver.certify_dynamics,
                                        cfg.solver.certify_euler);
  const auto& psi = eco.op.kernel().psi;
  const double M = s.manifest()["schauder_M"].get<double>();
  bool self_map = true;
  for (std::size_t i = 0; i < st.iterate_sup.size(); ++i)
    self_map = self_map && st.iterate_sup[i] <= M && st.iterate_min[i] >= psi.lo && st.iterate_max[i] <= psi.hi;
  double ratio = 0.0;  // geometric-mean contraction of the residual history
  const auto& h = st.residual_history;
  if (h.size() >= 2 && h.front() > 0.0 && h.back() > 0.0)
    ratio = std::pow(h.back() / h.front(), 1.0 / static_cast<double>(h.size() - 1));
  auto& r = s.results();
  r["converged"] = res.converged;
  r["plateau"] = res.plateau;
  r["sweeps"] = st.sweep_count;
  r["final_residual"] = res.final_residual;
  r["tolerance"] = opts.tol;
  r["observed_contraction"] = ratio;
  r["iterates_in_Y0"] = self_map;
  r["certification"] = {{"consistency", cert.consistency},
                        {"dynamics", cert.dynamics},
                        {"euler", cert.euler},
                        {"certified", certified}};
  s.phase("write", [&] {
    if (s.wants("fields")) {
      write_field(s, "fields_k.csv", st.k_field, eco);
      write_field(s, "fields_c.csv", st.c_field, eco);
      write_field(s, "fields_K.csv", st.K_field, eco);
    }
    if (s.wants("residuals")) {
      Csv csv = s.csv("residuals.csv", "sweep,y_norm_residual");
      for (std::size_t i = 0; i < h.size(); ++i) csv.row(i, h[i]);
    }
    if (s.wants("certification")) {
      Csv csv = s.csv("certification.csv", "consistency,dynamics,euler,certified");
      csv.row(cert.consistency, cert.dynamics, cert.euler, certified);
    }
  });
  if (req.force_oracle || cfg.solver.oracle) {
    double rel = 0.0, gap = 0.0;
    s.phase("oracle", [&] {
      for (std::size_t j = 0; j < eco.op.size(); ++j) {
        const LocationProblem prob = eco.location_problem(st.K_field, j);
        LocationPath shoot;
        shoot.t = eco.time.nodes;
        shoot.k = st.k_field.column(j);
        shoot.c = st.c_field.column(j);
        shoot.objective = discounted_utility(shoot.t, shoot.c, eco.primitives);
        const OracleResult orc = solve_direct_oracle(prob, eco.oracle);
        LocationPath o = orc.path;
        o.objective = discounted_utility(o.t, o.c, eco.primitives);
        const OracleComparison cmp = compare_with_oracle(shoot, o);
        rel = std::max(rel, cmp.objective_rel_gap);
        gap = std::max(gap, cmp.path_gap);
      }
      return 0;
    });
    r["oracle"] = {{"objective_rel_gap", rel}, {"path_gap", gap}};
  }
  if (!res.converged) return s.finish(exit_not_converged, res.plateau ? "not_converged_plateau" : "not_converged");
  return s.finish(exit_ok, "ok");
}

int run_diagnose(Session& s, const RunRequest& req, const Economy& eco) {
  const RunConfig& cfg = req.config;
  const LocationProblem prob = single_location(cfg, eco);
  struct Row {
    std::string name;
    double value, threshold;
    bool passed;
  };
  std::vector<Row> rows;
  const LocationPath path = s.phase("solve", [&] { return solve_shooting(prob, eco.shooting); });
  s.phase("checks", [&] {
    const auto dyn = dynamics_residuals(path, prob);
    const double c_min = *std::min_element(path.c.begin(), path.c.end());
    const double k_min = *std::min_element(path.k.begin(), path.k.end());
    rows.push_back({"dynamics_residual", max_of(dyn), 1e-6, max_of(dyn) <= 1e-6});
    rows.push_back({"min_capital", k_min, 0.0, k_min > 0.0});
    rows.push_back({"min_consumption", c_min, 0.0, c_min > 0.0});
    const ConsumptionBounds b = check_consumption_bounds(path, prob);
    rows.push_back({"capital_variation", b.variation, b.mass_bound + 1e-6, b.mass_ok});

    const OracleResult orc = solve_direct_oracle(prob, eco.oracle);
    const OracleComparison cmp = compare_with_oracle(path, orc.path);
    rows.push_back({"oracle_objective_rel_gap", cmp.objective_rel_gap, 1e-4, cmp.objective_rel_gap <= 1e-4});
    rows.push_back({"oracle_path_gap", cmp.path_gap, 1e-3, cmp.path_gap <= 1e-3});

    const TailDominanceReport tail = check_tail_dominance(prob, 50, cfg.seed);
    rows.push_back({"tail_J4T_minus_JT", tail.worst_tail, tail.phi, tail.passed});
    const HorizonDoublingReport dbl = check_horizon_doubling(prob, eco.shooting);
    rows.push_back(
        {"horizon_doubling_gap", std::abs(dbl.objective_2T - dbl.objective_T), dbl.phi, dbl.passed});

    const double hs[] = {1e-1, 1e-2, 1e-3, 1e-4};
    const RegularizationReport reg = h_regularization_sweep(prob, hs, 1e-2, eco.shooting);
    rows.push_back({"regularization_final_gap", reg.final_gap, 1e-2, reg.passed});

    const double eps[] = {1e-1, 1e-2, 1e-3};
    const ContinuityReport cont = check_best_response_continuity(eco, initial_iterate(eco), eps, cfg.seed);
    for (std::size_t i = 0; i < cont.eps.size(); ++i)
      rows.push_back({"best_response_deviation_eps_" + format_double(cont.eps[i]), cont.deviation[i],
                      i == 0 ? cont.deviation[i] : cont.deviation[i - 1], cont.monotone});

    const GradientCheckReport grad = check_oracle_gradient(prob, 1, 10, cfg.seed);
    rows.push_back({"oracle_objective_gradient_rel_error", grad.objective_rel_error, 1e-5,
                    grad.objective_rel_error <= 1e-5});
    rows.push_back({"oracle_terminal_gradient_rel_error", grad.terminal_rel_error, 1e-5,
                    grad.terminal_rel_error <= 1e-5});
    return 0;
  });
  bool all = true;
  for (const Row& r : rows) {
    all = all && r.passed;
    s.results()[r.name] = {{"value", r.value}, {"threshold", r.threshold}, {"passed", r.passed}};
  }
  if (s.wants("diagnostics")) {
    Csv csv = s.csv("diagnostics.csv", "check,value,threshold,passed");
    for (const Row& r : rows) csv.row(r.name, r.value, r.threshold, r.passed);
  }
  return all ? s.finish(exit_ok, "ok") : s.finish(exit_solver, "diagnostics_failed");
}

}  // namespace

int execute(const RunRequest& req) {
  std::error_code ec;
  std::filesystem::create_directories(req.out_dir, ec);
  Session s(req);
  if (ec) {
    std::fprintf(stderr, "cannot create output directory %s: %s\n", req.out_dir.string().c_str(),
                 ec.message().c_str());
    return exit_config;
  }
  if (!req.load_errors.empty()) return s.finish(exit_config, "config_rejected", req.load_errors);

  ValidationResult v = s.phase("validate", [&] { return validate_config(req.config); });
  if (!v.ok()) return s.finish(exit_config, "config_rejected", v.errors);
  record_summary(s, req.config, v);
  const Economy& eco = *v.economy;
  try {
    if (req.command == "validate") return s.finish(exit_ok, "ok");
    if (req.command == "solve-location") return run_location(s, req, eco);
    if (req.command == "solve-equilibrium") return run_equilibrium(s, req, eco);
    if (req.command == "diagnose") return run_diagnose(s, req, eco);
    return s.finish(exit_config, "config_rejected", {"unknown command '" + req.command + "'"});
  } catch (const ConfigError& e) {
    return s.finish(exit_config, "config_rejected", {e.what()});
  } catch (const std::exception& e) {
    return s.finish(exit_solver, "solver_failure", {e.what()});
  }
}

}  // namespace sree
