// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sree/config.hpp"
#include "sree/equilibrium.hpp"
#include "sree/ramsey.hpp"

using namespace sree;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

// ---------------------------------------------------------------------------
// Reference model formulas, written out independently of the library.

struct Ref {
  double A, alpha, beta, delta, sigma, r;

  explicit Ref(const ModelPrimitives& m)
      : A(m.production.A), alpha(m.production.alpha), beta(m.production.beta), delta(m.production.delta),
        sigma(m.utility.sigma), r(m.r) {}

  double f(double k, double K) const { return A * std::pow(k, alpha) * std::pow(K, beta) - delta * k; }
  double fk(double k, double K) const { return alpha * A * std::pow(k, alpha - 1) * std::pow(K, beta) - delta; }
  double U(double c) const { return std::pow(c, 1 - sigma) / (1 - sigma); }

  // Golden-section maximum of f(., K).
  double f_max(double K) const {
    double a = 0.0, b = std::pow(A * std::pow(K, beta) / delta, 1 / (1 - alpha));
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 200; ++i) {
      const double x1 = b - g * (b - a), x2 = a + g * (b - a);
      (f(x1, K) < f(x2, K) ? a : b) = f(x1, K) < f(x2, K) ? x1 : x2;
    }
    return f(0.5 * (a + b), K);
  }

  double k_star(double K) const {
    double lo = 1e-12, hi = 1e8;
    for (int i = 0; i < 300; ++i) {
      const double m = std::sqrt(lo * hi);
      (fk(m, K) > r ? lo : hi) = m;
    }
    return std::sqrt(lo * hi);
  }
};

double K_interp(const LocationProblem& p, double t) {
  const auto& x = p.grid.nodes;
  if (t >= x.back()) return p.K_traj.back();
  const auto i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  const double s = (t - x[i]) / (x[i + 1] - x[i]);
  return (1 - s) * p.K_traj[i] + s * p.K_traj[i + 1];
}

// Largest per-step deviation of the node data from the exact (k, c) flow,
// integrated with 512 RK4 substeps per step.
double max_flow_defect(const LocationPath& path, const LocationProblem& p) {
  const Ref m(p.primitives);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < path.t.size(); ++i) {
    const double dt = path.t[i + 1] - path.t[i];
    const int sub = 512;
    const double h = dt / sub;
    double k = path.k[i], c = path.c[i];
    auto rhs = [&](double t, double kk, double cc, double& dk, double& dc) {
      const double K = K_interp(p, t);
      dk = m.f(kk, K) - cc;
      dc = cc / m.sigma * (m.fk(kk, K) - m.r);
    };
    bool ok = true;
    for (int s = 0; s < sub && ok; ++s) {
      const double t = path.t[i] + s * h;
      double k1, c1, k2, c2, k3, c3, k4, c4;
      rhs(t, k, c, k1, c1);
      rhs(t + h / 2, k + h / 2 * k1, c + h / 2 * c1, k2, c2);
      rhs(t + h / 2, k + h / 2 * k2, c + h / 2 * c2, k3, c3);
      rhs(t + h, k + h * k3, c + h * c3, k4, c4);
      k += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      c += h / 6 * (c1 + 2 * c2 + 2 * c3 + c4);
      ok = k > 0 && c > 0 && std::isfinite(k) && std::isfinite(c);
    }
    worst = std::max(worst, ok ? std::abs(path.k[i + 1] - k) / dt : INFINITY);
  }
  return worst;
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

RunConfig load(const std::string& name) { return load_config(std::string(SREE_CONFIG_DIR) + "/" + name); }

Economy economy_of(const RunConfig& cfg, RunSummary* summary = nullptr) {
  ValidationResult v = validate_config(cfg);
  if (!v.ok()) {
    std::string msg = "configuration rejected:";
    for (const auto& e : v.errors) msg += " " + e;
    throw std::runtime_error(msg);
  }
  if (summary) *summary = v.summary;
  return std::move(*v.economy);
}

LocationProblem location_of(const Economy& eco, double k0, double K) {
  LocationProblem p;
  p.primitives = eco.primitives;
  p.grid = eco.time;
  p.K_traj.assign(eco.time.size(), K);
  p.k0 = k0;
  return p;
}

// Every shooting path solved below, for the positivity and mass criteria.
struct Solved {
  LocationPath path;
  LocationProblem prob;
};
std::vector<Solved> solved;

LocationPath shoot(const LocationProblem& p) {
  LocationPath path = solve_shooting(p);
  solved.push_back({path, p});
  return path;
}

// ---------------------------------------------------------------------------

void oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_J = 0.0, worst_path = 0.0, worst_grad = 0.0;
  double solve_time = 0.0;
  int instances = 0;
  for (int n = 0; n < 20; ++n) {
    LocationProblem p;
    p.primitives.production.alpha = 0.25 + 0.15 * u(rng);
    p.primitives.production.beta = 0.3 * u(rng);
    p.primitives.utility.sigma = 0.3 + 0.5 * u(rng);
    p.primitives.r = 0.02 + 0.04 * u(rng);
    const double T = 10.0 + 50.0 * u(rng);
    const auto N = static_cast<std::size_t>(50 + 150 * u(rng));
    p.grid = TimeGrid::uniform(T, N);
    const double level = 0.5 + 4.5 * u(rng), amp = 0.5 * level * u(rng);
    p.K_traj.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double s = p.grid.nodes[i] / T;
      switch (n % 3) {
        case 0: p.K_traj[i] = level; break;
        case 1: p.K_traj[i] = level + amp * (2 * s - 1); break;
        default: p.K_traj[i] = level + amp * std::sin(2 * M_PI * 3 * s); break;
      }
    }
    p.k0 = (0.3 + 1.7 * u(rng)) * Ref(p.primitives).k_star(p.K_traj.front());

    const auto t0 = Clock::now();
    const LocationPath s = shoot(p);
    const OracleResult o = solve_direct_oracle(p);
    solve_time += seconds_since(t0);
    worst_J = std::max(worst_J, std::abs(s.objective - o.path.objective) / std::abs(o.path.objective));
    worst_path = std::max({worst_path, sup_gap(s.k, o.path.k), sup_gap(s.c, o.path.c)});

    // Adjoint gradients of the discrete program versus central differences.
    const DiscreteProgram dp(p, 1);
    const std::size_t m = dp.size();
    std::normal_distribution<double> z(0.0, 0.2);
    std::vector<double> x(m), g(m), gk(m);
    for (int pt = 0; pt < 10; ++pt) {
      double base = std::log(0.5 * Ref(p.primitives).f(s.k[0], p.K_traj[0]) + 0.1);
      do {
        for (auto& v : x) v = base + z(rng);
        base -= 0.25;
      } while (!std::isfinite(dp.terminal_capital(x)));
      dp.objective_gradient(x, g);
      dp.terminal_gradient(x, gk);
      double num = 0, den = 0, numk = 0, denk = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const double h = 1e-6, keep = x[i];
        x[i] = keep + h;
        const double jp = dp.objective(x), kp = dp.terminal_capital(x);
        x[i] = keep - h;
        const double jm = dp.objective(x), km = dp.terminal_capital(x);
        x[i] = keep;
        const double fd = (jp - jm) / (2 * h), fdk = (kp - km) / (2 * h);
        num = std::max(num, std::abs(g[i] - fd));
        den = std::max(den, std::abs(fd));
        numk = std::max(numk, std::abs(gk[i] - fdk));
        denk = std::max(denk, std::abs(fdk));
      }
      worst_grad = std::max({worst_grad, num / den, numk / denk});
    }
    ++instances;
  }
  report(worst_J <= 1e-4 && worst_path <= 1e-3 && solve_time <= 60.0, "oracle_equivalence",
         fmt("%d instances, max rel J gap %.2e (<=1e-4), max path gap %.2e (<=1e-3), %.1f s (<=60)", instances,
             worst_J, worst_path, solve_time));
  report(worst_grad <= 1e-5, "gradient_check",
         fmt("200 points, max rel error %.2e (<=1e-5)", worst_grad));
}

void stationary(const Economy& eco) {
  const double K = 1.7;
  const Ref m(eco.primitives);
  const double ks = m.k_star(K), cs = m.f(ks, K);
  const LocationProblem p = location_of(eco, ks, K);
  const auto t0 = Clock::now();
  const LocationPath path = shoot(p);
  const double dt = seconds_since(t0);
  const double drift = std::max(sup_gap(path.k, std::vector<double>(path.k.size(), ks)),
                                sup_gap(path.c, std::vector<double>(path.c.size(), cs)));
  const double T = p.grid.horizon;
  const double exact = m.U(cs) * (1 - std::exp(-m.r * T)) / m.r;
  const double rel = std::abs(path.objective - exact) / exact;
  report(drift <= 1e-6 && rel <= 1e-6 && dt <= 1.0, "stationary_exactness",
         fmt("T=%g, drift %.2e (<=1e-6), objective rel err %.2e (<=1e-6), %.3f s (<=1)", T, drift, rel, dt));
}

void tail_bound(const Economy& eco, const RunConfig& cfg) {
  std::vector<LocationProblem> cases;
  cases.push_back(location_of(eco, k0_profile(cfg.k0, 0.5), cfg.location.K));
  {
    LocationProblem p = location_of(eco, 2.0, 1.5);
    p.grid = TimeGrid::uniform(40.0, 201);
    p.K_traj.assign(201, 1.5);
    cases.push_back(p);
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  std::string detail;
  for (const LocationProblem& p : cases) {
    const Ref m(p.primitives);
    const double T = p.grid.horizon;
    const double phi = tail_bound_phi(T, p.tail_params());
    const std::size_t n = p.grid.intervals();
    const double dt = T / n;
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
      // Feasible explicit-Euler path on [0, 4T]; consumption a random share
      // of what keeps capital nonnegative.
      double k = p.k0, J_T = 0.0, J_4T = 0.0;
      const double share = u(rng);
      const int kind = s % 3;
      for (std::size_t i = 0; i < 4 * n; ++i) {
        const double t = i * dt;
        const double K = p.K_traj[std::min(i, n)];
        const double y = m.f(k, K);
        const double cap = k / dt + y;
        const double c = cap * (kind == 0 ? u(rng) : kind == 1 ? share : (t < 2 * T * share ? 0.01 : 0.9));
        // Exact integral of e^{-rt} U(c) over the step for piecewise-constant c.
        const double g = std::exp(-m.r * t) * (1 - std::exp(-m.r * dt)) / m.r * m.U(c);
        if (i < n) J_T += g;
        J_4T += g;
        k = std::max(0.0, k + dt * (y - c));
      }
      worst = std::max(worst, J_4T - J_T);
    }
    // Doubling the horizon at fixed step, K frozen at its terminal value.
    LocationProblem wide = p;
    wide.grid = TimeGrid::uniform(2 * T, 2 * n + 1);
    wide.K_traj.assign(2 * n + 1, p.K_traj.back());
    const double dJ = std::abs(shoot(wide).objective - shoot(p).objective);
    ok = ok && worst <= phi && dJ <= phi;
    detail += fmt("[T=%g phi=%.2e: max J4T-JT %.2e, doubling change %.2e] ", T, phi, worst, dJ);
  }
  report(ok, "tail_bound", detail);
}

void regularization(const Economy& eco, const RunConfig& cfg) {
  const LocationProblem p = location_of(eco, k0_profile(cfg.k0, 0.5) * 0.5, cfg.location.K);
  const LocationPath base = shoot(p);
  std::vector<double> gaps;
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
    LocationProblem q = p;
    q.primitives.utility.shift = h;
    gaps.push_back(sup_gap(solve_shooting(q).c, base.c));
  }
  bool dec = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) dec = dec && gaps[i] < gaps[i - 1];
  report(dec && gaps.back() <= 1e-2, "regularization_convergence",
         fmt("c gaps %.2e %.2e %.2e %.2e (decreasing, last <=1e-2)", gaps[0], gaps[1], gaps[2], gaps[3]));
}

void continuity(const Economy& eco, std::uint64_t seed) {
  const SpaceTimeField K = initial_iterate(eco);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpaceTimeField eta(K.n_time(), K.n_space());
  for (double& v : eta.data()) v = u(rng);
  const BestResponse base = best_response(K, eco);
  const auto& psi = eco.op.kernel().psi;
  std::vector<double> dev;
  for (double e : {1e-1, 1e-2, 1e-3}) {
    SpaceTimeField Ke = K;
    for (std::size_t i = 0; i < Ke.data().size(); ++i)
      Ke.data()[i] = std::clamp(K.data()[i] + e * eta.data()[i], psi.lo, psi.hi);
    const BestResponse br = best_response(Ke, eco);
    dev.push_back(difference(br.k, base.k).sup_abs() + difference(br.c, base.c).sup_abs());
  }
  report(dev[0] > dev[1] && dev[1] > dev[2], "best_response_continuity",
         fmt("deviation %.2e / %.2e / %.2e for eps 1e-1 / 1e-2 / 1e-3", dev[0], dev[1], dev[2]));
}

double max_dynamics_defect(const EquilibriumState& st, const Economy& eco) {
  double worst = 0.0;
  const SpaceTimeField Kt = apply_S(st.k_field, eco.op);
  for (std::size_t j = 0; j < eco.op.size(); ++j) {
    LocationPath path;
    path.t = eco.time.nodes;
    path.k = st.k_field.column(j);
    path.c = st.c_field.column(j);
    worst = std::max(worst, max_flow_defect(path, eco.location_problem(Kt, j)));
  }
  return worst;
}

void decoupled() {
  const RunConfig cfg = load("decoupled.toml");
  const Economy eco = economy_of(cfg);
  EquilibriumOptions opts;
  opts.gamma = 1.0;
  opts.tol = cfg.solver.tol;
  opts.max_sweeps = 5;
  const auto t0 = Clock::now();
  const EquilibriumResult res = solve_equilibrium(eco, opts);
  const CertificationReport cert = equilibrium_residual(res.state, eco);
  const double dt = seconds_since(t0);
  const double flow = max_dynamics_defect(res.state, eco);
  const bool ok = res.converged && res.state.sweep_count == 1 && cert.consistency <= opts.tol &&
                  cert.dynamics <= 1e-6 && cert.euler <= 1e-6 && flow <= 1e-6 && dt <= 30.0;
  report(ok, "decoupled_equilibrium",
         fmt("%zux%zu, sweeps %d, consistency %.2e (<=%.0e), dynamics %.2e, euler %.2e, flow check %.2e "
             "(<=1e-6), %.1f s (<=30)",
             eco.op.size(), eco.time.size(), res.state.sweep_count, cert.consistency, opts.tol, cert.dynamics,
             cert.euler, flow, dt));
}

void symmetric() {
  const RunConfig cfg = load("symmetric.toml");
  const Economy eco = economy_of(cfg);
  EquilibriumOptions opts;
  opts.gamma = cfg.solver.gamma;
  opts.tol = cfg.solver.tol;
  opts.max_sweeps = static_cast<int>(cfg.solver.max_sweeps);
  const EquilibriumResult res = solve_equilibrium(eco, opts);
  double var = 0.0;
  for (std::size_t i = 0; i < res.state.K_field.n_time(); ++i) {
    const auto s = res.state.K_field.slice(i);
    var = std::max(var, *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()));
  }
  report(res.converged && var <= 1e-6 && eco.op.size() == 16, "symmetric_equilibrium",
         fmt("converged %s after %d sweeps, sup spatial variation %.2e (<=1e-6)", res.converged ? "yes" : "no",
             res.state.sweep_count, var));
}

void self_map() {
  const RunConfig cfg = load("canonical.toml");
  RunSummary sum;
  const Economy eco = economy_of(cfg, &sum);
  // Independent Schauder radius: L_S from the quadrature rows, doubling search.
  const auto& g = eco.op.grid();
  const auto& ker = eco.op.kernel();
  double L = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    double row = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l) row += g.weights[l] * std::abs(ker.w(std::abs(g.locations[j] - g.locations[l])));
    L = std::max(L, std::abs(ker.psi.b) * row);
  }
  const Ref m(eco.primitives);
  const double s0 = std::clamp(ker.psi.a, ker.psi.lo, ker.psi.hi);
  double M = std::ldexp(1.0, -64);
  while (!(L * std::max(eco.k0_sup(), std::pow(m.A * std::pow(M, m.beta) / m.delta, 1 / (1 - m.alpha))) + s0 < M))
    M *= 2;

  EquilibriumOptions opts;
  opts.gamma = cfg.solver.gamma;
  opts.tol = cfg.solver.tol;
  opts.max_sweeps = 50;
  const auto t0 = Clock::now();
  const EquilibriumResult res = solve_equilibrium(eco, opts);
  const CertificationReport cert = equilibrium_residual(res.state, eco);
  const double dt = seconds_since(t0);
  const auto& st = res.state;
  const double sup = *std::max_element(st.iterate_sup.begin(), st.iterate_sup.end());
  const double lo = *std::min_element(st.iterate_min.begin(), st.iterate_min.end());
  const double hi = *std::max_element(st.iterate_max.begin(), st.iterate_max.end());
  const bool in_Y0 = sup <= M && lo >= ker.psi.lo && hi <= ker.psi.hi;
  const bool ok = M == sum.schauder_M && in_Y0 && res.converged && cert.consistency <= 1e-4 &&
                  cert.dynamics <= 1e-3 && cert.euler <= 1e-2 && dt <= 600.0;
  report(ok, "self_map_and_certification",
         fmt("M=%g (library %g), %zu iterates with sup|K| %.3f, K in [%.3f, %.3f]; %d sweeps; residuals %.1e / "
             "%.1e / %.1e (<=1e-4/1e-3/1e-2); %.0f s (<=600)",
             M, sum.schauder_M, st.iterate_sup.size(), sup, lo, hi, st.sweep_count, cert.consistency,
             cert.dynamics, cert.euler, dt));
  const auto& h = st.residual_history;
  std::printf("      canonical residual contraction per sweep: %.4f\n",
              std::pow(h.back() / h.front(), 1.0 / static_cast<double>(h.size() - 1)));
}

void y_norm_axioms() {
  const TimeGrid t = TimeGrid::uniform(9.3, 94);
  bool exact = true;
  for (double v : {1.0, -0.25, 3.5}) exact = exact && y_norm(SpaceTimeField(94, 5, v), t) == 2.0 * std::abs(v);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z(0.0, 1.0);
  auto draw = [&] {
    SpaceTimeField f(94, 5);
    for (double& v : f.data()) v = z(rng) * std::exp(2 * z(rng));
    return f;
  };
  bool axioms = y_norm(SpaceTimeField(94, 5, 0.0), t) == 0.0;
  for (int n = 0; n < 200; ++n) {
    const SpaceTimeField a = draw(), b = draw(), c = draw();
    const double ab = y_norm(difference(a, b), t), bc = y_norm(difference(b, c), t), ac = y_norm(difference(a, c), t);
    axioms = axioms && ac <= (ab + bc) * (1 + 1e-14) && y_norm(a, t) > 0;
    SpaceTimeField s = a;
    const double lam = z(rng);
    for (double& v : s.data()) v *= lam;
    axioms = axioms && std::abs(y_norm(s, t) - std::abs(lam) * y_norm(a, t)) <= 1e-14 * y_norm(s, t) + 1e-300;
  }
  report(exact && axioms, "y_norm", fmt("constant fields exact: %s, axioms on 200 triples: %s", exact ? "yes" : "no",
                                        axioms ? "hold" : "violated"));
}

void path_properties() {
  double worst_defect = 0.0, k_min = INFINITY, c_min = INFINITY, worst_excess = -INFINITY;
  for (const Solved& s : solved) {
    const Ref m(s.prob.primitives);
    worst_defect = std::max(worst_defect, max_flow_defect(s.path, s.prob));
    k_min = std::min(k_min, *std::min_element(s.path.k.begin(), s.path.k.end()));
    c_min = std::min(c_min, *std::min_element(s.path.c.begin(), s.path.c.end()));
    double var = 0.0;
    for (std::size_t i = 0; i + 1 < s.path.k.size(); ++i) var += std::abs(s.path.k[i + 1] - s.path.k[i]);
    const double K_sup = *std::max_element(s.prob.K_traj.begin(), s.prob.K_traj.end());
    const double bound = s.prob.k0 + 2 * m.f_max(K_sup) * s.prob.grid.horizon + 1e-6;
    worst_excess = std::max(worst_excess, var - bound);
  }
  report(worst_defect <= 1e-6 && k_min > 0 && c_min > 0, "saturation_and_positivity",
         fmt("%zu paths, max dynamics defect %.2e (<=1e-6), min k %.3g, min c %.3g", solved.size(), worst_defect,
             k_min, c_min));
  report(worst_excess <= 0, "mass_bound",
         fmt("%zu paths, max (sum|dk| - k0 - 2 C1 T - 1e-6) = %.3g (<=0)", solved.size(), worst_excess));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  try {
    const RunConfig canonical = load("canonical.toml");
    const Economy eco = economy_of(canonical);
    y_norm_axioms();
    stationary(eco);
    oracle_equivalence();
    tail_bound(eco, canonical);
    regularization(eco, canonical);
    continuity(eco, canonical.seed);
    decoupled();
    symmetric();
    self_map();
    path_properties();
  } catch (const std::exception& e) {
    report(false, "suite", std::string("aborted: ") + e.what());
  }
  std::printf("%d failure(s), %.0f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
