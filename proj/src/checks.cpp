#include "sree/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sree {

OracleComparison compare_with_oracle(const LocationPath& shooting, const LocationPath& oracle, double objective_tol,
                                     double path_tol) {
  if (shooting.k.size() != oracle.k.size()) throw std::invalid_argument("compare_with_oracle: grid mismatch");
  OracleComparison out;
  out.objective_rel_gap =
      std::abs(shooting.objective - oracle.objective) / std::max(1e-300, std::abs(oracle.objective));
  for (std::size_t i = 0; i < shooting.k.size(); ++i) {
    out.path_gap = std::max(out.path_gap, std::abs(shooting.k[i] - oracle.k[i]));
    out.path_gap = std::max(out.path_gap, std::abs(shooting.c[i] - oracle.c[i]));
  }
  out.passed = out.objective_rel_gap <= objective_tol && out.path_gap <= path_tol;
  return out;
}

TailDominanceReport check_tail_dominance(const LocationProblem& prob, std::size_t samples, std::uint64_t seed) {
  prob.validate();
  const auto& prim = prob.primitives;
  const auto& p = prim.production;
  const double T = prob.grid.horizon;
  const std::size_t n = prob.grid.intervals();
  const double dt = T / static_cast<double>(n);
  const double K_lo = *std::min_element(prob.K_traj.begin(), prob.K_traj.end());
  const double K_hi = prob.K_sup();
  const double step_weight = (1.0 - std::exp(-prim.r * dt)) / prim.r;

  TailDominanceReport rep;
  rep.samples = samples;
  rep.phi = tail_bound_phi(T, prob.tail_params());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const int style = static_cast<int>(s % 4);
    const double frac = unif(rng);
    const double switch_t = unif(rng) * 4.0 * T;
    double K = K_lo + (K_hi - K_lo) * unif(rng);
    double k = prob.k0;
    double tail = 0.0;
    for (std::size_t i = 0; i < 4 * n; ++i) {
      const double t = static_cast<double>(i) * dt;
      if (style == 3) K = std::clamp(K + 0.1 * (K_hi - K_lo) * (unif(rng) - 0.5), K_lo, K_hi);
      const double f = eval_f(k, K, p);
      const double cap = k / dt + f;  // keeps k_{i+1} >= 0
      double u = 0.0;
      switch (style) {
        case 0: u = unif(rng); break;
        case 1: u = frac; break;
        case 2: u = t < switch_t ? 0.05 * frac : 1.0 - 0.05 * unif(rng); break;
        default: u = std::sqrt(unif(rng)); break;
      }
      const double c = std::max(0.0, u * cap);
      if (t >= T - 1e-9 * dt) tail += std::exp(-prim.r * t) * step_weight * eval_U(c, prim.utility);
      k = std::max(0.0, k + dt * (f - c));
    }
    rep.worst_tail = std::max(rep.worst_tail, tail);
  }
  rep.passed = rep.worst_tail <= rep.phi;
  return rep;
}

HorizonDoublingReport check_horizon_doubling(const LocationProblem& prob, const ShootingOptions& opts) {
  HorizonDoublingReport rep;
  const LocationPath base = solve_shooting(prob, opts);
  LocationProblem wide = prob;
  const std::size_t n = prob.grid.intervals();
  wide.grid = TimeGrid::uniform(2.0 * prob.grid.horizon, 2 * n + 1);
  wide.K_traj = prob.K_traj;
  wide.K_traj.resize(2 * n + 1, prob.K_traj.back());
  const LocationPath longer = solve_shooting(wide, opts);
  rep.objective_T = base.objective;
  rep.objective_2T = longer.objective;
  rep.phi = base.tail_bound;
  rep.passed = std::abs(rep.objective_2T - rep.objective_T) <= rep.phi;
  return rep;
}

ContinuityReport check_best_response_continuity(const Economy& economy, const SpaceTimeField& K,
                                                std::span<const double> eps, std::uint64_t seed) {
  const auto& psi = economy.op.kernel().psi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SpaceTimeField eta(K.n_time(), K.n_space());
  for (double& v : eta.data()) v = unif(rng);
  const BestResponse base = best_response(K, economy);
  ContinuityReport rep;
  for (double e : eps) {
    SpaceTimeField Ke = K;
    auto kd = Ke.data();
    auto ed = eta.data();
    for (std::size_t i = 0; i < kd.size(); ++i) kd[i] = std::clamp(kd[i] + e * ed[i], psi.lo, psi.hi);
    const BestResponse br = best_response(Ke, economy);
    rep.eps.push_back(e);
    rep.deviation.push_back(difference(br.k, base.k).sup_abs() + difference(br.c, base.c).sup_abs());
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.eps.size(); ++i) {
    const bool shrinking = rep.eps[i] < rep.eps[i - 1];
    if (shrinking != (rep.deviation[i] < rep.deviation[i - 1])) rep.monotone = false;
  }
  return rep;
}

namespace {

double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

}  // namespace

GradientCheckReport check_oracle_gradient(const LocationProblem& prob, std::size_t refine, int points,
                                          std::uint64_t seed, double tol) {
  const DiscreteProgram dp(prob, refine);
  const std::size_t n = dp.size();
  const SteadyState ss = prob.terminal_steady_state();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.2);
  GradientCheckReport rep;
  std::vector<double> u(n), g(n), gk(n), fd(n), fdk(n);
  for (int pt = 0; pt < points; ++pt) {
    // Draw until the path stays feasible; scaling consumption down always helps.
    double scale = std::log(0.5 * ss.c_star);
    for (int tries = 0;; ++tries) {
      for (auto& x : u) x = scale + noise(rng);
      if (std::isfinite(dp.terminal_capital(u))) break;
      scale -= 0.5;
      if (tries > 50) throw SolverError(SolverError::Kind::infeasible, "check_oracle_gradient: no feasible point");
    }
    dp.objective_gradient(u, g);
    dp.terminal_gradient(u, gk);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-6;
      const double keep = u[i];
      u[i] = keep + h;
      const double jp = dp.objective(u), kp = dp.terminal_capital(u);
      u[i] = keep - h;
      const double jm = dp.objective(u), km = dp.terminal_capital(u);
      u[i] = keep;
      fd[i] = (jp - jm) / (2.0 * h);
      fdk[i] = (kp - km) / (2.0 * h);
    }
    rep.objective_rel_error = std::max(rep.objective_rel_error, rel_error(g, fd));
    rep.terminal_rel_error = std::max(rep.terminal_rel_error, rel_error(gk, fdk));
    ++rep.points;
  }
  rep.passed = rep.objective_rel_error <= tol && rep.terminal_rel_error <= tol;
  return rep;
}

}  // namespace sree
