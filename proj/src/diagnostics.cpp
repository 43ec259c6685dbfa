#include <algorithm>
#include <cmath>
#include <limits>

#include "sree/ramsey.hpp"

namespace sree {

ConsumptionBounds check_consumption_bounds(const LocationPath& path, const LocationProblem& prob) {
  ConsumptionBounds b;
  b.c_min = *std::min_element(path.c.begin(), path.c.end());
  b.c_max = *std::max_element(path.c.begin(), path.c.end());
  b.positive = b.c_min > 0.0;
  for (std::size_t i = 0; i + 1 < path.k.size(); ++i) b.variation += std::abs(path.k[i + 1] - path.k[i]);
  const double C1 = f_sup(prob.K_sup(), prob.primitives.production);
  b.mass_bound = prob.k0 + 2.0 * C1 * prob.grid.horizon;
  b.mass_ok = b.variation <= b.mass_bound + 1e-6;
  return b;
}

namespace {

struct State {
  double k, c;
  bool ok;
};

State slope(double k, double c, double t, const LocationProblem& prob) {
  const auto& prim = prob.primitives;
  if (!(k > 0.0) || !(c + prim.utility.shift > 0.0)) return {0.0, 0.0, false};
  const double K = prob.K_at(t);
  const double fk = eval_f_k(k, K, prim.production);
  return {eval_f(k, K, prim.production) - c, -(c + prim.utility.shift) / prim.utility.sigma * (prim.r - fk), true};
}

// Reference flow of the (k, c) system over step i from the node state.
State reference_flow(const LocationPath& path, const LocationProblem& prob, std::size_t i) {
  const double t0 = path.t[i];
  const double dt = path.t[i + 1] - t0;
  const auto m = static_cast<std::size_t>(std::max(64.0, std::ceil(dt / 0.005)));
  const double h = dt / static_cast<double>(m);
  double k = path.k[i], c = path.c[i];
  for (std::size_t s = 0; s < m; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    const State d1 = slope(k, c, t, prob);
    if (!d1.ok) return {0.0, 0.0, false};
    const State d2 = slope(k + 0.5 * h * d1.k, c + 0.5 * h * d1.c, t + 0.5 * h, prob);
    if (!d2.ok) return {0.0, 0.0, false};
    const State d3 = slope(k + 0.5 * h * d2.k, c + 0.5 * h * d2.c, t + 0.5 * h, prob);
    if (!d3.ok) return {0.0, 0.0, false};
    const State d4 = slope(k + h * d3.k, c + h * d3.c, t + h, prob);
    if (!d4.ok) return {0.0, 0.0, false};
    k += h / 6.0 * (d1.k + 2.0 * d2.k + 2.0 * d3.k + d4.k);
    c += h / 6.0 * (d1.c + 2.0 * d2.c + 2.0 * d3.c + d4.c);
  }
  return {k, c, true};
}

}  // namespace

std::vector<double> dynamics_residuals(const LocationPath& path, const LocationProblem& prob) {
  std::vector<double> out(path.t.size() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const State s = reference_flow(path, prob, i);
    out[i] = s.ok ? std::abs(path.k[i + 1] - s.k) / (path.t[i + 1] - path.t[i])
                  : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<double> euler_residuals(const LocationPath& path, const LocationProblem& prob) {
  std::vector<double> out(path.t.size() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const State s = reference_flow(path, prob, i);
    if (!s.ok || !(path.c[i + 1] > 0.0)) {
      out[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double c_mid = 0.5 * (path.c[i] + path.c[i + 1]);
    out[i] = std::abs(eval_U_second(c_mid, prob.primitives.utility)) * std::abs(path.c[i + 1] - s.c) /
             (path.t[i + 1] - path.t[i]);
  }
  return out;
}

RegularizationReport h_regularization_sweep(const LocationProblem& prob, std::span<const double> h_list,
                                            double threshold, const ShootingOptions& opts) {
  const LocationPath base = solve_shooting(prob, opts);
  RegularizationReport rep;
  for (double h : h_list) {
    if (!(h >= 0.0)) throw std::invalid_argument("h_regularization_sweep: h must be nonnegative");
    LocationProblem reg = prob;
    reg.primitives.utility.shift = h;
    const LocationPath path = h == 0.0 ? base : solve_shooting(reg, opts);
    RegularizationEntry e;
    e.h = h;
    e.objective = path.objective;
    e.objective_gap = std::abs(path.objective - base.objective);
    for (std::size_t i = 0; i < path.c.size(); ++i) e.c_gap = std::max(e.c_gap, std::abs(path.c[i] - base.c[i]));
    rep.entries.push_back(e);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    if (rep.entries[i].c_gap > 1.1 * rep.entries[i - 1].c_gap) rep.monotone = false;
    if (rep.entries[i].objective_gap > 1.1 * rep.entries[i - 1].objective_gap) rep.monotone = false;
  }
  rep.final_gap = rep.entries.empty() ? 0.0 : rep.entries.back().c_gap;
  rep.passed = rep.monotone && rep.final_gap <= threshold;
  return rep;
}

}  // namespace sree
