#include "sree/grids.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sree {

SpatialGrid SpatialGrid::uniform(std::size_t n, bool periodic) {
  if (n < 2) throw std::invalid_argument("SpatialGrid: need at least 2 locations");
  SpatialGrid g;
  g.periodic = periodic;
  g.locations.resize(n);
  g.weights.resize(n);
  if (periodic) {
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      g.locations[j] = h * static_cast<double>(j);
      g.weights[j] = h;
    }
  } else {
    const double h = 1.0 / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      g.locations[j] = h * static_cast<double>(j);
      g.weights[j] = h;
    }
    g.locations[n - 1] = 1.0;
    g.weights[0] = g.weights[n - 1] = 0.5 * h;
  }
  return g;
}

double SpatialGrid::distance(double z, double y) const {
  double d = std::abs(z - y);
  if (periodic) d = std::min(d, length() - d);
  return d;
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t node_count) {
  if (node_count < 2) throw std::invalid_argument("TimeGrid: need at least 2 nodes");
  if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
  TimeGrid g;
  g.horizon = horizon;
  const std::size_t n = node_count - 1;
  g.nodes.resize(node_count);
  g.steps.resize(n);
  for (std::size_t i = 0; i <= n; ++i) g.nodes[i] = horizon * static_cast<double>(i) / static_cast<double>(n);
  g.nodes[n] = horizon;
  for (std::size_t i = 0; i < n; ++i) g.steps[i] = g.nodes[i + 1] - g.nodes[i];
  return g;
}

TailBoundParams make_tail_params(double C1, double k0_sup, double sigma, double r) {
  TailBoundParams p;
  p.C1 = C1;
  p.Cbar0 = k0_sup;
  p.Cbar1 = C1;
  // Tangent at c = 1: U(1) - U'(1) = 1/(1 - sigma) - 1, slope U'(1) = 1.
  p.C3 = sigma / (1.0 - sigma);
  p.C4 = 1.0;
  p.r = r;
  return p;
}

double tail_bound_phi(double T, const TailBoundParams& p) {
  if (!(T > 0.0) || !(p.r > 0.0)) throw std::invalid_argument("tail_bound_phi: need T > 0 and r > 0");
  const double rT = p.r * T;
  double s0 = 0.0;  // sum_j exp(-rT (2^j - 1))
  double s1 = 0.0;  // sum_j exp(-rT (2^j - 1)) 2^j
  double pow2 = 1.0;
  bool decayed = false;
  for (int j = 0; j < 64; ++j) {
    const double e = std::exp(-rT * (pow2 - 1.0));
    const double t0 = e;
    const double t1 = e * pow2;
    s0 += t0;
    s1 += t1;
    if (t0 <= 1e-16 * s0 && t1 <= 1e-16 * s1) {
      decayed = true;
      break;
    }
    pow2 *= 2.0;
  }
  if (!decayed) throw std::runtime_error("tail_bound_phi: series did not decay within 64 terms");
  // Block [T_j, T_j+1) contributes exp(-r T_j) (C5 + C6 T_j+1) with T_j+1 = 2^(j+1) T.
  return std::exp(-rT) * (p.C5() * s0 + 2.0 * p.C6() * T * s1);
}

TimeGrid choose_horizon(double epsilon, const TailBoundParams& p, double T_min, std::size_t node_count) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("choose_horizon: epsilon must be positive");
  double T = T_min;
  while (tail_bound_phi(T, p) > epsilon) {
    T *= 2.0;
    if (!std::isfinite(T)) throw std::runtime_error("choose_horizon: horizon search overflowed");
  }
  return TimeGrid::uniform(T, node_count);
}

double quadrature_apply(std::span<const double> g, const SpatialGrid& grid) {
  if (g.size() != grid.size()) throw std::invalid_argument("quadrature_apply: length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += grid.weights[j] * g[j];
  return s;
}

}  // namespace sree
