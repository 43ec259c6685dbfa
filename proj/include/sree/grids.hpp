#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sree {

/// Locations on the unit interval with trapezoid quadrature weights.
///
/// A periodic grid places n equispaced nodes on [0, 1) with equal weights 1/n
/// (the periodic trapezoid rule); a non-periodic grid places n nodes on [0, 1]
/// including both endpoints. Weights always sum to the domain length 1.
struct SpatialGrid {
  std::vector<double> locations;
  std::vector<double> weights;
  bool periodic = false;

  static SpatialGrid uniform(std::size_t n, bool periodic = false);

  std::size_t size() const { return locations.size(); }
  double length() const { return 1.0; }
  /// Distance between two locations, wrapping around when periodic.
  double distance(double z, double y) const;
};

/// Uniform time nodes 0 = t_0 < ... < t_N = horizon.
struct TimeGrid {
  double horizon = 0.0;
  std::vector<double> nodes;
  std::vector<double> steps;

  static TimeGrid uniform(double horizon, std::size_t node_count);

  std::size_t size() const { return nodes.size(); }
  std::size_t intervals() const { return steps.size(); }
};

/// Constants of the a-priori and tail estimates.
///
/// C1 bounds f along admissible paths, the consumption mass over [0, t] is at
/// most Cbar0 + Cbar1 t, and U(c) <= C3 + C4 c.
struct TailBoundParams {
  double C1 = 0.0;
  double Cbar0 = 0.0;
  double Cbar1 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double r = 0.0;

  double C5() const { return C4 * Cbar0; }
  double C6() const { return C3 + C4 * Cbar1; }
};

/// Assembles the tail constants for CRRA utility with curvature `sigma`,
/// output bound `C1` and initial capital bound `k0_sup`.
///
/// C3, C4 come from the tangent of U at c = 1; the consumption mass over
/// [0, t] is bounded by k0 + C1 t.
TailBoundParams make_tail_params(double C1, double k0_sup, double sigma, double r);

/// Upper bound on the discounted utility collected after time T by any
/// admissible path, summed over the dyadic blocks [2^j T, 2^(j+1) T).
double tail_bound_phi(double T, const TailBoundParams& p);

/// Smallest T = T_min 2^j with tail_bound_phi(T) <= epsilon, as a uniform grid.
TimeGrid choose_horizon(double epsilon, const TailBoundParams& p, double T_min, std::size_t node_count);

double quadrature_apply(std::span<const double> g, const SpatialGrid& grid);

}  // namespace sree
