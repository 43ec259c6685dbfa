#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sree/equilibrium.hpp"
#include "sree/ramsey.hpp"

namespace sree {

struct OracleComparison {
  double objective_rel_gap = 0.0;
  double path_gap = 0.0;  // sup over nodes of |k_s - k_o| and |c_s - c_o|
  bool passed = false;
};

OracleComparison compare_with_oracle(const LocationPath& shooting, const LocationPath& oracle,
                                     double objective_tol = 1e-4, double path_tol = 1e-3);

struct TailDominanceReport {
  std::size_t samples = 0;
  double phi = 0.0;
  double worst_tail = 0.0;  // max over paths of J_{4T} - J_T
  bool passed = false;
};

/// Draws random feasible explicit-Euler paths on [0, 4T] (same step as the
/// problem grid, K anywhere in [min K, sup K]) and compares their utility
/// collected after T with phi(T). Controls are piecewise constant, so J is
/// integrated exactly per step.
TailDominanceReport check_tail_dominance(const LocationProblem& prob, std::size_t samples, std::uint64_t seed);

struct HorizonDoublingReport {
  double objective_T = 0.0;
  double objective_2T = 0.0;
  double phi = 0.0;
  bool passed = false;
};

/// Re-solves on [0, 2T] at the same step, holding K at its terminal value.
HorizonDoublingReport check_horizon_doubling(const LocationProblem& prob, const ShootingOptions& opts = {});

struct ContinuityReport {
  std::vector<double> eps;
  std::vector<double> deviation;  // sup |k_eps - k| + sup |c_eps - c|
  bool monotone = false;
};

/// Best-response deviation under K + eps * eta for a seeded field eta with
/// entries in [-1, 1], clamped to the externality interval.
ContinuityReport check_best_response_continuity(const Economy& economy, const SpaceTimeField& K,
                                                std::span<const double> eps, std::uint64_t seed);

struct GradientCheckReport {
  int points = 0;
  double objective_rel_error = 0.0;
  double terminal_rel_error = 0.0;
  bool passed = false;
};

/// Adjoint gradients of the discrete oracle program versus central
/// differences at random log-consumption points.
GradientCheckReport check_oracle_gradient(const LocationProblem& prob, std::size_t refine, int points,
                                          std::uint64_t seed, double tol = 1e-5);

}  // namespace sree
