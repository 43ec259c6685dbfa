#pragma once

#include <optional>
#include <vector>

#include "sree/externality.hpp"
#include "sree/field.hpp"
#include "sree/ramsey.hpp"

namespace sree {

enum class Exec { serial, parallel };

/// Everything a best response needs: primitives, spatial operator, time grid
/// and initial capital per location.
struct Economy {
  ModelPrimitives primitives;
  ExternalityOperator op;
  TimeGrid time;
  std::vector<double> k0;
  ShootingOptions shooting;
  bool use_oracle = false;
  OracleOptions oracle;

  double k0_sup() const;
  /// Single-location problem facing location j under externality field K.
  LocationProblem location_problem(const SpaceTimeField& K, std::size_t j) const;
};

/// Weighted sup-norm sum_m 2^{-m} sup_{[0,m] x D} |y|, with slabs beyond the
/// horizon carrying the terminal sup (closed-form geometric tail).
double y_norm(const SpaceTimeField& field, const TimeGrid& time);

struct BestResponse {
  SpaceTimeField k;
  SpaceTimeField c;
  SpaceTimeField K_sharp;
};

/// Solves every location against the frozen field K, then applies S.
BestResponse best_response(const SpaceTimeField& K, const Economy& economy, Exec exec = Exec::parallel);

struct EquilibriumOptions {
  double gamma = 0.5;
  double tol = 1e-9;
  int max_sweeps = 50;
  Exec exec = Exec::parallel;
  std::optional<SpaceTimeField> initial;
  std::size_t plateau_window = 10;
};

struct EquilibriumState {
  SpaceTimeField K_field;
  SpaceTimeField k_field;
  SpaceTimeField c_field;
  std::vector<double> residual_history;
  int sweep_count = 0;
  // Per evaluated iterate: sup |K| and the range of K.
  std::vector<double> iterate_sup;
  std::vector<double> iterate_min;
  std::vector<double> iterate_max;
};

struct EquilibriumResult {
  EquilibriumState state;
  bool converged = false;
  bool plateau = false;
  double final_residual = 0.0;
  double euler_residual = 0.0;
};

/// S applied to k0 held constant in time.
SpaceTimeField initial_iterate(const Economy& economy);

/// Damped Picard iteration K <- (1 - gamma) K + gamma T(K), projected onto the
/// externality interval, until y_norm(T(K) - K) <= tol.
EquilibriumResult solve_equilibrium(const Economy& economy, const EquilibriumOptions& opts = {});

struct CertificationReport {
  double consistency = 0.0;  // sup |K - S(k)|
  double dynamics = 0.0;     // sup dynamics defect under S(k)
  double euler = 0.0;        // sup Euler defect under S(k)

  bool certified(double tol_consistency = 1e-4, double tol_dynamics = 1e-3, double tol_euler = 1e-2) const {
    return consistency <= tol_consistency && dynamics <= tol_dynamics && euler <= tol_euler;
  }
};

CertificationReport equilibrium_residual(const EquilibriumState& state, const Economy& economy);

}  // namespace sree
