#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sree/grids.hpp"
#include "sree/primitives.hpp"

namespace sree {

/// Single-location problem: maximize the discounted utility of consumption
/// given an exogenous externality trajectory K(t) on a truncated horizon.
struct LocationProblem {
  ModelPrimitives primitives;
  TimeGrid grid;
  std::vector<double> K_traj;  // one value per time node
  double k0 = 1.0;

  /// Linear interpolation of K_traj.
  double K_at(double t) const;
  double K_sup() const;
  /// Steady state of the frozen terminal externality; the truncated problem
  /// pins k(T) to its capital level.
  SteadyState terminal_steady_state() const;
  /// Constants of the a-priori and tail estimates for this problem.
  TailBoundParams tail_params() const;

  void validate() const;
};

struct LocationPath {
  std::vector<double> t;
  std::vector<double> k;
  std::vector<double> c;
  std::vector<double> theta;  // e^{-rt} U'(c)
  double objective = 0.0;     // discounted utility over [0, T]
  double tail_bound = 0.0;    // phi(T)
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { bracket_failure, blow_up, max_iterations, infeasible };

  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct EulerRates {
  double k_dot = 0.0;
  double c_dot = 0.0;
};

/// k' = f(k, K(t)) - c,  c' = (r - f_k) U'(c) / U''(c).
EulerRates euler_rhs(double k, double c, double t, const LocationProblem& prob);

struct ShootingOptions {
  double terminal_tol = 1e-10;  // relative to max(1, k_star)
  int max_doublings = 10;
  int max_bisections = 200;
  double agree_tol = 1e-9;  // trajectory agreement required to advance a segment
  double max_step = 0.25;   // RK4 substep cap within each grid interval
};

/// RK4 shooting on c(0) with the terminal pin k(T) = k_star(K(T)).
///
/// Long horizons are handled by restarting the bisection from the last node
/// at which the two bracketing trajectories still agree.
LocationPath solve_shooting(const LocationProblem& prob, const ShootingOptions& opts = {});

/// The discrete program behind the direct oracle.
///
/// Controls are log-consumption at the nodes of a refined grid; capital
/// follows the explicit trapezoid (Heun) map and the objective is the
/// trapezoid sum of e^{-rt} U(c). The terminal constraint k_N = k_star(K(T))
/// is enforced by a uniform shift of the log-controls (the retraction).
class DiscreteProgram {
 public:
  DiscreteProgram(const LocationProblem& prob, std::size_t refine);

  std::size_t size() const { return t_.size(); }
  std::size_t refine() const { return refine_; }
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& quadrature_weights() const { return w_; }
  double target() const { return target_; }

  /// Capital along the Heun map; false if capital leaves (0, inf).
  bool simulate(std::span<const double> c, std::vector<double>& k) const;

  double objective(std::span<const double> u) const;
  void objective_gradient(std::span<const double> u, std::span<double> grad) const;

  /// Terminal capital k_N(exp(u)); -inf when the path is infeasible.
  double terminal_capital(std::span<const double> u) const;
  /// Gradient of k_N with respect to u via the adjoint recursion. `costate`
  /// (optional, size N+1) receives d k_N / d k_i.
  void terminal_gradient(std::span<const double> u, std::span<double> grad,
                         std::vector<double>* costate = nullptr) const;

  /// Shifts u uniformly so that k_N = target. Returns the shift.
  double retract(std::vector<double>& u) const;

  /// Gradient of the objective restricted to the constraint (u must be
  /// retracted). `nu` receives the terminal multiplier.
  void reduced_gradient(std::span<const double> u, std::span<double> grad, double* nu = nullptr) const;

 private:
  LocationProblem prob_;
  std::size_t refine_;
  std::vector<double> t_, h_, w_, discount_, K_, AKb_;
  double target_ = 0.0;
};

struct OracleOptions {
  std::size_t refine = 0;  // 0: largest factor keeping the refined grid within max_fine_nodes
  std::size_t max_fine_nodes = 2001;
  double grad_tol = 1e-8;  // sup of gradient / discounted marginal utility
  int max_iterations = 20000;
  int memory = 12;
};

struct OracleResult {
  LocationPath path;             // sampled on the problem's time grid
  LocationPath fine_path;        // on the refined grid
  std::vector<double> multipliers;       // value-function gradient d V / d k at coarse nodes
  std::vector<double> fine_multipliers;
  double terminal_multiplier = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Slow reference solver: ascent on the discrete concave program in log-consumption.
OracleResult solve_direct_oracle(const LocationProblem& prob, const OracleOptions& opts = {},
                                 std::span<const double> initial_log_c = {});

struct RegularizationEntry {
  double h = 0.0;
  double c_gap = 0.0;          // sup |c^(h) - c|
  double objective_gap = 0.0;  // |J^(h) - J|
  double objective = 0.0;
};

struct RegularizationReport {
  std::vector<RegularizationEntry> entries;
  bool monotone = false;  // both gaps decrease, allowing 10% slack
  double final_gap = 0.0;
  bool passed = false;  // monotone and final c-gap below threshold
};

/// Re-solves with U(c + h) for each h and measures convergence to the h = 0 solution.
RegularizationReport h_regularization_sweep(const LocationProblem& prob, std::span<const double> h_list,
                                            double threshold = 1e-2, const ShootingOptions& opts = {});

struct ConsumptionBounds {
  double c_min = 0.0;
  double c_max = 0.0;
  bool positive = false;
  double variation = 0.0;   // sum |k_{i+1} - k_i|
  double mass_bound = 0.0;  // k0 + 2 C1 T
  bool mass_ok = false;
};

ConsumptionBounds check_consumption_bounds(const LocationPath& path, const LocationProblem& prob);

/// Per-step defect of k' = f(k, K) - c: |k_{i+1} - k(t_{i+1})| / dt, where
/// (k, c)(t) is a fine reference flow of the Euler system started at node i.
std::vector<double> dynamics_residuals(const LocationPath& path, const LocationProblem& prob);

/// Per-step defect of U''(c) c' = (r - f_k) U'(c): the same reference flow,
/// |U''(c_mid)| |c_{i+1} - c(t_{i+1})| / dt.
std::vector<double> euler_residuals(const LocationPath& path, const LocationProblem& prob);

/// Trapezoid discounted utility of a path on its own nodes.
double discounted_utility(std::span<const double> t, std::span<const double> c, const ModelPrimitives& prim);

}  // namespace sree
