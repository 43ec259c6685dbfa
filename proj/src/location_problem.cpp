#include <algorithm>
#include <cmath>

#include "sree/ramsey.hpp"

namespace sree {

double LocationProblem::K_at(double t) const {
  const auto& x = grid.nodes;
  if (t <= x.front()) return K_traj.front();
  if (t >= x.back()) return K_traj.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const auto i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double s = (t - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - s) * K_traj[i] + s * K_traj[i + 1];
}

double LocationProblem::K_sup() const { return *std::max_element(K_traj.begin(), K_traj.end()); }

SteadyState LocationProblem::terminal_steady_state() const {
  return steady_state(K_traj.back(), primitives.production, primitives.r);
}

TailBoundParams LocationProblem::tail_params() const {
  return make_tail_params(f_sup(K_sup(), primitives.production), k0, primitives.utility.sigma, primitives.r);
}

void LocationProblem::validate() const {
  if (K_traj.size() != grid.size()) throw std::invalid_argument("LocationProblem: K_traj length != time nodes");
  if (!(k0 > 0.0)) throw std::invalid_argument("LocationProblem: k0 must be positive");
  if (!(primitives.r > 0.0)) throw std::invalid_argument("LocationProblem: discount rate must be positive");
  for (double K : K_traj)
    if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("LocationProblem: K_traj must be positive");
}

EulerRates euler_rhs(double k, double c, double t, const LocationProblem& prob) {
  if (!(k > 0.0) || !(c > 0.0)) throw std::domain_error("euler_rhs: state left the positive quadrant");
  const auto& prim = prob.primitives;
  const double K = prob.K_at(t);
  EulerRates out;
  out.k_dot = eval_f(k, K, prim.production) - c;
  out.c_dot = (prim.r - eval_f_k(k, K, prim.production)) * eval_U_prime(c, prim.utility) /
              eval_U_second(c, prim.utility);
  return out;
}

double discounted_utility(std::span<const double> t, std::span<const double> c, const ModelPrimitives& prim) {
  double J = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double g0 = std::exp(-prim.r * t[i]) * eval_U(c[i], prim.utility);
    const double g1 = std::exp(-prim.r * t[i + 1]) * eval_U(c[i + 1], prim.utility);
    J += 0.5 * (t[i + 1] - t[i]) * (g0 + g1);
  }
  return J;
}

}  // namespace sree
