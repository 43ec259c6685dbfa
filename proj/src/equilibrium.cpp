#include "sree/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sree {

double Economy::k0_sup() const { return *std::max_element(k0.begin(), k0.end()); }

LocationProblem Economy::location_problem(const SpaceTimeField& K, std::size_t j) const {
  LocationProblem prob;
  prob.primitives = primitives;
  prob.grid = time;
  prob.K_traj = K.column(j);
  prob.k0 = k0[j];
  return prob;
}

double y_norm(const SpaceTimeField& field, const TimeGrid& time) {
  if (field.n_time() != time.size()) throw std::invalid_argument("y_norm: time length mismatch");
  if (!field.all_finite()) throw std::invalid_argument("y_norm: non-finite field");
  const std::size_t nt = field.n_time();
  std::vector<double> running(nt);  // sup over [0, t_i] x D
  double s = 0.0;
  for (std::size_t i = 0; i < nt; ++i) {
    for (double v : field.slice(i)) s = std::max(s, std::abs(v));
    running[i] = s;
  }
  const auto m_top = static_cast<long>(std::ceil(time.horizon));
  double total = 0.0;
  double weight = 1.0;
  std::size_t i = 0;
  for (long m = 0; m <= m_top; ++m) {
    const double tm = static_cast<double>(m);
    while (i + 1 < nt && time.nodes[i + 1] <= tm * (1.0 + 1e-14)) ++i;
    total += weight * running[i];
    weight *= 0.5;
  }
  // Slabs m > ceil(T) all see the full sup; their weights sum to 2^{-ceil(T)}.
  return total + 2.0 * weight * running[nt - 1];
}

namespace {

void solve_location(const SpaceTimeField& K, const Economy& economy, std::size_t j, BestResponse& out) {
  const LocationProblem prob = economy.location_problem(K, j);
  const LocationPath path =
      economy.use_oracle ? solve_direct_oracle(prob, economy.oracle).path : solve_shooting(prob, economy.shooting);
  out.k.set_column(j, path.k);
  out.c.set_column(j, path.c);
}

}  // namespace

BestResponse best_response(const SpaceTimeField& K, const Economy& economy, Exec exec) {
  const std::size_t nt = K.n_time();
  const std::size_t nz = K.n_space();
  if (nz != economy.op.size() || nt != economy.time.size())
    throw std::invalid_argument("best_response: field shape does not match the economy");
  BestResponse out{SpaceTimeField(nt, nz), SpaceTimeField(nt, nz), {}};
  std::vector<std::string> errors(nz);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(nz); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      try {
        solve_location(K, economy, j, out);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  } else {
    for (std::size_t j = 0; j < nz; ++j) {
      try {
        solve_location(K, economy, j, out);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  }
  for (std::size_t j = 0; j < nz; ++j)
    if (!errors[j].empty())
      throw SolverError(SolverError::Kind::blow_up, "location " + std::to_string(j) + ": " + errors[j]);
  out.K_sharp = exec == Exec::parallel ? apply_S(out.k, economy.op) : apply_S_serial(out.k, economy.op);
  return out;
}

SpaceTimeField initial_iterate(const Economy& economy) {
  SpaceTimeField k(economy.time.size(), economy.op.size());
  for (std::size_t i = 0; i < k.n_time(); ++i)
    for (std::size_t j = 0; j < k.n_space(); ++j) k(i, j) = economy.k0[j];
  return apply_S(k, economy.op);
}

EquilibriumResult solve_equilibrium(const Economy& economy, const EquilibriumOptions& opts) {
  if (!(opts.gamma > 0.0 && opts.gamma <= 1.0)) throw std::invalid_argument("solve_equilibrium: gamma must lie in (0,1]");
  const auto& psi = economy.op.kernel().psi;
  EquilibriumResult res;
  auto& st = res.state;
  SpaceTimeField K = opts.initial ? *opts.initial : initial_iterate(economy);
  for (;;) {
    st.iterate_sup.push_back(K.sup_abs());
    st.iterate_min.push_back(K.min());
    st.iterate_max.push_back(K.max());
    BestResponse br = best_response(K, economy, opts.exec);
    const double r = y_norm(difference(br.K_sharp, K), economy.time);
    st.residual_history.push_back(r);
    const bool stop = r <= opts.tol || st.sweep_count >= opts.max_sweeps;
    if (stop) {
      res.converged = r <= opts.tol;
      res.final_residual = r;
      st.K_field = std::move(K);
      st.k_field = std::move(br.k);
      st.c_field = std::move(br.c);
      break;
    }
    auto kd = K.data();
    auto sd = br.K_sharp.data();
    for (std::size_t n = 0; n < kd.size(); ++n)
      kd[n] = std::clamp((1.0 - opts.gamma) * kd[n] + opts.gamma * sd[n], psi.lo, psi.hi);
    ++st.sweep_count;
  }
  const auto& h = st.residual_history;
  const std::size_t w = opts.plateau_window;
  res.plateau = !res.converged && h.size() > w && h.back() >= 0.95 * h[h.size() - 1 - w];
  res.euler_residual = equilibrium_residual(st, economy).euler;
  return res;
}

CertificationReport equilibrium_residual(const EquilibriumState& state, const Economy& economy) {
  CertificationReport rep;
  const SpaceTimeField K_tilde = apply_S(state.k_field, economy.op);
  rep.consistency = difference(state.K_field, K_tilde).sup_abs();
  for (std::size_t j = 0; j < K_tilde.n_space(); ++j) {
    const LocationProblem prob = economy.location_problem(K_tilde, j);
    LocationPath path;
    path.t = economy.time.nodes;
    path.k = state.k_field.column(j);
    path.c = state.c_field.column(j);
    for (double v : dynamics_residuals(path, prob)) rep.dynamics = std::max(rep.dynamics, v);
    for (double v : euler_residuals(path, prob)) rep.euler = std::max(rep.euler, v);
  }
  return rep;
}

}  // namespace sree
