#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "sree/ramsey.hpp"

namespace sree {

DiscreteProgram::DiscreteProgram(const LocationProblem& prob, std::size_t refine) : prob_(prob), refine_(refine) {
  prob.validate();
  if (refine == 0) throw std::invalid_argument("DiscreteProgram: refine must be >= 1");
  const auto& x = prob.grid.nodes;
  const std::size_t n_coarse = prob.grid.intervals();
  const std::size_t n = n_coarse * refine;
  t_.resize(n + 1);
  K_.resize(n + 1);
  for (std::size_t i = 0; i < n_coarse; ++i) {
    for (std::size_t m = 0; m < refine; ++m) {
      const double s = static_cast<double>(m) / static_cast<double>(refine);
      t_[i * refine + m] = x[i] + s * (x[i + 1] - x[i]);
      K_[i * refine + m] = (1.0 - s) * prob.K_traj[i] + s * prob.K_traj[i + 1];
    }
  }
  t_[n] = x.back();
  K_[n] = prob.K_traj.back();
  h_.resize(n);
  for (std::size_t i = 0; i < n; ++i) h_[i] = t_[i + 1] - t_[i];
  w_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    w_[i] += 0.5 * h_[i];
    w_[i + 1] += 0.5 * h_[i];
  }
  const auto& p = prob.primitives.production;
  discount_.resize(n + 1);
  AKb_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    discount_[i] = std::exp(-prob.primitives.r * t_[i]);
    AKb_[i] = p.A * std::pow(K_[i], p.beta);
  }
  target_ = prob.terminal_steady_state().k_star;
}

bool DiscreteProgram::simulate(std::span<const double> c, std::vector<double>& k) const {
  const auto& p = prob_.primitives.production;
  const std::size_t n = h_.size();
  k.resize(n + 1);
  k[0] = prob_.k0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = AKb_[i] * std::pow(k[i], p.alpha) - p.delta * k[i] - c[i];
    const double kt = k[i] + h_[i] * a;
    if (!(kt > 0.0)) return false;
    const double b = AKb_[i + 1] * std::pow(kt, p.alpha) - p.delta * kt - c[i + 1];
    k[i + 1] = k[i] + 0.5 * h_[i] * (a + b);
    if (!(k[i + 1] > 0.0) || !std::isfinite(k[i + 1])) return false;
  }
  return true;
}

double DiscreteProgram::objective(std::span<const double> u) const {
  const auto& util = prob_.primitives.utility;
  double J = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) J += w_[i] * discount_[i] * eval_U(std::exp(u[i]), util);
  return J;
}

void DiscreteProgram::objective_gradient(std::span<const double> u, std::span<double> grad) const {
  const auto& util = prob_.primitives.utility;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = std::exp(u[i]);
    grad[i] = w_[i] * discount_[i] * eval_U_prime(c, util) * c;
  }
}

double DiscreteProgram::terminal_capital(std::span<const double> u) const {
  std::vector<double> c(u.size()), k;
  for (std::size_t i = 0; i < u.size(); ++i) c[i] = std::exp(u[i]);
  if (!simulate(c, k)) return -std::numeric_limits<double>::infinity();
  return k.back();
}

void DiscreteProgram::terminal_gradient(std::span<const double> u, std::span<double> grad,
                                        std::vector<double>* costate) const {
  const auto& p = prob_.primitives.production;
  const std::size_t n = h_.size();
  std::vector<double> c(n + 1), k;
  for (std::size_t i = 0; i <= n; ++i) c[i] = std::exp(u[i]);
  if (!simulate(c, k)) throw SolverError(SolverError::Kind::infeasible, "terminal_gradient: infeasible controls");
  std::fill(grad.begin(), grad.end(), 0.0);
  double lambda = 1.0;  // d k_N / d k_{i+1}
  if (costate) costate->assign(n + 1, 0.0);
  if (costate) (*costate)[n] = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    const double h = h_[i];
    const double ka = std::pow(k[i], p.alpha);
    const double fk = p.alpha * AKb_[i] * ka / k[i] - p.delta;
    const double a = AKb_[i] * ka - p.delta * k[i] - c[i];
    const double kt = k[i] + h * a;
    const double fkt = p.alpha * AKb_[i + 1] * std::pow(kt, p.alpha) / kt - p.delta;
    grad[i] += lambda * (-0.5 * h * (1.0 + h * fkt));
    grad[i + 1] += lambda * (-0.5 * h);
    lambda *= 1.0 + 0.5 * h * (fk + fkt * (1.0 + h * fk));
    if (costate) (*costate)[i] = lambda;
  }
  for (std::size_t i = 0; i <= n; ++i) grad[i] *= c[i];
}

double DiscreteProgram::retract(std::vector<double>& u) const {
  auto gap_at = [&](double s) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + s;
    return terminal_capital(v) - target_;
  };
  // gap(s) is decreasing in s; -inf marks infeasible (too much consumption).
  double s = 0.0;
  double g = gap_at(s);
  double s_lo = -std::numeric_limits<double>::infinity(), s_hi = std::numeric_limits<double>::infinity();
  int guard = 0;
  while (g > 0.0) {
    s_lo = s;
    s += 1.0;
    g = gap_at(s);
    if (++guard > 200) throw SolverError(SolverError::Kind::infeasible, "retract: cannot consume enough");
  }
  s_hi = s;
  guard = 0;
  if (!std::isfinite(s_lo)) {
    s = s_hi;
    while (!(g > 0.0)) {
      s_hi = s;
      s -= 1.0;
      g = gap_at(s);
      if (++guard > 60)
        throw SolverError(SolverError::Kind::infeasible,
                          "retract: terminal capital unreachable even with vanishing consumption");
    }
    s_lo = s;
  }
  const double tol = 1e-13 * std::max(1.0, target_);
  s = 0.5 * (s_lo + s_hi);
  std::vector<double> v(u.size()), grad(u.size());
  double s_best = s_lo, g_best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + s;
    g = terminal_capital(v) - target_;
    if (std::isfinite(g) && std::abs(g) < g_best) {
      s_best = s;
      g_best = std::abs(g);
    }
    if (std::isfinite(g) && std::abs(g) <= tol) break;
    if (g > 0.0)
      s_lo = s;
    else
      s_hi = s;
    if (s_hi - s_lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))) break;
    double next = 0.5 * (s_lo + s_hi);
    if (std::isfinite(g)) {
      terminal_gradient(v, grad);
      const double slope = std::accumulate(grad.begin(), grad.end(), 0.0);
      if (slope < 0.0) {
        const double newton = s - g / slope;
        if (newton > s_lo && newton < s_hi) next = newton;
      }
    }
    s = next;
  }
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += s_best;
  return s_best;
}

void DiscreteProgram::reduced_gradient(std::span<const double> u, std::span<double> grad, double* nu) const {
  std::vector<double> gk(u.size());
  objective_gradient(u, grad);
  terminal_gradient(u, gk);
  const double sj = std::accumulate(grad.begin(), grad.end(), 0.0);
  const double sk = std::accumulate(gk.begin(), gk.end(), 0.0);
  const double mult = -sj / sk;
  for (std::size_t i = 0; i < u.size(); ++i) grad[i] += mult * gk[i];
  if (nu) *nu = mult;
}

namespace {

double sup_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

OracleResult solve_direct_oracle(const LocationProblem& prob, const OracleOptions& opts,
                                 std::span<const double> initial_log_c) {
  prob.validate();
  const std::size_t n_coarse = prob.grid.intervals();
  std::size_t refine = opts.refine;
  if (refine == 0) refine = std::max<std::size_t>(1, (opts.max_fine_nodes - 1) / n_coarse);
  if (n_coarse * refine + 1 > 5001)
    throw std::invalid_argument("solve_direct_oracle: refined grid exceeds 5000 intervals");
  const DiscreteProgram prog(prob, refine);
  const std::size_t n = prog.size();
  const auto& prim = prob.primitives;
  const auto& util = prim.utility;
  const auto& w = prog.quadrature_weights();
  const auto& t = prog.times();

  std::vector<double> u(n);
  if (!initial_log_c.empty()) {
    if (initial_log_c.size() != n) throw std::invalid_argument("solve_direct_oracle: initial guess size mismatch");
    std::copy(initial_log_c.begin(), initial_log_c.end(), u.begin());
  } else {
    const double c0 = prob.terminal_steady_state().c_star;
    std::fill(u.begin(), u.end(), std::log(c0));
  }
  prog.retract(u);

  // Minimize phi = -F with L-BFGS directions in the metric of the diagonal
  // curvature w e^{-rt} |U''(c)| c^2.
  auto value = [&](std::span<const double> x) { return -prog.objective(x); };
  auto gradient = [&](std::span<const double> x, std::vector<double>& g) {
    g.resize(n);
    prog.reduced_gradient(x, g);
    for (auto& v : g) v = -v;
  };
  auto precond = [&](std::span<const double> x, std::vector<double>& d) {
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::exp(x[i]);
      d[i] = 1.0 / (w[i] * std::exp(-prim.r * t[i]) * std::abs(eval_U_second(c, util)) * c * c);
    }
  };

  // Stationarity in current-value terms: each gradient entry relative to the
  // discounted marginal utility it carries, so late nodes are not ignored.
  auto foc_norm = [&](std::span<const double> x, std::span<const double> gx) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::exp(x[i]);
      m = std::max(m, std::abs(gx[i]) / (w[i] * std::exp(-prim.r * t[i]) * eval_U_prime(c, util) * c));
    }
    return m;
  };

  std::vector<double> g, d, dir(n), u_new(n), g_new;
  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  double f = value(u);
  gradient(u, g);
  int it = 0;
  int stalls = 0;
  double gnorm = foc_norm(u, g);
  for (; it < opts.max_iterations && gnorm > opts.grad_tol; ++it) {
    precond(u, d);
    // Two-loop recursion with diagonal initial inverse Hessian.
    std::vector<double> q = g;
    std::vector<double> alpha(S.size());
    for (std::size_t m = S.size(); m-- > 0;) {
      alpha[m] = rho[m] * dot(S[m], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[m] * Y[m][i];
    }
    double scale = 1.0;
    if (!S.empty()) {
      const auto& y = Y.back();
      double yDy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yDy += y[i] * d[i] * y[i];
      scale = dot(S.back(), y) / yDy;
    }
    for (std::size_t i = 0; i < n; ++i) dir[i] = scale * d[i] * q[i];
    for (std::size_t m = 0; m < S.size(); ++m) {
      const double beta = rho[m] * dot(Y[m], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += S[m][i] * (alpha[m] - beta);
    }
    for (auto& v : dir) v = -v;
    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -d[i] * g[i];
      slope = dot(g, dir);
    }
    // Cap the first trial step at one unit of log-consumption.
    double step = std::min(1.0, 1.0 / std::max(1e-300, sup_norm(dir)));
    if (!S.empty()) step = 1.0;
    bool accepted = false;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) u_new[i] = u[i] + step * dir[i];
      try {
        prog.retract(u_new);
        f_new = value(u_new);
      } catch (const SolverError&) {
        step *= 0.5;
        continue;
      }
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Decrease below rounding of f: accept if the gradient improved.
      if (std::abs(f_new - f) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f)) {
        gradient(u_new, g_new);
        if (foc_norm(u_new, g_new) < gnorm) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (++stalls > 3 || S.empty()) break;
      S.clear();
      Y.clear();
      rho.clear();
      continue;
    }
    stalls = 0;
    gradient(u_new, g_new);
    std::vector<double> s_vec(n), y_vec(n);
    for (std::size_t i = 0; i < n; ++i) {
      s_vec[i] = u_new[i] - u[i];
      y_vec[i] = g_new[i] - g[i];
    }
    const double sy = dot(s_vec, y_vec);
    if (sy > 1e-16 * std::sqrt(dot(s_vec, s_vec) * dot(y_vec, y_vec))) {
      S.push_back(std::move(s_vec));
      Y.push_back(std::move(y_vec));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    u.swap(u_new);
    g.swap(g_new);
    f = f_new;
    gnorm = foc_norm(u, g);
  }
  if (gnorm > opts.grad_tol) {
    std::ostringstream os;
    os << "solve_direct_oracle: relative stationarity residual " << gnorm << " above " << opts.grad_tol << " after " << it
       << " iterations";
    throw SolverError(SolverError::Kind::max_iterations, os.str());
  }

  OracleResult res;
  res.iterations = it;
  res.grad_norm = gnorm;
  std::vector<double> c(n), k, gk(n), costate;
  for (std::size_t i = 0; i < n; ++i) c[i] = std::exp(u[i]);
  prog.simulate(c, k);
  std::vector<double> tmp(n);
  prog.reduced_gradient(u, tmp, &res.terminal_multiplier);
  prog.terminal_gradient(u, gk, &costate);

  auto& fp = res.fine_path;
  fp.t = t;
  fp.k = k;
  fp.c = c;
  fp.theta.resize(n);
  res.fine_multipliers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fp.theta[i] = std::exp(-prim.r * t[i]) * eval_U_prime(c[i], util);
    res.fine_multipliers[i] = res.terminal_multiplier * costate[i];
  }
  fp.objective = prog.objective(u);
  fp.tail_bound = tail_bound_phi(prob.grid.horizon, prob.tail_params());

  auto& cp = res.path;
  cp.t = prob.grid.nodes;
  cp.objective = fp.objective;
  cp.tail_bound = fp.tail_bound;
  for (std::size_t i = 0; i <= n_coarse; ++i) {
    const std::size_t f_idx = i * refine;
    cp.k.push_back(fp.k[f_idx]);
    cp.c.push_back(fp.c[f_idx]);
    cp.theta.push_back(fp.theta[f_idx]);
    res.multipliers.push_back(res.fine_multipliers[f_idx]);
  }
  return res;
}

}  // namespace sree
