#include <algorithm>
#include <cmath>
#include <sstream>

#include "sree/ramsey.hpp"

namespace sree {

namespace {

// Which side of the saddle path a trial c(0) lies on.
enum class Side { low, high };

struct Trajectory {
  std::vector<double> k, c, J;
  std::size_t reached = 0;  // last node holding a valid state
  bool complete = false;
  Side side = Side::low;
  double gap = 0.0;  // k(T) - target, when complete
};

struct Rates {
  double k, c, j;
};

class Integrator {
 public:
  Integrator(const LocationProblem& prob, double max_step) : prob_(prob) {
    const auto& p = prob.primitives.production;
    const auto& x = prob.grid.nodes;
    const std::size_t n = x.size();
    // Substep points per interval, with the A K^beta factor at every substep
    // node and midpoint (K interpolated linearly).
    first_.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dt = x[i + 1] - x[i];
      const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(dt / max_step - 1e-9)));
      first_[i] = AKb_.size();
      for (std::size_t s = 0; s < 2 * m; ++s) {
        const double w = static_cast<double>(s) / static_cast<double>(2 * m);
        AKb_.push_back(p.A * std::pow((1.0 - w) * prob.K_traj[i] + w * prob.K_traj[i + 1], p.beta));
      }
    }
    first_[n - 1] = AKb_.size();
    AKb_.push_back(p.A * std::pow(prob.K_traj[n - 1], p.beta));
    // Blow-up thresholds: k outside (1e-10, 10 k_bar), c outside (1e-12, 1e10).
    k_max_ = 10.0 * k_bar(prob.K_sup(), p);
  }

  std::size_t intervals() const { return first_.size() - 1; }

  void run(std::size_t start, double k, double c, double J, double target, Trajectory& tr) const {
    const std::size_t n = intervals();
    tr.k.resize(n + 1);
    tr.c.resize(n + 1);
    tr.J.resize(n + 1);
    tr.k[start] = k;
    tr.c[start] = c;
    tr.J[start] = J;
    tr.complete = false;
    tr.reached = start;
    Side side = Side::low;
    if (!admissible(k, c, side)) {
      tr.side = side;
      return;
    }
    const auto& t = prob_.grid.nodes;
    for (std::size_t i = start; i < n; ++i) {
      const std::size_t m = (first_[i + 1] - first_[i]) / 2;
      const double h = (t[i + 1] - t[i]) / static_cast<double>(m);
      for (std::size_t s = 0; s < m; ++s) {
        const std::size_t q = first_[i] + 2 * s;
        const double t0 = t[i] + static_cast<double>(s) * h;
        Rates d1{}, d2{}, d3{}, d4{};
        if (!rates(k, c, AKb_[q], t0, d1, side) ||
            !rates(k + 0.5 * h * d1.k, c + 0.5 * h * d1.c, AKb_[q + 1], t0 + 0.5 * h, d2, side) ||
            !rates(k + 0.5 * h * d2.k, c + 0.5 * h * d2.c, AKb_[q + 1], t0 + 0.5 * h, d3, side) ||
            !rates(k + h * d3.k, c + h * d3.c, AKb_[q + 2], t0 + h, d4, side)) {
          tr.side = side;
          return;
        }
        k += h / 6.0 * (d1.k + 2.0 * d2.k + 2.0 * d3.k + d4.k);
        c += h / 6.0 * (d1.c + 2.0 * d2.c + 2.0 * d3.c + d4.c);
        J += h / 6.0 * (d1.j + 2.0 * d2.j + 2.0 * d3.j + d4.j);
        if (!admissible(k, c, side)) {
          tr.side = side;
          return;
        }
      }
      tr.k[i + 1] = k;
      tr.c[i + 1] = c;
      tr.J[i + 1] = J;
      tr.reached = i + 1;
    }
    tr.complete = true;
    tr.gap = k - target;
    tr.side = tr.gap > 0.0 ? Side::low : Side::high;
  }

 private:
  bool admissible(double k, double c, Side& side) const {
    if (!(k > 1e-10) || !(c < 1e10)) {
      side = Side::high;  // capital exhausted or consumption exploding
      return false;
    }
    if (!(c > 1e-12) || !(k < k_max_)) {
      side = Side::low;
      return false;
    }
    return true;
  }

  bool rates(double k, double c, double AKb, double t, Rates& d, Side& side) const {
    if (!admissible(k, c, side)) return false;
    const auto& prim = prob_.primitives;
    const auto& p = prim.production;
    const auto& u = prim.utility;
    const double ka = std::pow(k, p.alpha);
    const double f = AKb * ka - p.delta * k;
    const double fk = p.alpha * AKb * ka / k - p.delta;
    d.k = f - c;
    // U'/U'' = -(c + h) / sigma for CRRA.
    d.c = -(c + u.shift) / u.sigma * (prim.r - fk);
    d.j = std::exp(-prim.r * t) * std::pow(c + u.shift, 1.0 - u.sigma) / (1.0 - u.sigma);
    return true;
  }

  const LocationProblem& prob_;
  std::vector<std::size_t> first_;
  std::vector<double> AKb_;
  double k_max_ = 0.0;
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

}  // namespace

LocationPath solve_shooting(const LocationProblem& prob, const ShootingOptions& opts) {
  prob.validate();
  const auto& prim = prob.primitives;
  const auto& p = prim.production;
  if (!(opts.max_step > 0.0)) throw std::invalid_argument("solve_shooting: max_step must be positive");
  const Integrator integ(prob, opts.max_step);
  const std::size_t n = integ.intervals();
  const double target = prob.terminal_steady_state().k_star;
  const double tol = opts.terminal_tol * std::max(1.0, target);
  const double K_sup = prob.K_sup();

  std::vector<double> k(n + 1), c(n + 1), J(n + 1);
  k[0] = prob.k0;
  J[0] = 0.0;

  auto commit = [&](const Trajectory& tr, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i <= to; ++i) {
      k[i] = tr.k[i];
      c[i] = tr.c[i];
      J[i] = tr.J[i];
    }
  };

  std::size_t start = 0;
  bool done = false;
  Trajectory lo_tr, hi_tr, tr;
  while (!done) {
    const double k_s = k[start];
    const double J_s = J[start];
    double c_hi = eval_f(k_s, K_sup, p) + (prim.r + p.delta) * k_s;
    double c_lo = 0.0;
    bool have_lo = false;

    integ.run(start, k_s, c_hi, J_s, target, hi_tr);
    int doublings = 0;
    while (hi_tr.side == Side::low) {
      if (hi_tr.complete && std::abs(hi_tr.gap) <= tol) break;
      c_lo = c_hi;
      std::swap(lo_tr, hi_tr);
      have_lo = true;
      if (++doublings > opts.max_doublings) {
        std::ostringstream os;
        os << "solve_shooting: no over-consuming bracket at node " << start << " after " << opts.max_doublings
           << " doublings (c_hi = " << c_hi << ")";
        throw SolverError(SolverError::Kind::bracket_failure, os.str());
      }
      c_hi *= 2.0;
      integ.run(start, k_s, c_hi, J_s, target, hi_tr);
    }
    if (hi_tr.complete && std::abs(hi_tr.gap) <= tol) {
      commit(hi_tr, start, n);
      break;
    }

    for (int it = 0; it < opts.max_bisections; ++it) {
      const double mid = c_lo + 0.5 * (c_hi - c_lo);
      if (!(mid > c_lo && mid < c_hi)) break;
      integ.run(start, k_s, mid, J_s, target, tr);
      if (tr.complete && std::abs(tr.gap) <= tol) {
        commit(tr, start, n);
        done = true;
        break;
      }
      if (tr.side == Side::high) {
        c_hi = mid;
        std::swap(hi_tr, tr);
      } else {
        c_lo = mid;
        std::swap(lo_tr, tr);
        have_lo = true;
      }
    }
    if (done) break;

    // Bracket exhausted: keep the prefix on which both sides agree and restart there.
    if (!have_lo)
      throw SolverError(SolverError::Kind::blow_up,
                        "solve_shooting: every tested consumption level exhausts capital at node " +
                            std::to_string(start));
    const std::size_t limit = std::min(lo_tr.reached, hi_tr.reached);
    std::size_t j = start;
    while (j < limit && close(lo_tr.k[j + 1], hi_tr.k[j + 1], opts.agree_tol) &&
           close(lo_tr.c[j + 1], hi_tr.c[j + 1], opts.agree_tol))
      ++j;
    if (j == start) {
      std::ostringstream os;
      os << "solve_shooting: bracketing trajectories separate immediately at node " << start
         << " (t = " << prob.grid.nodes[start] << "); horizon or grid misconfigured";
      throw SolverError(SolverError::Kind::blow_up, os.str());
    }
    commit(lo_tr, start, j);
    if (j == n) break;
    start = j;
  }

  LocationPath path;
  path.t = prob.grid.nodes;
  path.k = std::move(k);
  path.c = std::move(c);
  path.theta.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    path.theta[i] = std::exp(-prim.r * path.t[i]) * eval_U_prime(path.c[i], prim.utility);
  path.objective = J[n];
  path.tail_bound = tail_bound_phi(prob.grid.horizon, prob.tail_params());
  return path;
}

}  // namespace sree
