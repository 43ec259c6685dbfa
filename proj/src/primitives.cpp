#include "sree/primitives.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sree {

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double eval_f(double k, double K, const ProductionParams& p) {
  if (!(k >= 0.0)) throw std::domain_error("eval_f: negative capital " + fmt(k));
  if (!(K > 0.0)) throw std::domain_error("eval_f: nonpositive externality " + fmt(K));
  if (k == 0.0) return 0.0;
  return p.A * std::pow(k, p.alpha) * std::pow(K, p.beta) - p.delta * k;
}

double eval_f_k(double k, double K, const ProductionParams& p) {
  if (!(k > 0.0)) throw std::domain_error("eval_f_k: capital must be positive, got " + fmt(k));
  if (!(K > 0.0)) throw std::domain_error("eval_f_k: nonpositive externality " + fmt(K));
  return p.A * p.alpha * std::pow(k, p.alpha - 1.0) * std::pow(K, p.beta) - p.delta;
}

double eval_f_kk(double k, double K, const ProductionParams& p) {
  if (!(k > 0.0)) throw std::domain_error("eval_f_kk: capital must be positive, got " + fmt(k));
  if (!(K > 0.0)) throw std::domain_error("eval_f_kk: nonpositive externality " + fmt(K));
  return p.A * p.alpha * (p.alpha - 1.0) * std::pow(k, p.alpha - 2.0) * std::pow(K, p.beta);
}

double k_bar(double M, const ProductionParams& p) {
  return std::pow(p.A * std::pow(M, p.beta) / p.delta, 1.0 / (1.0 - p.alpha));
}

double f_sup(double K, const ProductionParams& p) {
  const double k_hat = std::pow(p.A * p.alpha * std::pow(K, p.beta) / p.delta, 1.0 / (1.0 - p.alpha));
  return eval_f(k_hat, K, p);
}

SteadyState steady_state(double K_ref, const ProductionParams& p, double r) {
  if (!(r + p.delta > 0.0)) throw std::domain_error("steady_state: r + delta must be positive");
  if (!(K_ref > 0.0)) throw std::domain_error("steady_state: nonpositive externality");
  SteadyState s;
  s.K_ref = K_ref;
  s.k_star = std::pow(p.A * p.alpha * std::pow(K_ref, p.beta) / (r + p.delta), 1.0 / (1.0 - p.alpha));
  s.c_star = eval_f(s.k_star, K_ref, p);
  return s;
}

double eval_U(double c, const UtilityParams& u) {
  if (!(c >= 0.0)) throw std::domain_error("eval_U: negative consumption " + fmt(c));
  return std::pow(c + u.shift, 1.0 - u.sigma) / (1.0 - u.sigma);
}

double eval_U_prime(double c, const UtilityParams& u) {
  if (!(c + u.shift > 0.0)) throw std::domain_error("eval_U_prime: marginal utility unbounded at " + fmt(c));
  return std::pow(c + u.shift, -u.sigma);
}

double eval_U_second(double c, const UtilityParams& u) {
  if (!(c + u.shift > 0.0)) throw std::domain_error("eval_U_second: undefined at " + fmt(c));
  return -u.sigma * std::pow(c + u.shift, -u.sigma - 1.0);
}

double inverse_U_prime(double m, const UtilityParams& u) {
  if (!(m > 0.0)) throw std::domain_error("inverse_U_prime: marginal utility must be positive, got " + fmt(m));
  return std::pow(m, -1.0 / u.sigma) - u.shift;
}

std::vector<std::string> audit_production(const ProductionParams& p, double I_lo, double I_hi) {
  std::vector<std::string> errs;
  if (!(p.A > 0.0)) errs.push_back("production.A: productivity must be positive (got " + fmt(p.A) + ")");
  if (!(p.alpha > 0.0 && p.alpha < 1.0))
    errs.push_back("production.alpha: own-capital elasticity must lie in (0,1) (got " + fmt(p.alpha) + ")");
  if (!(p.beta >= 0.0 && p.beta < 1.0))
    errs.push_back("production.beta: externality elasticity must lie in [0,1) (got " + fmt(p.beta) + ")");
  if (!(p.alpha + p.beta < 1.0))
    errs.push_back("production.elasticity_sum: alpha + beta must be < 1 (got " + fmt(p.alpha + p.beta) + ")");
  if (!(p.delta > 0.0)) errs.push_back("production.delta: depreciation must be positive (got " + fmt(p.delta) + ")");
  if (!(I_lo > 0.0))
    errs.push_back("production.positivity_near_zero: inf of the externality interval must be > 0 (got " +
                   fmt(I_lo) + ")");
  if (!(I_hi >= I_lo)) errs.push_back("externality.interval: I_hi must be >= I_lo");
  if (!errs.empty()) return errs;

  const auto grid = log_grid(1e-6, 1e6, 25);
  bool zero_ok = true, slope_ok = true, concave_ok = true, bound_ok = true, pos_ok = true;
  for (double K : grid) {
    if (eval_f(0.0, K, p) != 0.0) zero_ok = false;
    for (double k : grid) {
      if (eval_f_k(k, K, p) < -p.delta) slope_ok = false;
      if (!(eval_f_kk(k, K, p) < 0.0)) concave_ok = false;
    }
  }
  for (double M : grid) {
    const double kb = k_bar(M, p);
    for (double K : {M, 0.5 * M, 1e-3 * M}) {
      for (double scale : {1.0, 2.0, 10.0, 1e3}) {
        const double k = kb * scale;
        const double tol = 1e-12 * (p.delta * k + 1.0);
        if (eval_f(k, K, p) > tol) bound_ok = false;
      }
    }
  }
  if (!(k_bar(1e6, p) / 1e6 < k_bar(1e3, p) / 1e3)) bound_ok = false;

  // Any K in the interval is at least I_lo, so k_bar(I_lo) is a valid k1.
  const double k1 = k_bar(I_lo, p);
  const double K_top = std::isfinite(I_hi) ? I_hi : 1e6;
  for (double K : {I_lo, std::sqrt(I_lo * K_top), K_top}) {
    for (double k : grid) {
      if (k >= k1) break;
      if (!(eval_f(k, K, p) > 0.0)) pos_ok = false;
    }
  }

  if (!zero_ok) errs.push_back("production.zero_at_origin: f(0,K) must vanish");
  if (!slope_ok) errs.push_back("production.slope_floor: f_k >= -delta violated");
  if (!bound_ok) errs.push_back("production.eventual_nonpositivity: f(k,K) <= 0 for k >= k_bar(M) violated");
  if (!pos_ok) errs.push_back("production.positivity_near_zero: f(k,K) > 0 for k < k1 violated");
  if (!concave_ok) errs.push_back("production.strict_concavity: f_kk < 0 violated");
  return errs;
}

std::vector<std::string> audit_utility(const UtilityParams& u) {
  std::vector<std::string> errs;
  if (!(u.sigma > 0.0 && u.sigma < 1.0)) {
    errs.push_back("utility.sigma: CRRA curvature must lie in (0,1) so that U >= 0 (got " + fmt(u.sigma) + ")");
    return errs;
  }
  if (!(u.shift >= 0.0)) errs.push_back("utility.shift: regularization must be nonnegative");
  if (u.shift == 0.0) {
    if (eval_U(0.0, u) != 0.0) errs.push_back("utility.origin: U(0) must be 0");
    if (!(eval_U_prime(1e-12, u) > 2.0)) errs.push_back("utility.inada_zero: U'(0+) must be unbounded");
  }
  if (!(eval_U_prime(1e12, u) < 0.5)) errs.push_back("utility.inada_infinity: U'(inf) must vanish");
  return errs;
}

}  // namespace sree
