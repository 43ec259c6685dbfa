#pragma once

#include <string>
#include <vector>

namespace sree {

/// Net output f(k, K) = A k^alpha K^beta - delta k (Cobb-Douglas minus depreciation).
struct ProductionParams {
  double A = 1.0;
  double alpha = 0.3;
  double beta = 0.2;
  double delta = 0.05;
};

/// CRRA utility U(c) = (c + shift)^(1 - sigma) / (1 - sigma) with sigma in (0, 1).
///
/// `shift` is the regularization parameter h of U^(h)(c) = U(c + h); it is
/// zero for the actual problem.
struct UtilityParams {
  double sigma = 0.5;
  double shift = 0.0;
};

/// Primitives shared by every location: production, utility and discount rate.
struct ModelPrimitives {
  ProductionParams production;
  UtilityParams utility;
  double r = 0.03;
};

struct SteadyState {
  double k_star = 0.0;
  double c_star = 0.0;
  double K_ref = 0.0;
};

double eval_f(double k, double K, const ProductionParams& p);
double eval_f_k(double k, double K, const ProductionParams& p);
double eval_f_kk(double k, double K, const ProductionParams& p);

/// Capital level beyond which f(k, K) <= 0 for every K <= M.
double k_bar(double M, const ProductionParams& p);

/// Maximum of f(., K) over k >= 0, attained where f_k = 0.
double f_sup(double K, const ProductionParams& p);

/// Stationary point of the Euler system for a frozen externality: f_k(k*, K) = r.
SteadyState steady_state(double K_ref, const ProductionParams& p, double r);

double eval_U(double c, const UtilityParams& u);
double eval_U_prime(double c, const UtilityParams& u);
double eval_U_second(double c, const UtilityParams& u);
double inverse_U_prime(double m, const UtilityParams& u);

/// Numerical audit of the structural assumptions on f over a log grid of
/// (k, K). Returns one message per violated item; empty means accepted.
std::vector<std::string> audit_production(const ProductionParams& p, double I_lo,
                                          double I_hi);

std::vector<std::string> audit_utility(const UtilityParams& u);

}  // namespace sree
