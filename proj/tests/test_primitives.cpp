#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "sree/primitives.hpp"

using namespace sree;

namespace {

// Root of f_k(., K) = r by plain bisection; independent of the closed form.
double bisect_k_star(double K, const ProductionParams& p, double r) {
  double lo = 1e-12, hi = 1e6;
  for (int i = 0; i < 400; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double fk = p.alpha * p.A * std::pow(mid, p.alpha - 1.0) * std::pow(K, p.beta) - p.delta;
    (fk > r ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("production values and derivatives") {
  const ProductionParams p;
  CHECK(eval_f(0.0, 2.0, p) == 0.0);
  const double k = 3.0, K = 1.7, h = 1e-5;
  CHECK(eval_f(k, K, p) == doctest::Approx(std::pow(k, 0.3) * std::pow(K, 0.2) - 0.05 * k).epsilon(1e-14));
  CHECK(eval_f_k(k, K, p) ==
        doctest::Approx((eval_f(k + h, K, p) - eval_f(k - h, K, p)) / (2 * h)).epsilon(1e-8));
  CHECK(eval_f_kk(k, K, p) ==
        doctest::Approx((eval_f_k(k + h, K, p) - eval_f_k(k - h, K, p)) / (2 * h)).epsilon(1e-7));
  CHECK_THROWS_AS(eval_f(-1.0, 1.0, p), std::domain_error);
  CHECK_THROWS_AS(eval_f(1.0, -1.0, p), std::domain_error);
}

TEST_CASE("steady state matches an independent bisection") {
  const ProductionParams p;
  for (double K : {0.5, 1.0, 3.0, 10.0}) {
    const SteadyState ss = steady_state(K, p, 0.03);
    CHECK(ss.k_star == doctest::Approx(bisect_k_star(K, p, 0.03)).epsilon(1e-10));
    CHECK(ss.c_star == doctest::Approx(eval_f(ss.k_star, K, p)).epsilon(1e-12));
    CHECK(ss.K_ref == K);
  }
  CHECK(steady_state(1.0, p, 0.03).k_star == doctest::Approx(6.607614).epsilon(1e-6));
}

TEST_CASE("k_bar and f_sup") {
  const ProductionParams p;
  for (double M : {0.5, 1.0, 8.0}) {
    const double kb = k_bar(M, p);
    CHECK(std::abs(eval_f(kb, M, p)) < 1e-10 * kb);
    CHECK(eval_f(1.01 * kb, M, p) < 0.0);
    const double fs = f_sup(M, p);
    // f_sup dominates a dense scan.
    double best = 0.0;
    for (int i = 1; i < 20000; ++i) best = std::max(best, eval_f(kb * i / 20000.0, M, p));
    CHECK(fs >= best);
    CHECK(fs == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("concavity: tangent lines lie above f") {
  const ProductionParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int n = 0; n < 500; ++n) {
    const double k = u(rng), x = u(rng), K = 0.5 + u(rng) / 10;
    CHECK(eval_f(x, K, p) <= eval_f(k, K, p) + eval_f_k(k, K, p) * (x - k) + 1e-12);
  }
}

TEST_CASE("utility") {
  const UtilityParams u{0.5, 0.0};
  CHECK(eval_U(0.0, u) == 0.0);
  CHECK(eval_U(4.0, u) == doctest::Approx(4.0));
  CHECK(eval_U_prime(4.0, u) == doctest::Approx(0.5));
  CHECK(eval_U_second(4.0, u) == doctest::Approx(-0.0625));
  for (double c : {1e-3, 0.7, 12.0}) CHECK(inverse_U_prime(eval_U_prime(c, u), u) == doctest::Approx(c).epsilon(1e-12));
  const UtilityParams shifted{0.5, 0.25};
  CHECK(eval_U(0.0, shifted) == doctest::Approx(1.0));
  CHECK_THROWS(eval_U(-0.5, u));
}

TEST_CASE("assumption audits") {
  CHECK(audit_production({}, 0.5, 10.0).empty());
  CHECK(audit_utility({0.5, 0.0}).empty());
  CHECK(audit_utility({0.1, 0.0}).empty());
  CHECK(!audit_utility({1.0, 0.0}).empty());
  CHECK(!audit_utility({1.5, 0.0}).empty());

  ProductionParams bad;
  bad.alpha = 0.7;
  bad.beta = 0.4;
  const auto msgs = audit_production(bad, 0.5, 10.0);
  REQUIRE(!msgs.empty());
  CHECK(msgs.front().find("alpha + beta") != std::string::npos);

  ProductionParams no_depr;
  no_depr.delta = 0.0;
  CHECK(!audit_production(no_depr, 0.5, 10.0).empty());

  CHECK(!audit_production({}, 0.0, 10.0).empty());
  ProductionParams flat;
  flat.beta = 0.0;
  CHECK(audit_production(flat, 0.5, 10.0).empty());
}
