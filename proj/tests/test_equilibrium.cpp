#include <cmath>
#include <random>

#include "doctest.h"
#include "sree/equilibrium.hpp"

using namespace sree;

namespace {

Economy small_economy(KernelFamily fam, double beta, std::size_t nz, bool periodic, bool uniform_k0) {
  ExternalityKernel ker;
  ker.w.family = fam;
  ModelPrimitives prim;
  prim.production.beta = beta;
  std::vector<double> k0(nz);
  const SpatialGrid g = SpatialGrid::uniform(nz, periodic);
  for (std::size_t j = 0; j < nz; ++j) k0[j] = uniform_k0 ? 4.0 : 3.0 + 4.0 * g.locations[j];
  return Economy{prim, ExternalityOperator(ker, g), TimeGrid::uniform(60.0, 121), k0, {}, false, {}};
}

}  // namespace

TEST_CASE("y_norm closed forms") {
  const TimeGrid t = TimeGrid::uniform(7.5, 31);
  CHECK(y_norm(SpaceTimeField(31, 3, 1.0), t) == 2.0);
  CHECK(y_norm(SpaceTimeField(31, 3, -2.5), t) == 5.0);
  CHECK(y_norm(SpaceTimeField(31, 3, 0.0), t) == 0.0);
  // A spike at t in (m-1, m] enters every slab from m on: weight 2^{1-m}.
  SpaceTimeField spike(31, 3, 0.0);
  spike(12, 1) = 1.0;  // t = 3.0
  CHECK(y_norm(spike, t) == doctest::Approx(0.25));
}

TEST_CASE("y_norm axioms on random triples") {
  const TimeGrid t = TimeGrid::uniform(12.0, 49);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  auto draw = [&] {
    SpaceTimeField f(49, 4);
    for (double& v : f.data()) v = z(rng) * std::exp(z(rng));
    return f;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const SpaceTimeField a = draw(), b = draw(), c = draw();
    SpaceTimeField ab = a, bc = b;
    for (std::size_t n = 0; n < ab.data().size(); ++n) {
      ab.data()[n] += b.data()[n];
      bc.data()[n] += c.data()[n];
    }
    const double na = y_norm(a, t), nb = y_norm(b, t);
    CHECK(na > 0.0);
    CHECK(y_norm(ab, t) <= (na + nb) * (1 + 1e-14));
    CHECK(y_norm(difference(a, c), t) <= (y_norm(difference(a, b), t) + y_norm(difference(b, c), t)) * (1 + 1e-14));
    SpaceTimeField scaled = a;
    for (double& v : scaled.data()) v *= -3.0;
    CHECK(y_norm(scaled, t) == doctest::Approx(3.0 * na).epsilon(1e-14));
  }
  SpaceTimeField bad(49, 4, 0.0);
  bad(3, 2) = std::nan("");
  CHECK_THROWS(y_norm(bad, t));
}

TEST_CASE("parallel and serial best responses are identical") {
  const Economy eco = small_economy(KernelFamily::gaussian, 0.2, 6, false, false);
  const SpaceTimeField K = initial_iterate(eco);
  const BestResponse a = best_response(K, eco, Exec::parallel);
  const BestResponse b = best_response(K, eco, Exec::serial);
  CHECK(difference(a.k, b.k).sup_abs() == 0.0);
  CHECK(difference(a.c, b.c).sup_abs() == 0.0);
  CHECK(difference(a.K_sharp, b.K_sharp).sup_abs() <= 1e-14);
}

TEST_CASE("coupled economy converges and certifies") {
  const Economy eco = small_economy(KernelFamily::gaussian, 0.2, 6, false, false);
  const EquilibriumResult res = solve_equilibrium(eco);
  CHECK(res.converged);
  CHECK(res.final_residual <= 1e-9);
  CHECK(res.state.residual_history.size() == static_cast<std::size_t>(res.state.sweep_count) + 1);
  for (std::size_t i = 1; i < res.state.residual_history.size(); ++i)
    CHECK(res.state.residual_history[i] < res.state.residual_history[i - 1]);
  const CertificationReport cert = equilibrium_residual(res.state, eco);
  CHECK(cert.certified());
  CHECK(res.state.K_field.min() >= 0.5);
}

TEST_CASE("decoupled economy settles after one sweep") {
  const Economy eco = small_economy(KernelFamily::gaussian, 0.0, 6, false, false);
  EquilibriumOptions opts;
  opts.gamma = 1.0;
  const EquilibriumResult res = solve_equilibrium(eco, opts);
  CHECK(res.converged);
  CHECK(res.state.sweep_count == 1);
  CHECK(res.final_residual == 0.0);
}

TEST_CASE("symmetric economy stays spatially constant") {
  const Economy eco = small_economy(KernelFamily::uniform, 0.2, 8, true, true);
  const EquilibriumResult res = solve_equilibrium(eco);
  CHECK(res.converged);
  for (std::size_t i = 0; i < res.state.K_field.n_time(); ++i) {
    const auto s = res.state.K_field.slice(i);
    CHECK(*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()) <= 1e-12);
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  const Economy eco = small_economy(KernelFamily::gaussian, 0.2, 4, false, false);
  EquilibriumOptions opts;
  opts.max_sweeps = 2;
  opts.gamma = 0.1;
  const EquilibriumResult res = solve_equilibrium(eco, opts);
  CHECK(!res.converged);
  CHECK(res.state.sweep_count == 2);
  CHECK(res.state.residual_history.size() == 3);
  opts.gamma = 0.0;
  CHECK_THROWS(solve_equilibrium(eco, opts));
}

TEST_CASE("certification detects a perturbed externality field") {
  const Economy eco = small_economy(KernelFamily::gaussian, 0.2, 6, false, false);
  const EquilibriumResult res = solve_equilibrium(eco);
  const CertificationReport clean = equilibrium_residual(res.state, eco);
  EquilibriumState bad = res.state;
  bad.K_field(40, 3) += 0.1;
  const CertificationReport dirty = equilibrium_residual(bad, eco);
  CHECK(dirty.consistency >= 0.1 - clean.consistency);
  CHECK(dirty.consistency > clean.consistency);
}
