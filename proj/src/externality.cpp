#include "sree/externality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sree {

double KernelShape::operator()(double d) const {
  switch (family) {
    case KernelFamily::uniform:
      return 1.0;
    case KernelFamily::gaussian:
      return std::exp(-d * d / (2.0 * length * length));
    case KernelFamily::mexican_hat:
      return std::exp(-d * d / (2.0 * length * length)) -
             inhibit_weight * std::exp(-d * d / (2.0 * inhibit_length * inhibit_length));
  }
  return 0.0;
}

double KernelShape::sup_abs() const {
  switch (family) {
    case KernelFamily::uniform:
    case KernelFamily::gaussian:
      return 1.0;
    case KernelFamily::mexican_hat:
      // |g1 - rho g2| <= max(g1, rho g2) for nonnegative g1, g2 <= 1.
      return std::max(1.0, inhibit_weight);
  }
  return 0.0;
}

double AffineClamp::operator()(double x) const { return std::min(std::max(a + b * x, lo), hi); }

double AffineClamp::lipschitz() const { return std::abs(b); }

std::vector<std::string> audit_kernel(const ExternalityKernel& kernel) {
  std::vector<std::string> errs;
  const auto& w = kernel.w;
  if (w.family != KernelFamily::uniform && !(w.length > 0.0))
    errs.push_back("kernel.length: kernel range must be positive");
  if (w.family == KernelFamily::mexican_hat) {
    if (!(w.inhibit_length > 0.0)) errs.push_back("kernel.inhibit_length: must be positive");
    if (!(w.inhibit_weight >= 0.0)) errs.push_back("kernel.inhibit_weight: must be nonnegative");
  }
  const auto& psi = kernel.psi;
  if (!(psi.lo > 0.0))
    errs.push_back("externality.interval: inf of the externality interval must be > 0 (got I_lo = " +
                   std::to_string(psi.lo) + ")");
  if (!(psi.hi >= psi.lo)) errs.push_back("externality.interval: I_hi must be >= I_lo");
  if (!std::isfinite(psi.a) || !std::isfinite(psi.b))
    errs.push_back("externality.psi: affine coefficients must be finite");
  if (!errs.empty()) return errs;

  // Range check of psi over a wide sample plus the limits.
  const double inf = std::numeric_limits<double>::infinity();
  bool range_ok = true;
  for (double x : {-inf, -1e12, -1e3, -1.0, 0.0, 1.0, 1e3, 1e12, inf}) {
    const double y = psi(x);
    if (!(y >= psi.lo && y <= psi.hi)) range_ok = false;
  }
  if (!range_ok) errs.push_back("externality.psi_range: psi must map into [I_lo, I_hi]");
  return errs;
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "uniform") return KernelFamily::uniform;
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "mexican_hat") return KernelFamily::mexican_hat;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::uniform:
      return "uniform";
    case KernelFamily::gaussian:
      return "gaussian";
    case KernelFamily::mexican_hat:
      return "mexican_hat";
  }
  return "unknown";
}

ExternalityOperator::ExternalityOperator(ExternalityKernel kernel, SpatialGrid grid)
    : kernel_(kernel), grid_(std::move(grid)) {
  const std::size_t n = grid_.size();
  matrix_.resize(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l)
      matrix_[j * n + l] =
          grid_.weights[l] * kernel_.w(grid_.distance(grid_.locations[j], grid_.locations[l]));
}

void ExternalityOperator::apply_slice(std::span<const double> k, std::span<double> out) const {
  const std::size_t n = size();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    const double* row = matrix_.data() + j * n;
    for (std::size_t l = 0; l < n; ++l) s += row[l] * k[l];
    out[j] = kernel_.psi(s);
  }
}

namespace {

void check_input(const SpaceTimeField& k_field, const ExternalityOperator& op) {
  if (k_field.n_space() != op.size()) throw std::invalid_argument("apply_S: location count mismatch");
  if (!k_field.all_finite()) throw std::invalid_argument("apply_S: non-finite capital field");
}

}  // namespace

SpaceTimeField apply_S(const SpaceTimeField& k_field, const ExternalityOperator& op) {
  check_input(k_field, op);
  const std::size_t nt = k_field.n_time();
  const std::size_t nz = op.size();
  SpaceTimeField out(nt, nz);
  const auto n_total = static_cast<std::ptrdiff_t>(nt * nz);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < n_total; ++idx) {
    const auto i = static_cast<std::size_t>(idx) / nz;
    const auto j = static_cast<std::size_t>(idx) % nz;
    const auto k = k_field.slice(i);
    double s = 0.0;
    for (std::size_t l = 0; l < nz; ++l) s += op.weight(j, l) * k[l];
    out(i, j) = op.kernel().psi(s);
  }
  return out;
}

SpaceTimeField apply_S_serial(const SpaceTimeField& k_field, const ExternalityOperator& op) {
  check_input(k_field, op);
  const auto& grid = op.grid();
  const auto& kernel = op.kernel();
  const std::size_t nt = k_field.n_time();
  const std::size_t nz = op.size();
  SpaceTimeField acc(nt, nz);
  for (std::size_t l = 0; l < nz; ++l) {
    for (std::size_t j = 0; j < nz; ++j) {
      const double wl = grid.weights[l] * kernel.w(grid.distance(grid.locations[j], grid.locations[l]));
      for (std::size_t i = 0; i < nt; ++i) acc(i, j) += wl * k_field(i, l);
    }
  }
  for (auto& v : acc.data()) v = kernel.psi(v);
  return acc;
}

double lipschitz_constant(const ExternalityOperator& op) {
  const std::size_t n = op.size();
  double row_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += std::abs(op.weight(j, l));
    row_max = std::max(row_max, s);
  }
  return op.kernel().psi.lipschitz() * row_max;
}

double sup_at_zero(const ExternalityOperator& op) {
  std::vector<double> zero(op.size(), 0.0);
  std::vector<double> out(op.size());
  op.apply_slice(zero, out);
  double s = 0.0;
  for (double v : out) s = std::max(s, std::abs(v));
  return s;
}

double schauder_bound_M(const ExternalityOperator& op, double k0_sup, const ProductionParams& p) {
  const double L = lipschitz_constant(op);
  const double s0 = sup_at_zero(op);
  for (int e = -64; e <= 64; ++e) {
    const double M = std::ldexp(1.0, e);
    if (L * std::max(k0_sup, k_bar(M, p)) + s0 < M) return M;
  }
  throw std::runtime_error("schauder_bound_M: no admissible bound below 2^64");
}

}  // namespace sree
