#pragma once

#include <string>
#include <vector>

#include "sree/field.hpp"
#include "sree/grids.hpp"
#include "sree/primitives.hpp"

namespace sree {

enum class KernelFamily { uniform, gaussian, mexican_hat };

/// Distance-response function w(z, y) = w(|z - y|).
///
/// uniform:     w = 1
/// gaussian:    w = exp(-d^2 / 2 l^2)
/// mexican_hat: w = exp(-d^2 / 2 l^2) - rho exp(-d^2 / 2 l2^2)   (spillover minus congestion)
struct KernelShape {
  KernelFamily family = KernelFamily::gaussian;
  double length = 0.2;
  double inhibit_length = 0.4;
  double inhibit_weight = 0.5;

  double operator()(double distance) const;
  double sup_abs() const;
};

/// psi(x) = min(max(a + b x, lo), hi).
struct AffineClamp {
  double a = 0.5;
  double b = 0.1;
  double lo = 0.5;
  double hi = 10.0;

  double operator()(double x) const;
  double lipschitz() const;
};

struct ExternalityKernel {
  KernelShape w;
  AffineClamp psi;
};

std::vector<std::string> audit_kernel(const ExternalityKernel& kernel);

KernelFamily parse_kernel_family(const std::string& name);
std::string to_string(KernelFamily family);

/// Discrete externality operator on a fixed spatial grid:
/// (S k)_j = psi( sum_l weight_l w(z_j, z_l) k_l ).
class ExternalityOperator {
 public:
  ExternalityOperator(ExternalityKernel kernel, SpatialGrid grid);

  const ExternalityKernel& kernel() const { return kernel_; }
  const SpatialGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  /// Weighted kernel entry weight_l * w(z_j, z_l).
  double weight(std::size_t j, std::size_t l) const { return matrix_[j * size() + l]; }

  /// One time slice: out_j = (S k)_j.
  void apply_slice(std::span<const double> k, std::span<double> out) const;

 private:
  ExternalityKernel kernel_;
  SpatialGrid grid_;
  std::vector<double> matrix_;
};

/// Applies the operator to every time slice (OpenMP over time x location).
SpaceTimeField apply_S(const SpaceTimeField& k_field, const ExternalityOperator& op);

/// Serial reference: evaluates the kernel on the fly with location-outer loops.
SpaceTimeField apply_S_serial(const SpaceTimeField& k_field, const ExternalityOperator& op);

/// Certified sup-norm Lipschitz bound L_psi * max_j sum_l weight_l |w(z_j, z_l)|.
double lipschitz_constant(const ExternalityOperator& op);

/// sup_j |(S 0)_j|.
double sup_at_zero(const ExternalityOperator& op);

/// Smallest power of two M with L_S max{k0_sup, k_bar(M)} + |S(0)| < M.
double schauder_bound_M(const ExternalityOperator& op, double k0_sup, const ProductionParams& p);

}  // namespace sree
