#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sree/equilibrium.hpp"

namespace sree {

struct PrimitivesBlock {
  double A = 1.0;
  double alpha = 0.3;
  double beta = 0.2;
  double delta = 0.05;
  double sigma = 0.5;
  double r = 0.03;
};

struct KernelBlock {
  std::string family = "gaussian";
  double length = 0.2;
  double inhibit_length = 0.4;
  double inhibit_weight = 0.5;
  double a = 0.5;
  double b = 0.1;
  double I_lo = 0.5;
  double I_hi = 10.0;
};

struct GridBlock {
  std::int64_t spatial_nodes = 16;
  bool periodic = false;
  std::int64_t time_nodes = 400;
  double tail_epsilon = 1e-3;
  double horizon_floor = 10.0;
};

struct SolverBlock {
  double gamma = 0.5;
  double tol = 1e-9;
  std::int64_t max_sweeps = 50;
  bool oracle = false;
  double terminal_tol = 1e-10;
  double oracle_grad_tol = 1e-8;
  std::int64_t oracle_max_fine_nodes = 2001;
  // Certification thresholds for consistency / dynamics / Euler residuals.
  double certify_consistency = 1e-4;
  double certify_dynamics = 1e-3;
  double certify_euler = 1e-2;
};

/// Initial capital profile over D = [0, 1].
struct K0Block {
  std::string profile = "gaussian_bump";  // constant | linear_ramp | gaussian_bump
  double level = 4.0;
  double slope = 0.0;
  double amplitude = 2.0;
  double center = 0.5;
  double width = 0.15;
};

/// Inputs of the single-location run.
struct LocationBlock {
  double K = 1.0;           // constant externality
  std::string K_table;      // optional CSV (t,K); overrides K when set
  double k0 = 0.0;          // 0: use the k0 profile at z = 0.5
};

struct OutputBlock {
  std::string directory = "out";
  std::vector<std::string> csv = {"path", "bounds", "fields", "residuals", "certification", "diagnostics"};

  bool wants(const std::string& name) const;
};

struct RunConfig {
  PrimitivesBlock primitives;
  KernelBlock kernel;
  GridBlock grid;
  SolverBlock solver;
  K0Block k0;
  LocationBlock location;
  OutputBlock output;
  std::uint64_t seed = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a TOML configuration; unknown keys and type mismatches are errors.
RunConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Applies SREE_<SECTION>_<KEY> overrides (e.g. SREE_SOLVER_GAMMA=0.7).
/// Returns the names of the variables that were applied.
std::vector<std::string> apply_env_overrides(RunConfig& cfg,
                                             const std::function<const char*(const char*)>& getenv_fn);

double k0_profile(const K0Block& block, double z);

/// Derived quantities reported in the run manifest.
struct RunSummary {
  double horizon_T = 0.0;
  double phi_T = 0.0;
  double schauder_M = 0.0;
  double lipschitz_S = 0.0;
  double S_zero_sup = 0.0;
  double C1 = 0.0;
  double K_sup = 0.0;
};

struct ValidationResult {
  std::optional<Economy> economy;
  RunSummary summary;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty() && economy.has_value(); }
};

/// Runs every assumption audit and assembles the economy. Never fails fast:
/// all violations are collected.
ValidationResult validate_config(const RunConfig& cfg);

}  // namespace sree
