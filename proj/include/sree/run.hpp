#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sree/config.hpp"

namespace sree {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_not_converged = 3 };

struct RunRequest {
  std::string command;       // validate | solve-location | solve-equilibrium | diagnose
  std::string config_path;   // for the manifest only
  RunConfig config;
  std::filesystem::path out_dir;
  bool force_oracle = false;
  std::vector<std::string> env_overrides;
  std::vector<std::string> load_errors;  // parse failures; the run is rejected
};

/// Runs one subcommand, writing its CSVs and manifest.json into out_dir.
/// Never throws for model or solver failures; the exit code reports them.
int execute(const RunRequest& req);

/// Reads a (t, K) CSV with a header row and interpolates it linearly onto
/// the nodes (held constant outside the table).
std::vector<double> load_K_table(const std::string& path, const std::vector<double>& nodes);

/// FNV-1a over the bytes of the values.
std::string checksum(const std::vector<double>& values);

/// "%.17g".
std::string format_double(double x);

}  // namespace sree
