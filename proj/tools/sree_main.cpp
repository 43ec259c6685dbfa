#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "sree/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spatial Ramsey equilibrium solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool oracle = false;
  int max_sweeps = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "TOML run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "Seed for randomized diagnostics");
    sub->add_flag("--oracle", oracle, "Cross-check against the direct oracle");
    sub->add_option("--max-sweeps", max_sweeps, "Cap on equilibrium sweeps")->check(CLI::NonNegativeNumber);
  };
  add_common(app.add_subcommand("validate", "Check the configuration and report T, M, L_S"));
  add_common(app.add_subcommand("solve-location", "Solve one location against a given K(t)"));
  add_common(app.add_subcommand("solve-equilibrium", "Iterate best responses to a fixed point"));
  add_common(app.add_subcommand("diagnose", "Run the diagnostic suites"));

  CLI11_PARSE(app, argc, argv);

  sree::RunRequest req;
  req.command = app.get_subcommands().front()->get_name();
  req.config_path = config_path;
  try {
    req.config = sree::load_config(config_path);
    req.env_overrides = sree::apply_env_overrides(req.config, [](const char* name) { return std::getenv(name); });
  } catch (const sree::ConfigError& e) {
    req.load_errors.push_back(e.what());
  }
  if (app.get_subcommands().front()->count("--seed")) req.config.seed = seed;
  if (max_sweeps >= 0) req.config.solver.max_sweeps = max_sweeps;
  req.force_oracle = oracle;
  req.out_dir = out_dir.empty() ? req.config.output.directory : out_dir;

  const int code = sree::execute(req);
  std::fprintf(stderr, "%s: exit %d (manifest: %s)\n", req.command.c_str(), code,
               (req.out_dir / "manifest.json").string().c_str());
  return code;
}
