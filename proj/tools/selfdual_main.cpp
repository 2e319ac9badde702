#include <CLI11.hpp>

#include <optional>

#include "selfdual/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "selfdual: variational Navier-Stokes and gradient-flow solver driven by the "
      "anti-selfdual path functional (certified by its vanishing infimum)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, outdir_set = false;

  auto* solve = app.add_subcommand("solve", "run a scenario from a JSON config");
  solve->add_option("config", config_path, "path to the run configuration")->required();
  auto* od = solve->add_option("--output-dir", output_dir, "override the output directory");
  auto* sd = solve->add_option("--seed", seed, "override the forcing seed");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property-test battery");
  verify->add_option("suite", suite, "duality | boundary | fields | gradients | refinement")
      ->required();

  CLI11_PARSE(app, argc, argv);
  outdir_set = od->count() > 0;
  seed_set = sd->count() > 0;

  if (solve->parsed()) {
    return selfdual::run_solve(
        config_path,
        outdir_set ? std::optional<std::string>(output_dir) : std::nullopt,
        seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
  }
  return selfdual::run_verify(suite);
}
