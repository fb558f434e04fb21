// Command-line front end: runs one verification suite on a builtin or a
// JSON-configured scenario and writes the report.

#include "orbitspace/report.hpp"
#include "orbitspace/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace orbitspace;

int main(int argc, char** argv) {
  CLI::App app{"Certified orbit-space geometry of compact group actions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, builtin;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON scenario config");
  app.add_option("--seed", seed, "RNG seed (required unless the config sets one)");
  app.add_option("--out", out_dir, "Directory for report.json, summary.csv and artifacts");
  app.add_option("--builtin", builtin, "Builtin scenario, e.g. zn_plane(6)");

  std::string suite;
  std::optional<int> cutoff;
  std::optional<double> scale;

  auto* stratify = app.add_subcommand("stratify", "Orbit-type stratification checks");
  auto* qmetric = app.add_subcommand("qmetric", "Quotient metric checks");
  auto* verify = app.add_subcommand("verify", "Run a named suite");
  verify->add_option("--suite", suite, "metric, stratification, foliation, cohomology, triangulate or all")->required();
  auto* cohomology = app.add_subcommand("cohomology", "Basic cohomology checks");
  cohomology->add_option("--cutoff", cutoff, "Polynomial degree or trigonometric frequency cutoff")
      ->check(CLI::PositiveNumber);
  auto* triangulate = app.add_subcommand("triangulate", "Rips complex of the quotient");
  triangulate->add_option("--scale", scale, "Rips scale")->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "Run every suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() == builtin.empty())
      throw ValidationError("give exactly one of --config and --builtin");

    std::optional<LoadedScenario> loaded;
    if (!config_path.empty()) {
      loaded.emplace(load_config_file(config_path));
      if (seed) loaded->config.resolution.seed = *seed;
    } else {
      if (!seed) throw ValidationError("--seed is required");
      RunConfig cfg;
      cfg.resolution.seed = *seed;
      loaded.emplace(LoadedScenario{make_builtin(builtin, cfg.resolution), cfg});
    }
    auto& cfg = loaded->config;
    if (cutoff) cfg.cutoff = cutoff;
    if (scale) cfg.rips_scale = scale;
    if (!out_dir.empty()) cfg.outputs = out_dir;

    std::string name;
    if (stratify->parsed()) name = "stratification";
    if (qmetric->parsed()) name = "metric";
    if (verify->parsed()) name = suite;
    if (cohomology->parsed()) name = "cohomology";
    if (triangulate->parsed()) name = "triangulate";
    if (report->parsed()) name = "all";

    const auto result = run_suite(loaded->plan, cfg, name);
    std::cout << summary_text(result);
    if (!cfg.outputs.empty())
      for (const auto& path : write_outputs(result, cfg.outputs)) std::cout << "wrote " << path << '\n';
    return result.overall() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
