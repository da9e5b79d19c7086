#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "driverseg/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"driverseg: segments fleet drivers by the distributions of their CAN signals"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "run configuration file (key = value)");
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--seed", seed, "master seed override");
  app.add_option("--jobs", jobs, "worker thread count override");

  auto* synth = app.add_subcommand("synth", "generate a synthetic fleet as session CSV files");
  std::string fleet_spec_path;
  synth->add_option("spec", fleet_spec_path, "fleet spec file")->required();
  synth->fallthrough();

  auto* pipeline = app.add_subcommand(
      "pipeline", "run ingest, features, histograms, cross-validation, PCA and robustness");
  pipeline->fallthrough();

  auto* report =
      app.add_subcommand("report", "rework pipeline outputs into tidy plot-data CSVs");
  std::string results_dir;
  report->add_option("results", results_dir, "pipeline output directory")->required();
  report->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? driverseg::kExitOk : driverseg::kExitBadConfig;
  }

  try {
    if (synth->parsed()) {
      if (out_dir.empty()) {
        std::cerr << "error: synth needs --out <directory>\n";
        return driverseg::kExitBadConfig;
      }
      return driverseg::run_synth(fleet_spec_path, out_dir, seed);
    }
    if (pipeline->parsed()) {
      if (config_path.empty()) {
        std::cerr << "error: pipeline needs --config <file>\n";
        return driverseg::kExitBadConfig;
      }
      driverseg::RunConfig cfg = driverseg::parse_run_config(config_path);
      if (seed) cfg.seed = *seed;
      if (jobs) cfg.jobs = *jobs;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      return driverseg::run_pipeline(std::move(cfg));
    }
    return driverseg::run_report(results_dir, out_dir);
  } catch (const driverseg::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return driverseg::kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return driverseg::kExitInternal;
  }
}
