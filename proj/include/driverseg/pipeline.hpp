#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "driverseg/config.hpp"
#include "driverseg/synth.hpp"

namespace driverseg {

// Exit codes shared by the command entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitNoData = 3;
inline constexpr int kExitMissingResults = 4;

// Generates a synthetic fleet and writes one session CSV per session plus a
// manifest.json listing users, archetypes and hours.
int run_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed_override = {});

// Runs the full pipeline: ingest, features, histograms, cross-validation,
// optimal-K selection, PCA, robustness curves; writes every export plus
// summary.json. On failure partial outputs stay behind next to a FAILED
// marker file.
int run_pipeline(RunConfig config);

// Reworks pipeline outputs into tidy plot-data CSVs (V-measure vs K, PCA
// scatter with cluster labels, subsampling curves).
int run_report(const std::filesystem::path& results_dir,
               const std::filesystem::path& out_dir = {});

}  // namespace driverseg
