#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "driverseg/experiments.hpp"

namespace driverseg {

// Everything a pipeline run needs; defaults mirror the analysis constants
// (all eight signals, seven features, 10-hour filter, 10 bins, 2/98
// trimming, K in 2..10, 40 trials, percentages 100..1).
struct RunConfig {
  std::filesystem::path data_dir;    // exactly one of data_dir / fleet_spec
  std::filesystem::path fleet_spec;
  std::vector<SignalKind> signals = {kAllSignals.begin(), kAllSignals.end()};
  std::vector<FeatureKind> features = {kAllFeatures.begin(), kAllFeatures.end()};
  double min_hours = 10.0;
  int bin_count = 10;
  TrimSpec trim;
  int k_min = 2;
  int k_max = 10;
  int trials = 40;
  std::vector<double> percentages = {100, 50, 20, 10, 5, 2, 1};
  std::vector<SubsampleMethod> methods = {SubsampleMethod::independent,
                                          SubsampleMethod::contiguous};
  BinsMode crossval_bins = BinsMode::local;
  KMeansOptions kmeans;
  bool dump_features = false;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  // Throws config_error on out-of-range entries.
  void validate() const;
};

// Flat key = value file; '#' starts a comment; unknown keys are an error.
RunConfig parse_run_config(const std::filesystem::path& path);

}  // namespace driverseg
