#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "driverseg/learn.hpp"

namespace driverseg {

struct SplitResult {
  std::vector<double> train;
  std::vector<double> validation;
};

// Seeded uniform permutation, then first floor(frac * d) elements train and
// the rest validation. Throws insufficient_data_error for |w| < 2.
SplitResult split_train_validation(const std::vector<double>& w, double train_fraction,
                                   std::uint64_t seed);

// Whether cross-validation histograms rebuild bins from each subset's own
// value range (local) or reuse the full-data bins (global).
enum class BinsMode { local, global };

struct CrossValParams {
  int k_min = 2;
  int k_max = 10;
  int trials = 40;
  double train_fraction = 0.7;
  int bin_count = 10;
  TrimSpec trim;
  BinsMode bins_mode = BinsMode::local;
  KMeansOptions kmeans;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Mean/std of the cross-validated V-measure per cluster count, one
// (signal, feature) cell.
struct CrossValCell {
  SignalKind signal = SignalKind::BRK;
  FeatureKind feature = FeatureKind::values;
  std::vector<int> k_values;
  std::vector<double> mean_v;  // aligned with k_values
  std::vector<double> std_v;   // population standard deviation
  int trials = 0;
  int optimal_k = 0;

  double mean_at_optimal() const;
  double std_at_optimal() const;
};

// Per trial: seeded 70/30 split of every user's vector, histograms built
// independently on both sides, K-means on each, V-measure between the two
// clusterings. Deterministic in (per_user, params).
CrossValCell cross_validate(const std::vector<FeatureVector>& per_user,
                            const CrossValParams& params);

// Argmax of the mean row; ties within 1e-12 break toward the lowest K.
int select_optimal_k(std::span<const double> means, int k_min = 2);

// floor(p * d) elements drawn uniformly without replacement, in draw order.
// Throws empty_sample_error when floor(p * d) == 0.
std::vector<double> subsample_independent(const std::vector<double>& w, double p,
                                          std::uint64_t seed);

// floor(p * d) circularly consecutive elements starting at a uniform index.
std::vector<double> subsample_contiguous(const std::vector<double>& w, double p,
                                         std::uint64_t seed);

enum class SubsampleMethod { independent, contiguous };

const char* subsample_method_name(SubsampleMethod m);
SubsampleMethod subsample_method_from_name(const std::string& name);

struct RobustnessParams {
  std::vector<double> percentages = {100, 50, 20, 10, 5, 2, 1};
  int trials = 40;
  int k = 2;  // cluster count, normally the optimal K
  int bin_count = 10;
  TrimSpec trim;
  KMeansOptions kmeans;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct SubsampleCurve {
  SubsampleMethod method = SubsampleMethod::independent;
  std::vector<double> percentages;
  std::vector<double> mean_v;
  std::vector<double> std_v;
  int trials = 0;
};

// Clusters the full data once as the reference, then per percentage and
// trial subsamples every user's vector, rebuilds histograms, reclusters and
// scores the V-measure against the reference clustering.
SubsampleCurve robustness_curve(const std::vector<FeatureVector>& per_user,
                                SubsampleMethod method, const RobustnessParams& params);

}  // namespace driverseg
