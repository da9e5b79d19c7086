#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "driverseg/ingest.hpp"

namespace driverseg {

// The seven per-signal indicators, numbered 1..7.
enum class FeatureKind : int {
  values = 1,
  diff_quotient = 2,
  peak_interval = 3,
  peak_value = 4,
  moving_mean = 5,
  moving_median = 6,
  moving_std = 7,
};

inline constexpr int kFeatureCount = 7;

inline constexpr std::array<FeatureKind, kFeatureCount> kAllFeatures = {
    FeatureKind::values,      FeatureKind::diff_quotient, FeatureKind::peak_interval,
    FeatureKind::peak_value,  FeatureKind::moving_mean,   FeatureKind::moving_median,
    FeatureKind::moving_std};

inline constexpr int feature_number(FeatureKind f) { return static_cast<int>(f); }

// Throws config_error outside 1..7.
FeatureKind feature_from_number(int number);

const char* feature_name(FeatureKind f);

// Strict local extrema of a series: indices j with
// (x_j - x_{j-1}) * (x_{j+1} - x_j) < 0. Plateaus never qualify.
struct SingularPoints {
  std::vector<std::size_t> all;     // J, ascending interior indices
  std::vector<std::size_t> maxima;  // J_max: j in J with x_j > x_{j+1}
};

// Per-user, per-signal, per-feature value sequence, concatenated over the
// user's sessions.
struct FeatureVector {
  std::string user_id;
  SignalKind signal = SignalKind::BRK;
  FeatureKind feature = FeatureKind::values;
  std::vector<double> values;
};

// Samples-per-side of the moving-stat window: one minute at 4 Hz.
inline constexpr std::size_t kMovingHalfWidth = 120;

SingularPoints singular_points(const UniformSeries& series);

// (x_{i+1} - x_i) * rate; length n-1 (empty when n < 2).
std::vector<double> difference_quotient(const UniformSeries& series);

// Gaps between consecutive singular points, (k - j) / rate; length |J|-1.
std::vector<double> peak_intervals(const UniformSeries& series);

// x_j for j in J_max, in index order.
std::vector<double> peak_values(const UniformSeries& series);

enum class MovingStat { mean, median, stddev };

// Windowed statistic over indices [i - half_width, i + half_width]
// intersected with the series; one output per input sample. The statistic
// uses the actual window cardinality; stddev is the square root of the
// unbiased sample variance (0 for single-sample windows).
std::vector<double> moving_stat(const UniformSeries& series, MovingStat stat,
                                std::size_t half_width = kMovingHalfWidth);

// Applies the feature to each session of the user independently and
// concatenates the outputs in session order.
FeatureVector extract_feature(const UserRecord& user, SignalKind signal, FeatureKind feature);

std::vector<FeatureVector> extract_feature_table(const std::vector<UserRecord>& users,
                                                 SignalKind signal, FeatureKind feature);

}  // namespace driverseg
