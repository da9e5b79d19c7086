#pragma once

#include <string>
#include <vector>

#include "driverseg/features.hpp"

namespace driverseg {

// Equal-width partition of [lo, hi] into count bins. Bins are half-open
// [edge_i, edge_{i+1}) except the last, which is closed so that hi is
// countable.
struct BinSpec {
  double lo = 0.0;
  double hi = 1.0;
  int count = 10;

  double edge(int i) const { return lo + (hi - lo) * static_cast<double>(i) / count; }
  double width() const { return (hi - lo) / count; }

  // Bin index of v, or -1 when v lies outside [lo, hi].
  int try_bin_of(double v) const;

  // Throws value_range_error outside [lo, hi].
  int bin_of(double v) const;
};

// Percentile of a sample under the linear-interpolation convention:
// rank = pct/100 * (n-1) on the sorted values. Throws empty_input_error.
double percentile(std::vector<double> values, double pct);

// Keeps exactly the values v with P(lo_pct) <= v <= P(hi_pct), order
// preserved. Throws empty_input_error.
std::vector<double> trim_percentiles(const std::vector<double>& values, double lo_pct = 2.0,
                                     double hi_pct = 98.0);

// [min, max] over the union of all (already trimmed) vectors. Throws
// no_data_error when every vector is empty and degenerate_range_error when
// min == max.
BinSpec global_bin_spec(const std::vector<std::vector<double>>& trimmed_vectors, int count = 10);

// Normalized bar heights; sums to 1. Throws empty_input_error on empty
// values and value_range_error on any value outside the bins.
std::vector<double> build_histogram(const std::vector<double>& values, const BinSpec& bins);

// The comparable per-user histograms for one (signal, feature): per-user
// percentile trimming, a bin range shared by all users, normalized bars.
// Users whose trimmed vector is empty are dropped and reported.
struct HistogramSet {
  SignalKind signal = SignalKind::BRK;
  FeatureKind feature = FeatureKind::values;
  BinSpec bins;
  std::vector<std::string> user_ids;        // survivors, input order
  std::vector<std::vector<double>> bars;    // aligned with user_ids
  std::vector<std::string> dropped_users;
};

struct TrimSpec {
  double lo_pct = 2.0;
  double hi_pct = 98.0;
};

// Bins computed from the union of the trimmed vectors.
HistogramSet build_histogram_set(const std::vector<FeatureVector>& per_user, int bin_count = 10,
                                 TrimSpec trim = {});

// Bins fixed by the caller; no trimming, values outside the bins are
// discarded as out-of-range outliers.
HistogramSet build_histogram_set(const std::vector<FeatureVector>& per_user, const BinSpec& bins);

}  // namespace driverseg
