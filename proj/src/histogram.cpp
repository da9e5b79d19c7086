#include "driverseg/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace driverseg {

namespace {

// Percentile on a scratch buffer the caller lets us reorder.
double percentile_inplace(std::vector<double>& v, double pct) {
  const double rank = pct / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo_i = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo_i);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo_i), v.end());
  const double lo_v = v[lo_i];
  if (frac == 0.0 || lo_i + 1 == v.size()) return lo_v;
  const double hi_v =
      *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo_i) + 1, v.end());
  return lo_v + frac * (hi_v - lo_v);
}

// [P(lo_pct), P(hi_pct)] of the values in scratch.
std::pair<double, double> trim_bounds(std::vector<double>& scratch, double lo_pct,
                                      double hi_pct) {
  const double lo = percentile_inplace(scratch, lo_pct);
  const double hi = percentile_inplace(scratch, hi_pct);
  return {lo, hi};
}

void check_percentile_args(double lo_pct, double hi_pct) {
  if (!(lo_pct >= 0.0 && hi_pct <= 100.0 && lo_pct < hi_pct)) {
    throw domain_error("trim percentiles must satisfy 0 <= lo < hi <= 100");
  }
}

}  // namespace

int BinSpec::try_bin_of(double v) const {
  if (v < lo || v > hi) return -1;
  if (v >= hi) return count - 1;  // closed last bin
  int i = static_cast<int>((v - lo) / (hi - lo) * count);
  i = std::clamp(i, 0, count - 1);
  // Repair float round-off against the true edges, keeping bins half-open.
  while (i > 0 && v < edge(i)) --i;
  while (i + 1 < count && v >= edge(i + 1)) ++i;
  return i;
}

int BinSpec::bin_of(double v) const {
  const int i = try_bin_of(v);
  if (i < 0) {
    throw value_range_error("value " + std::to_string(v) + " outside bin range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return i;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw empty_input_error("percentile of an empty sample");
  if (!(pct >= 0.0 && pct <= 100.0)) throw domain_error("percentile must be in [0, 100]");
  return percentile_inplace(values, pct);
}

std::vector<double> trim_percentiles(const std::vector<double>& values, double lo_pct,
                                     double hi_pct) {
  if (values.empty()) throw empty_input_error("trim_percentiles of an empty sample");
  check_percentile_args(lo_pct, hi_pct);
  std::vector<double> scratch = values;
  const auto [lo, hi] = trim_bounds(scratch, lo_pct, hi_pct);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (v >= lo && v <= hi) out.push_back(v);
  }
  return out;
}

BinSpec global_bin_spec(const std::vector<std::vector<double>>& trimmed_vectors, int count) {
  if (count < 1) throw domain_error("bin count must be >= 1");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& v : trimmed_vectors) {
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      any = true;
    }
  }
  if (!any) throw no_data_error("no values to build bins from");
  if (!(lo < hi)) {
    throw degenerate_range_error("bin range is degenerate: all values equal " +
                                 std::to_string(lo));
  }
  return {lo, hi, count};
}

std::vector<double> build_histogram(const std::vector<double>& values, const BinSpec& bins) {
  if (values.empty()) throw empty_input_error("histogram of an empty value set");
  std::vector<double> bars(bins.count, 0.0);
  for (double v : values) bars[static_cast<std::size_t>(bins.bin_of(v))] += 1.0;
  for (double& b : bars) b /= static_cast<double>(values.size());
  return bars;
}

HistogramSet build_histogram_set(const std::vector<FeatureVector>& per_user, int bin_count,
                                 TrimSpec trim) {
  if (per_user.empty()) throw no_data_error("no feature vectors to histogram");
  check_percentile_args(trim.lo_pct, trim.hi_pct);
  if (bin_count < 1) throw domain_error("bin count must be >= 1");

  HistogramSet out;
  out.signal = per_user.front().signal;
  out.feature = per_user.front().feature;

  struct Survivor {
    const FeatureVector* fv;
    double lo, hi;  // personal trim bounds
  };
  std::vector<Survivor> survivors;
  survivors.reserve(per_user.size());

  double global_lo = std::numeric_limits<double>::infinity();
  double global_hi = -std::numeric_limits<double>::infinity();
  std::vector<double> scratch;
  for (const auto& fv : per_user) {
    if (fv.values.empty()) {
      out.dropped_users.push_back(fv.user_id);
      continue;
    }
    scratch = fv.values;
    const auto [lo, hi] = trim_bounds(scratch, trim.lo_pct, trim.hi_pct);
    double user_lo = std::numeric_limits<double>::infinity();
    double user_hi = -std::numeric_limits<double>::infinity();
    std::size_t retained = 0;
    for (double v : fv.values) {
      if (v >= lo && v <= hi) {
        user_lo = std::min(user_lo, v);
        user_hi = std::max(user_hi, v);
        ++retained;
      }
    }
    if (retained == 0) {
      out.dropped_users.push_back(fv.user_id);
      continue;
    }
    survivors.push_back({&fv, lo, hi});
    global_lo = std::min(global_lo, user_lo);
    global_hi = std::max(global_hi, user_hi);
  }

  if (survivors.empty()) throw no_data_error("every user lost all values to trimming");
  if (!(global_lo < global_hi)) {
    throw degenerate_range_error("bin range is degenerate: all trimmed values equal " +
                                 std::to_string(global_lo));
  }
  out.bins = {global_lo, global_hi, bin_count};

  for (const auto& s : survivors) {
    std::vector<double> bars(bin_count, 0.0);
    std::size_t total = 0;
    for (double v : s.fv->values) {
      if (v >= s.lo && v <= s.hi) {
        bars[static_cast<std::size_t>(out.bins.bin_of(v))] += 1.0;
        ++total;
      }
    }
    for (double& b : bars) b /= static_cast<double>(total);
    out.user_ids.push_back(s.fv->user_id);
    out.bars.push_back(std::move(bars));
  }
  return out;
}

HistogramSet build_histogram_set(const std::vector<FeatureVector>& per_user,
                                 const BinSpec& bins) {
  if (per_user.empty()) throw no_data_error("no feature vectors to histogram");

  HistogramSet out;
  out.signal = per_user.front().signal;
  out.feature = per_user.front().feature;
  out.bins = bins;

  for (const auto& fv : per_user) {
    std::vector<double> bars(bins.count, 0.0);
    std::size_t total = 0;
    for (double v : fv.values) {
      const int b = bins.try_bin_of(v);
      if (b < 0) continue;  // outside the fixed range: treated as an outlier
      bars[static_cast<std::size_t>(b)] += 1.0;
      ++total;
    }
    if (total == 0) {
      out.dropped_users.push_back(fv.user_id);
      continue;
    }
    for (double& b : bars) b /= static_cast<double>(total);
    out.user_ids.push_back(fv.user_id);
    out.bars.push_back(std::move(bars));
  }
  if (out.user_ids.empty()) throw no_data_error("every user fell outside the fixed bins");
  return out;
}

}  // namespace driverseg
