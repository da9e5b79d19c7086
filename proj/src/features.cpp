#include "driverseg/features.hpp"

#include <algorithm>
#include <cmath>

namespace driverseg {

namespace {

const char* kFeatureNames[kFeatureCount] = {
    "values",      "diff_quotient", "peak_interval", "peak_value",
    "moving_mean", "moving_median", "moving_std"};

}  // namespace

FeatureKind feature_from_number(int number) {
  if (number < 1 || number > kFeatureCount) {
    throw config_error("feature number must be in 1..7, got " + std::to_string(number));
  }
  return static_cast<FeatureKind>(number);
}

const char* feature_name(FeatureKind f) { return kFeatureNames[feature_number(f) - 1]; }

SingularPoints singular_points(const UniformSeries& series) {
  SingularPoints out;
  const auto& x = series.values;
  const std::size_t n = x.size();
  if (n < 3) return out;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double left = x[j] - x[j - 1];
    const double right = x[j + 1] - x[j];
    // Strict sign change; plateaus (either difference zero) never qualify.
    if ((left > 0.0 && right < 0.0) || (left < 0.0 && right > 0.0)) {
      out.all.push_back(j);
      if (x[j] > x[j + 1]) out.maxima.push_back(j);
    }
  }
  return out;
}

std::vector<double> difference_quotient(const UniformSeries& series) {
  const auto& x = series.values;
  std::vector<double> out;
  if (x.size() < 2) return out;
  out.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    out.push_back((x[i + 1] - x[i]) * series.rate);
  }
  return out;
}

std::vector<double> peak_intervals(const UniformSeries& series) {
  const SingularPoints sp = singular_points(series);
  std::vector<double> out;
  if (sp.all.size() < 2) return out;
  out.reserve(sp.all.size() - 1);
  for (std::size_t i = 0; i + 1 < sp.all.size(); ++i) {
    out.push_back(static_cast<double>(sp.all[i + 1] - sp.all[i]) / series.rate);
  }
  return out;
}

std::vector<double> peak_values(const UniformSeries& series) {
  const SingularPoints sp = singular_points(series);
  std::vector<double> out;
  out.reserve(sp.maxima.size());
  for (std::size_t j : sp.maxima) out.push_back(series.values[j]);
  return out;
}

std::vector<double> moving_stat(const UniformSeries& series, MovingStat stat,
                                std::size_t half_width) {
  const auto& x = series.values;
  const std::size_t n = x.size();
  std::vector<double> out(n);
  std::vector<double> scratch;
  scratch.reserve(2 * half_width + 1);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half_width ? i - half_width : 0;
    const std::size_t hi = std::min(n, i + half_width + 1);
    const std::size_t m = hi - lo;

    switch (stat) {
      case MovingStat::mean: {
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) sum += x[j];
        out[i] = sum / static_cast<double>(m);
        break;
      }
      case MovingStat::median: {
        scratch.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
                       x.begin() + static_cast<std::ptrdiff_t>(hi));
        const std::size_t mid = m / 2;
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid),
                         scratch.end());
        const double upper = scratch[mid];
        if (m % 2 == 1) {
          out[i] = upper;
        } else {
          const double lower =
              *std::max_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid));
          out[i] = (lower + upper) / 2.0;
        }
        break;
      }
      case MovingStat::stddev: {
        if (m < 2) {
          out[i] = 0.0;
          break;
        }
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) sum += x[j];
        const double mean = sum / static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t j = lo; j < hi; ++j) ss += (x[j] - mean) * (x[j] - mean);
        out[i] = std::sqrt(ss / static_cast<double>(m - 1));
        break;
      }
    }
  }
  return out;
}

namespace {

std::vector<double> session_feature(const UniformSeries& series, FeatureKind feature) {
  switch (feature) {
    case FeatureKind::values:
      return series.values;
    case FeatureKind::diff_quotient:
      return difference_quotient(series);
    case FeatureKind::peak_interval:
      return peak_intervals(series);
    case FeatureKind::peak_value:
      return peak_values(series);
    case FeatureKind::moving_mean:
      return moving_stat(series, MovingStat::mean);
    case FeatureKind::moving_median:
      return moving_stat(series, MovingStat::median);
    case FeatureKind::moving_std:
    default:
      return moving_stat(series, MovingStat::stddev);
  }
}

}  // namespace

FeatureVector extract_feature(const UserRecord& user, SignalKind signal, FeatureKind feature) {
  FeatureVector out;
  out.user_id = user.user_id;
  out.signal = signal;
  out.feature = feature;
  // Per session, then concatenated: no feature ever spans a session boundary.
  for (const auto& session : user.sessions) {
    const auto part = session_feature(session.of(signal), feature);
    out.values.insert(out.values.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<FeatureVector> extract_feature_table(const std::vector<UserRecord>& users,
                                                 SignalKind signal, FeatureKind feature) {
  std::vector<FeatureVector> out;
  out.reserve(users.size());
  for (const auto& user : users) out.push_back(extract_feature(user, signal, feature));
  return out;
}

}  // namespace driverseg
