#include "driverseg/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "util.hpp"

namespace driverseg {

namespace {

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': not an integer: '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': not a number: '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': not an unsigned integer: '" + value + "'");
  }
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& part : detail::split(value, ',')) {
    const std::string item = detail::strip(part);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  const bool has_dir = !data_dir.empty();
  const bool has_spec = !fleet_spec.empty();
  if (has_dir == has_spec) {
    throw config_error("exactly one of data_dir / fleet_spec must be set");
  }
  if (signals.empty()) throw config_error("signals must not be empty");
  if (features.empty()) throw config_error("features must not be empty");
  {
    std::set<SignalKind> s(signals.begin(), signals.end());
    if (s.size() != signals.size()) throw config_error("duplicate signal in config");
    std::set<FeatureKind> f(features.begin(), features.end());
    if (f.size() != features.size()) throw config_error("duplicate feature in config");
  }
  if (min_hours < 0.0) throw config_error("min_hours must be >= 0");
  if (bin_count < 2 || bin_count > 1000) throw config_error("bins must be in 2..1000");
  if (!(trim.lo_pct >= 0.0 && trim.lo_pct < trim.hi_pct && trim.hi_pct <= 100.0)) {
    throw config_error("trim percentiles must satisfy 0 <= lo < hi <= 100");
  }
  if (k_min < 1 || k_max < k_min) throw config_error("need 1 <= k_min <= k_max");
  if (trials < 1) throw config_error("trials must be >= 1");
  if (percentages.empty()) throw config_error("percentages must not be empty");
  for (double p : percentages) {
    if (!(p > 0.0 && p <= 100.0)) throw config_error("percentages must lie in (0, 100]");
  }
  if (methods.empty()) throw config_error("subsample_methods must not be empty");
  if (kmeans.restarts < 1) throw config_error("kmeans_restarts must be >= 1");
  if (!(kmeans.tol >= 0.0)) throw config_error("kmeans_tol must be >= 0");
  if (jobs < 1) throw config_error("jobs must be >= 1");
  if (out_dir.empty()) throw config_error("out_dir must not be empty");
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  RunConfig cfg;
  for (const auto& [key, value] : detail::read_key_value_file(path)) {
    if (key == "data_dir") {
      cfg.data_dir = value;
    } else if (key == "fleet_spec") {
      cfg.fleet_spec = value;
    } else if (key == "signals") {
      cfg.signals.clear();
      for (const auto& name : to_list(value)) cfg.signals.push_back(signal_from_name(name));
    } else if (key == "features") {
      cfg.features.clear();
      for (const auto& num : to_list(value)) {
        cfg.features.push_back(feature_from_number(to_int(key, num)));
      }
    } else if (key == "min_hours") {
      cfg.min_hours = to_double(key, value);
    } else if (key == "bins") {
      cfg.bin_count = to_int(key, value);
    } else if (key == "trim_lo") {
      cfg.trim.lo_pct = to_double(key, value);
    } else if (key == "trim_hi") {
      cfg.trim.hi_pct = to_double(key, value);
    } else if (key == "k_min") {
      cfg.k_min = to_int(key, value);
    } else if (key == "k_max") {
      cfg.k_max = to_int(key, value);
    } else if (key == "trials") {
      cfg.trials = to_int(key, value);
    } else if (key == "percentages") {
      cfg.percentages.clear();
      for (const auto& p : to_list(value)) cfg.percentages.push_back(to_double(key, p));
    } else if (key == "subsample_methods") {
      cfg.methods.clear();
      for (const auto& m : to_list(value)) {
        cfg.methods.push_back(subsample_method_from_name(m));
      }
    } else if (key == "crossval_bins") {
      if (value == "local") {
        cfg.crossval_bins = BinsMode::local;
      } else if (value == "global") {
        cfg.crossval_bins = BinsMode::global;
      } else {
        throw config_error("key 'crossval_bins': expected local or global, got '" + value + "'");
      }
    } else if (key == "kmeans_restarts") {
      cfg.kmeans.restarts = to_int(key, value);
    } else if (key == "kmeans_tol") {
      cfg.kmeans.tol = to_double(key, value);
    } else if (key == "dump_features") {
      if (value == "true" || value == "false") {
        cfg.dump_features = value == "true";
      } else {
        throw config_error("key 'dump_features': expected true or false, got '" + value + "'");
      }
    } else if (key == "seed") {
      cfg.seed = to_u64(key, value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "jobs") {
      cfg.jobs = to_int(key, value);
    } else {
      throw config_error(path.string() + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace driverseg
