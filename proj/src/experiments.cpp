#include "driverseg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "driverseg/rng.hpp"
#include "util.hpp"

namespace driverseg {

namespace {

// Floor of a decimal fraction of d; the epsilon keeps exact products like
// 0.7 * 10 from rounding down to 6.
std::size_t fraction_floor(double frac, std::size_t d) {
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(d) + 1e-9));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation: one trial gives 0, not NaN.
double std_of(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// Seed streams for the clustering runs inside the experiment loops.
constexpr std::uint64_t kTrainCluster = 0xA11CE;
constexpr std::uint64_t kValCluster = 0xB0B0;
constexpr std::uint64_t kReferenceCluster = 0xC0DE;

// Per-user seed stream keyed on identity (FNV-1a), so reordering the users
// never changes any user's draws.
std::uint64_t user_stream(const std::string& id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

PointSet restrict_points(const HistogramSet& set, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < set.user_ids.size(); ++i) index.emplace(set.user_ids[i], i);
  PointSet out;
  out.user_ids = ids;
  out.points.reserve(ids.size());
  for (const auto& id : ids) out.points.push_back(set.bars[index.at(id)]);
  return out;
}

std::vector<std::string> common_users(const HistogramSet& a, const HistogramSet& b) {
  std::unordered_map<std::string, bool> in_b;
  for (const auto& id : b.user_ids) in_b.emplace(id, true);
  std::vector<std::string> out;
  for (const auto& id : a.user_ids) {
    if (in_b.count(id)) out.push_back(id);
  }
  return out;
}

}  // namespace

SplitResult split_train_validation(const std::vector<double>& w, double train_fraction,
                                   std::uint64_t seed) {
  if (w.size() < 2) {
    throw insufficient_data_error("splitting needs at least 2 values, got " +
                                  std::to_string(w.size()));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw domain_error("train fraction must lie in (0, 1)");
  }
  std::vector<double> shuffled = w;
  rng::engine eng(seed);
  rng::shuffle(shuffled, eng);
  const std::size_t cut = fraction_floor(train_fraction, shuffled.size());
  SplitResult out;
  out.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(cut));
  out.validation.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(cut), shuffled.end());
  return out;
}

int select_optimal_k(std::span<const double> means, int k_min) {
  if (means.empty()) throw empty_input_error("no mean V-measures to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[best] + 1e-12) best = i;  // ties keep the lowest K
  }
  return k_min + static_cast<int>(best);
}

double CrossValCell::mean_at_optimal() const {
  return mean_v.at(static_cast<std::size_t>(optimal_k - k_values.front()));
}

double CrossValCell::std_at_optimal() const {
  return std_v.at(static_cast<std::size_t>(optimal_k - k_values.front()));
}

CrossValCell cross_validate(const std::vector<FeatureVector>& per_user,
                            const CrossValParams& params) {
  if (per_user.empty()) throw no_data_error("cross-validation without users");
  if (params.k_min < 1 || params.k_max < params.k_min) {
    throw domain_error("need 1 <= k_min <= k_max");
  }
  if (params.trials < 1) throw domain_error("trials must be >= 1");
  for (const auto& fv : per_user) {
    if (fv.values.size() < 2) {
      throw insufficient_data_error("user '" + fv.user_id +
                                    "' has fewer than 2 feature values");
    }
  }

  CrossValCell cell;
  cell.signal = per_user.front().signal;
  cell.feature = per_user.front().feature;
  cell.trials = params.trials;

  // Optional fixed bins from the full data (bins_mode = global).
  BinSpec global_bins;
  if (params.bins_mode == BinsMode::global) {
    global_bins = build_histogram_set(per_user, params.bin_count, params.trim).bins;
  }

  const int n_k = params.k_max - params.k_min + 1;
  std::vector<std::vector<double>> scores(static_cast<std::size_t>(n_k),
                                          std::vector<double>(params.trials, 0.0));

  for (int ki = 0; ki < n_k; ++ki) {
    const int k = params.k_min + ki;
    detail::parallel_for(params.trials, params.jobs, [&, ki, k](int trial) {
      const std::uint64_t trial_seed =
          rng::derive(params.seed, static_cast<std::uint64_t>(k),
                      static_cast<std::uint64_t>(trial));

      std::vector<FeatureVector> train, validation;
      train.reserve(per_user.size());
      validation.reserve(per_user.size());
      for (std::size_t u = 0; u < per_user.size(); ++u) {
        SplitResult split = split_train_validation(
            per_user[u].values, params.train_fraction,
            rng::derive(trial_seed, user_stream(per_user[u].user_id)));
        FeatureVector ft{per_user[u].user_id, cell.signal, cell.feature,
                         std::move(split.train)};
        FeatureVector fv{per_user[u].user_id, cell.signal, cell.feature,
                         std::move(split.validation)};
        train.push_back(std::move(ft));
        validation.push_back(std::move(fv));
      }

      const HistogramSet ht = params.bins_mode == BinsMode::local
                                  ? build_histogram_set(train, params.bin_count, params.trim)
                                  : build_histogram_set(train, global_bins);
      const HistogramSet hv =
          params.bins_mode == BinsMode::local
              ? build_histogram_set(validation, params.bin_count, params.trim)
              : build_histogram_set(validation, global_bins);

      const std::vector<std::string> ids = common_users(ht, hv);
      if (ids.size() < static_cast<std::size_t>(k)) {
        throw infeasible_error("trial " + std::to_string(trial) + ", K=" + std::to_string(k) +
                               ": only " + std::to_string(ids.size()) +
                               " users survived histogram construction");
      }
      const Clustering ct =
          kmeans(restrict_points(ht, ids), k, rng::derive(trial_seed, kTrainCluster),
                 params.kmeans);
      const Clustering cv =
          kmeans(restrict_points(hv, ids), k, rng::derive(trial_seed, kValCluster),
                 params.kmeans);
      scores[static_cast<std::size_t>(ki)][static_cast<std::size_t>(trial)] =
          v_measure(ct.labels, cv.labels);
    });
  }

  cell.k_values.resize(static_cast<std::size_t>(n_k));
  cell.mean_v.resize(static_cast<std::size_t>(n_k));
  cell.std_v.resize(static_cast<std::size_t>(n_k));
  for (int ki = 0; ki < n_k; ++ki) {
    const auto& v = scores[static_cast<std::size_t>(ki)];
    const double m = mean_of(v);
    cell.k_values[static_cast<std::size_t>(ki)] = params.k_min + ki;
    cell.mean_v[static_cast<std::size_t>(ki)] = m;
    cell.std_v[static_cast<std::size_t>(ki)] = std_of(v, m);
  }
  cell.optimal_k = select_optimal_k(cell.mean_v, params.k_min);
  return cell;
}

std::vector<double> subsample_independent(const std::vector<double>& w, double p,
                                          std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw domain_error("subsample fraction must lie in (0, 1]");
  const std::size_t d = w.size();
  const std::size_t l = fraction_floor(p, d);
  if (l == 0) {
    throw empty_sample_error("subsampling " + detail::format_double(p * 100.0) + "% of " +
                             std::to_string(d) + " values yields nothing");
  }
  std::vector<double> v = w;
  rng::engine eng(seed);
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t j = i + rng::uniform_index(eng, d - i);
    std::swap(v[i], v[j]);
  }
  v.resize(l);
  return v;
}

std::vector<double> subsample_contiguous(const std::vector<double>& w, double p,
                                         std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw domain_error("subsample fraction must lie in (0, 1]");
  const std::size_t d = w.size();
  const std::size_t l = fraction_floor(p, d);
  if (l == 0) {
    throw empty_sample_error("subsampling " + detail::format_double(p * 100.0) + "% of " +
                             std::to_string(d) + " values yields nothing");
  }
  rng::engine eng(seed);
  const std::size_t r = rng::uniform_index(eng, d);
  std::vector<double> out;
  out.reserve(l);
  for (std::size_t i = 0; i < l; ++i) out.push_back(w[(r + i) % d]);
  return out;
}

const char* subsample_method_name(SubsampleMethod m) {
  return m == SubsampleMethod::independent ? "independent" : "contiguous";
}

SubsampleMethod subsample_method_from_name(const std::string& name) {
  if (name == "independent") return SubsampleMethod::independent;
  if (name == "contiguous") return SubsampleMethod::contiguous;
  throw config_error("unknown subsampling method '" + name + "'");
}

SubsampleCurve robustness_curve(const std::vector<FeatureVector>& per_user,
                                SubsampleMethod method, const RobustnessParams& params) {
  if (per_user.empty()) throw no_data_error("robustness curve without users");
  if (params.k < 1) throw domain_error("cluster count must be >= 1");
  if (params.trials < 1) throw domain_error("trials must be >= 1");
  for (double pct : params.percentages) {
    if (!(pct > 0.0 && pct <= 100.0)) {
      throw domain_error("percentages must lie in (0, 100]");
    }
  }

  // Reference clustering over the full data; its seed is shared with every
  // trial clustering so a 100% subsample reproduces it exactly.
  const HistogramSet full = build_histogram_set(per_user, params.bin_count, params.trim);
  if (full.user_ids.size() < static_cast<std::size_t>(params.k)) {
    throw infeasible_error("only " + std::to_string(full.user_ids.size()) +
                           " users survived histogram construction");
  }
  const std::uint64_t cluster_seed = rng::derive(params.seed, kReferenceCluster);
  const Clustering reference =
      kmeans(point_set_from(full), params.k, cluster_seed, params.kmeans);
  std::unordered_map<std::string, int> reference_label;
  for (std::size_t i = 0; i < full.user_ids.size(); ++i) {
    reference_label.emplace(full.user_ids[i], reference.labels[i]);
  }

  SubsampleCurve curve;
  curve.method = method;
  curve.percentages = params.percentages;
  curve.trials = params.trials;
  curve.mean_v.resize(params.percentages.size());
  curve.std_v.resize(params.percentages.size());

  for (std::size_t pi = 0; pi < params.percentages.size(); ++pi) {
    const double pct = params.percentages[pi];
    std::vector<double> scores(params.trials, 0.0);
    detail::parallel_for(params.trials, params.jobs, [&, pi, pct](int trial) {
      std::vector<FeatureVector> sampled;
      sampled.reserve(per_user.size());
      for (std::size_t u = 0; u < per_user.size(); ++u) {
        const std::uint64_t sub_seed =
            rng::derive(params.seed, static_cast<std::uint64_t>(method), pi,
                        static_cast<std::uint64_t>(trial),
                        user_stream(per_user[u].user_id));
        try {
          std::vector<double> values =
              method == SubsampleMethod::independent
                  ? subsample_independent(per_user[u].values, pct / 100.0, sub_seed)
                  : subsample_contiguous(per_user[u].values, pct / 100.0, sub_seed);
          sampled.push_back(FeatureVector{per_user[u].user_id, per_user[u].signal,
                                          per_user[u].feature, std::move(values)});
        } catch (const empty_sample_error& e) {
          throw empty_sample_error("at " + detail::format_double(pct) + "%: user '" +
                                   per_user[u].user_id + "': " + e.what());
        }
      }
      const HistogramSet hs = build_histogram_set(sampled, params.bin_count, params.trim);

      std::vector<std::string> ids;
      for (const auto& id : hs.user_ids) {
        if (reference_label.count(id)) ids.push_back(id);
      }
      if (ids.size() < static_cast<std::size_t>(params.k)) {
        throw infeasible_error("at " + detail::format_double(pct) + "%: only " +
                               std::to_string(ids.size()) + " users survived");
      }
      const Clustering sub =
          kmeans(restrict_points(hs, ids), params.k, cluster_seed, params.kmeans);
      std::vector<int> ref_labels;
      ref_labels.reserve(ids.size());
      for (const auto& id : ids) ref_labels.push_back(reference_label.at(id));
      scores[static_cast<std::size_t>(trial)] = v_measure(sub.labels, ref_labels);
    });
    const double m = mean_of(scores);
    curve.mean_v[pi] = m;
    curve.std_v[pi] = std_of(scores, m);
  }
  return curve;
}

}  // namespace driverseg
