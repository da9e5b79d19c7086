#include "driverseg/learn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>

#include "driverseg/rng.hpp"

namespace driverseg {

PointSet point_set_from(const HistogramSet& set) {
  PointSet out;
  out.user_ids = set.user_ids;
  out.points = set.bars;
  return out;
}

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

std::vector<std::vector<double>> init_kmeanspp(const std::vector<std::vector<double>>& points,
                                               int k, rng::engine& eng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(points[rng::uniform_index(eng, n)]);

  std::vector<double> best(n);
  for (std::size_t i = 0; i < n; ++i) best[i] = dist2(points[i], centroids.front());

  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double d : best) total += d;
    std::size_t pick;
    if (total > 0.0) {
      const double u = rng::uniform01(eng) * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += best[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng::uniform_index(eng, n);  // only duplicates left
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], dist2(points[i], centroids.back()));
    }
  }
  return centroids;
}

struct LloydResult {
  std::vector<int> labels;
  double inertia = 0.0;
  std::vector<double> history;
};

LloydResult run_lloyd(const std::vector<std::vector<double>>& points, int k, rng::engine& eng,
                      const KMeansOptions& opt) {
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  auto centroids = init_kmeanspp(points, k, eng);

  LloydResult res;
  res.labels.assign(n, -1);
  std::vector<double> point_d2(n);

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // Assignment; ties break toward the lowest centroid index.
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = dist2(points[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(points[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.labels[i] != best) {
        res.labels[i] = best;
        changed = true;
      }
      point_d2[i] = best_d;
      inertia += best_d;
    }
    assert(res.history.empty() || inertia <= res.history.back() + 1e-9 * (1.0 + inertia));
    res.history.push_back(inertia);
    res.inertia = inertia;
    if (!changed) break;

    // Centroid update.
    std::vector<std::vector<double>> next(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.labels[i]);
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) next[c][j] += points[i][j];
    }
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      if (counts[cc] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        next[cc][j] /= static_cast<double>(counts[cc]);
      }
    }
    // An emptied cluster restarts at the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      if (counts[cc] != 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (point_d2[i] > point_d2[far]) far = i;
      }
      next[cc] = points[far];
      point_d2[far] = 0.0;  // spent; the next empty cluster picks another
    }

    double shift2 = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      shift2 = std::max(shift2, dist2(centroids[cc], next[cc]));
    }
    centroids = std::move(next);
    if (shift2 < opt.tol * opt.tol) break;
  }
  return res;
}

}  // namespace

Clustering kmeans(const PointSet& points, int k, std::uint64_t seed, KMeansOptions options) {
  const std::size_t n = points.size();
  if (k <= 0) throw domain_error("cluster count must be positive, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > n) {
    throw infeasible_error("cannot form " + std::to_string(k) + " clusters from " +
                           std::to_string(n) + " points");
  }
  for (const auto& p : points.points) {
    if (p.size() != points.dim()) throw alignment_error("points differ in dimension");
  }

  LloydResult best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    rng::engine eng(rng::derive(seed, static_cast<std::uint64_t>(r)));
    LloydResult res = run_lloyd(points.points, k, eng, options);
    if (!have || res.inertia < best.inertia) {
      best = std::move(res);
      have = true;
    }
  }

  Clustering out;
  out.labels = std::move(best.labels);
  out.k = k;
  out.inertia = best.inertia;
  out.inertia_history = std::move(best.history);
  return out;
}

PcaProjection pca_project(const PointSet& points, int dims) {
  const std::size_t n = points.size();
  if (n < 2) throw insufficient_data_error("PCA needs at least 2 points");
  const std::size_t d = points.dim();
  if (dims < 1 || static_cast<std::size_t>(dims) > d) {
    throw domain_error("projection dimension must be in 1.." + std::to_string(d));
  }

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points.points[i][j];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.adjoint() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw error("eigendecomposition failed");

  // Eigenvalues come back ascending; flip to descending and clamp the
  // round-off negatives.
  std::vector<double> lambda(d);
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    lambda[j] = std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(d - 1 - j)));
    total += lambda[j];
  }
  if (!(total > 0.0)) {
    throw degenerate_range_error("total variance is zero; all points identical");
  }

  PcaProjection out;
  out.user_ids = points.user_ids;
  out.ratio_spectrum.resize(d);
  for (std::size_t j = 0; j < d; ++j) out.ratio_spectrum[j] = lambda[j] / total;
  out.explained_variance_ratio.assign(out.ratio_spectrum.begin(),
                                      out.ratio_spectrum.begin() + dims);

  Eigen::MatrixXd components(d, dims);
  for (int j = 0; j < dims; ++j) {
    Eigen::VectorXd comp = solver.eigenvectors().col(static_cast<Eigen::Index>(d - 1) - j);
    Eigen::Index max_row = 0;
    comp.cwiseAbs().maxCoeff(&max_row);
    if (comp(max_row) < 0.0) comp = -comp;
    components.col(j) = comp;
  }
  const Eigen::MatrixXd coords = centered * components;
  out.coords.assign(n, std::vector<double>(static_cast<std::size_t>(dims), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < dims; ++j) {
      out.coords[i][static_cast<std::size_t>(j)] = coords(static_cast<Eigen::Index>(i), j);
    }
  }
  return out;
}

namespace {

// Relabels to first-occurrence order, so any bijective relabeling maps to
// the same canonical sequence.
std::vector<int> compact_labels(std::span<const int> labels, int& k_out) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = remap.emplace(labels[i], static_cast<int>(remap.size())).first;
    out[i] = it->second;
  }
  k_out = static_cast<int>(remap.size());
  return out;
}

double entropy(const std::vector<double>& group_counts, double n) {
  double h = 0.0;
  for (double c : group_counts) {
    if (c > 0.0) h -= c / n * std::log(c / n);
  }
  return h;
}

}  // namespace

double v_measure(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw alignment_error("clusterings label different user counts: " +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw empty_input_error("v_measure of empty clusterings");

  int ka = 0, kb = 0;
  std::vector<int> ca = compact_labels(a, ka);
  std::vector<int> cb = compact_labels(b, kb);
  // Canonical orientation makes symmetry bit-exact.
  if (std::lexicographical_compare(cb.begin(), cb.end(), ca.begin(), ca.end())) {
    std::swap(ca, cb);
    std::swap(ka, kb);
  }

  const double n = static_cast<double>(ca.size());
  std::vector<double> joint(static_cast<std::size_t>(ka) * static_cast<std::size_t>(kb), 0.0);
  std::vector<double> row(static_cast<std::size_t>(ka), 0.0);
  std::vector<double> col(static_cast<std::size_t>(kb), 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    joint[static_cast<std::size_t>(ca[i]) * static_cast<std::size_t>(kb) +
          static_cast<std::size_t>(cb[i])] += 1.0;
    row[static_cast<std::size_t>(ca[i])] += 1.0;
    col[static_cast<std::size_t>(cb[i])] += 1.0;
  }

  const double h_a = entropy(row, n);
  const double h_b = entropy(col, n);

  double h_a_given_b = 0.0;  // H(a|b): iterate columns, then rows
  for (int j = 0; j < kb; ++j) {
    for (int i = 0; i < ka; ++i) {
      const double c = joint[static_cast<std::size_t>(i) * static_cast<std::size_t>(kb) +
                             static_cast<std::size_t>(j)];
      if (c > 0.0) h_a_given_b -= c / n * std::log(c / col[static_cast<std::size_t>(j)]);
    }
  }
  double h_b_given_a = 0.0;
  for (int i = 0; i < ka; ++i) {
    for (int j = 0; j < kb; ++j) {
      const double c = joint[static_cast<std::size_t>(i) * static_cast<std::size_t>(kb) +
                             static_cast<std::size_t>(j)];
      if (c > 0.0) h_b_given_a -= c / n * std::log(c / row[static_cast<std::size_t>(i)]);
    }
  }

  const double homogeneity = h_a > 0.0 ? std::clamp(1.0 - h_a_given_b / h_a, 0.0, 1.0) : 1.0;
  const double completeness = h_b > 0.0 ? std::clamp(1.0 - h_b_given_a / h_b, 0.0, 1.0) : 1.0;
  if (homogeneity + completeness == 0.0) return 0.0;
  return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

}  // namespace driverseg
