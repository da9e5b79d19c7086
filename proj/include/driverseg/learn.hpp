#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driverseg/histogram.hpp"

namespace driverseg {

// n points of equal dimension with an aligned user id per point.
struct PointSet {
  std::vector<std::string> user_ids;
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

PointSet point_set_from(const HistogramSet& set);

struct Clustering {
  std::vector<int> labels;  // values in [0, k)
  int k = 0;
  double inertia = 0.0;
  // Inertia after each assignment step of the winning restart;
  // non-increasing by construction.
  std::vector<double> inertia_history;
};

struct KMeansOptions {
  int restarts = 10;
  double tol = 1e-8;  // max centroid shift treated as converged
  int max_iterations = 300;
};

// Lloyd iterations with k-means++ initialization; the best of
// options.restarts runs (by inertia) wins. Deterministic in
// (points, k, seed). Throws domain_error for k <= 0 and infeasible_error
// for k > n.
Clustering kmeans(const PointSet& points, int k, std::uint64_t seed, KMeansOptions options = {});

struct PcaProjection {
  std::vector<std::string> user_ids;
  std::vector<std::vector<double>> coords;        // n x dims
  std::vector<double> explained_variance_ratio;   // first dims ratios
  std::vector<double> ratio_spectrum;             // all ratios, sums to 1
};

// Projection onto the top principal components of the sample covariance.
// Component signs are fixed so the largest-magnitude coordinate of each
// component is positive. Throws insufficient_data_error for n < 2 and
// degenerate_range_error when the total variance is zero.
PcaProjection pca_project(const PointSet& points, int dims = 2);

// Entropy-based similarity of two clusterings of the same user sequence:
// harmonic mean of homogeneity and completeness, in [0, 1], exactly
// symmetric and invariant under relabeling. Throws alignment_error on
// length mismatch, empty_input_error on empty labels.
double v_measure(std::span<const int> a, std::span<const int> b);

}  // namespace driverseg
