#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driverseg/learn.hpp"
#include "driverseg/rng.hpp"
#include "oracles.hpp"

using namespace driverseg;

namespace {

PointSet make_points(std::vector<std::vector<double>> rows) {
  PointSet ps;
  for (std::size_t i = 0; i < rows.size(); ++i) ps.user_ids.push_back("u" + std::to_string(i));
  ps.points = std::move(rows);
  return ps;
}

PointSet two_blobs(rng::engine& eng, std::size_t per_blob, double separation, double spread) {
  PointSet ps;
  rng::normal_sampler normal;
  for (std::size_t i = 0; i < 2 * per_blob; ++i) {
    const double center = i < per_blob ? 0.0 : separation;
    std::vector<double> p(4);
    for (double& c : p) c = center + spread * normal(eng);
    ps.user_ids.push_back("u" + std::to_string(i));
    ps.points.push_back(std::move(p));
  }
  return ps;
}

std::vector<int> random_labels(rng::engine& eng, std::size_t n, int k) {
  std::vector<int> out(n);
  for (int& l : out) l = static_cast<int>(rng::uniform_index(eng, static_cast<std::uint64_t>(k)));
  return out;
}

}  // namespace

TEST_CASE("kmeans separates two distant groups exactly") {
  rng::engine eng(5);
  const PointSet ps = two_blobs(eng, 5, 100.0, 0.1);
  const Clustering c = kmeans(ps, 2, 123);
  REQUIRE(c.labels.size() == 10);
  for (std::size_t i = 1; i < 5; ++i) CHECK(c.labels[i] == c.labels[0]);
  for (std::size_t i = 6; i < 10; ++i) CHECK(c.labels[i] == c.labels[5]);
  CHECK(c.labels[0] != c.labels[5]);
}

TEST_CASE("kmeans with K = n puts every point in its own cluster") {
  rng::engine eng(6);
  const PointSet ps = two_blobs(eng, 4, 10.0, 0.5);
  const Clustering c = kmeans(ps, 8, 9);
  CHECK(c.inertia == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<int> sorted = c.labels;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("kmeans with K = 1 recovers the total sum of squares") {
  rng::engine eng(7);
  const PointSet ps = two_blobs(eng, 6, 3.0, 1.0);
  const Clustering c = kmeans(ps, 1, 1);

  // Direct oracle: centroid and squared deviations.
  const std::size_t dim = ps.dim();
  std::vector<double> centroid(dim, 0.0);
  for (const auto& p : ps.points) {
    for (std::size_t j = 0; j < dim; ++j) centroid[j] += p[j];
  }
  for (double& c2 : centroid) c2 /= static_cast<double>(ps.size());
  double total = 0.0;
  for (const auto& p : ps.points) {
    for (std::size_t j = 0; j < dim; ++j) {
      total += (p[j] - centroid[j]) * (p[j] - centroid[j]);
    }
  }
  CHECK(c.inertia == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("kmeans rejects infeasible cluster counts") {
  rng::engine eng(8);
  const PointSet ps = two_blobs(eng, 2, 1.0, 0.1);
  CHECK_THROWS_AS(kmeans(ps, 5, 0), infeasible_error);
  CHECK_THROWS_AS(kmeans(ps, 0, 0), domain_error);
  CHECK_THROWS_AS(kmeans(ps, -1, 0), domain_error);
}

TEST_CASE("kmeans is deterministic in the seed") {
  rng::engine eng(9);
  const PointSet ps = two_blobs(eng, 10, 2.0, 1.0);
  const Clustering a = kmeans(ps, 3, 42);
  const Clustering b = kmeans(ps, 3, 42);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("kmeans inertia never increases within the winning restart") {
  rng::engine eng(10);
  for (int rep = 0; rep < 10; ++rep) {
    const PointSet ps = two_blobs(eng, 8, 1.5, 1.0);
    const Clustering c = kmeans(ps, 4, static_cast<std::uint64_t>(rep));
    REQUIRE(!c.inertia_history.empty());
    for (std::size_t i = 1; i < c.inertia_history.size(); ++i) {
      CHECK(c.inertia_history[i] <= c.inertia_history[i - 1] + 1e-9);
    }
    CHECK(c.inertia == c.inertia_history.back());
  }
}

TEST_CASE("kmeans partitions are invariant under isometries") {
  rng::engine eng(11);
  const PointSet ps = two_blobs(eng, 7, 4.0, 0.8);

  PointSet translated = ps;
  for (auto& p : translated.points) {
    for (std::size_t j = 0; j < p.size(); ++j) p[j] += 42.0;
  }
  PointSet permuted = ps;
  for (auto& p : permuted.points) {
    std::rotate(p.begin(), p.begin() + 1, p.end());  // axis permutation
  }

  const Clustering base = kmeans(ps, 2, 77);
  const Clustering t = kmeans(translated, 2, 77);
  const Clustering x = kmeans(permuted, 2, 77);
  CHECK(v_measure(base.labels, t.labels) == 1.0);
  CHECK(v_measure(base.labels, x.labels) == 1.0);
}

TEST_CASE("pca on a line embedded in 10-D explains everything with one component") {
  rng::engine eng(12);
  PointSet ps;
  std::vector<double> direction(10);
  rng::normal_sampler normal;
  for (double& d : direction) d = normal(eng);
  for (int i = 0; i < 30; ++i) {
    const double s = rng::uniform(eng, -2.0, 2.0);
    std::vector<double> p(10);
    for (std::size_t j = 0; j < 10; ++j) p[j] = s * direction[j];
    ps.user_ids.push_back("u" + std::to_string(i));
    ps.points.push_back(std::move(p));
  }
  const PcaProjection pca = pca_project(ps);
  CHECK(std::abs(pca.explained_variance_ratio[0] - 1.0) <= 1e-9);
  CHECK(pca.explained_variance_ratio[1] <= 1e-9);
}

TEST_CASE("pca ratios are unchanged when every point is duplicated") {
  rng::engine eng(13);
  const PointSet ps = two_blobs(eng, 6, 2.0, 0.7);
  PointSet doubled = ps;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    doubled.user_ids.push_back(ps.user_ids[i] + "dup");
    doubled.points.push_back(ps.points[i]);
  }
  const PcaProjection a = pca_project(ps);
  const PcaProjection b = pca_project(doubled);
  for (std::size_t j = 0; j < a.ratio_spectrum.size(); ++j) {
    CHECK(a.ratio_spectrum[j] == doctest::Approx(b.ratio_spectrum[j]).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(a.coords[i][0] == doctest::Approx(b.coords[i][0]).epsilon(1e-9));
    CHECK(a.coords[i][1] == doctest::Approx(b.coords[i][1]).epsilon(1e-9));
  }
}

TEST_CASE("pca of an isotropic cloud spreads variance evenly") {
  // Monte-Carlo oracle: in 10-D the covariance spectrum is flat, so each
  // ratio concentrates at 0.1 and the first two together explain ~0.2.
  rng::engine eng(14);
  rng::normal_sampler normal;
  PointSet ps;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> p(10);
    for (double& c : p) c = normal(eng);
    ps.user_ids.push_back(std::to_string(i));
    ps.points.push_back(std::move(p));
  }
  const PcaProjection pca = pca_project(ps);
  const double first_two = pca.explained_variance_ratio[0] + pca.explained_variance_ratio[1];
  CHECK(std::abs(first_two - 0.2) <= 0.05);
  CHECK(pca.explained_variance_ratio[0] == doctest::Approx(0.1).epsilon(0.35));
}

TEST_CASE("pca ratio spectrum sums to one and never increases") {
  rng::engine eng(15);
  for (int rep = 0; rep < 30; ++rep) {
    const PointSet ps = two_blobs(eng, 5 + rep % 7, 1.0 + rep, 0.5);
    const PcaProjection pca = pca_project(ps);
    const double sum =
        std::accumulate(pca.ratio_spectrum.begin(), pca.ratio_spectrum.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    for (std::size_t j = 1; j < pca.ratio_spectrum.size(); ++j) {
      CHECK(pca.ratio_spectrum[j] <= pca.ratio_spectrum[j - 1] + 1e-12);
    }
  }
}

TEST_CASE("pca error paths") {
  CHECK_THROWS_AS(pca_project(make_points({{1, 2, 3}})), insufficient_data_error);
  CHECK_THROWS_AS(pca_project(make_points({{1, 1}, {1, 1}, {1, 1}})), degenerate_range_error);
}

TEST_CASE("v_measure on the stated cases") {
  const std::vector<int> a = {0, 0, 1, 1};
  CHECK(v_measure(a, a) == 1.0);
  CHECK(v_measure(a, std::vector<int>{1, 1, 0, 0}) == 1.0);  // permuted labels
  CHECK(v_measure(a, std::vector<int>{0, 0, 0, 0}) == 0.0);  // h = 0 forces V = 0
  // Frozen from the contingency-entropy oracle.
  const std::vector<int> b = {0, 1, 1, 1};
  CHECK(v_measure(a, b) == doctest::Approx(0.3437110184854507).epsilon(1e-12));
  CHECK(v_measure(a, b) == doctest::Approx(oracles::v_measure(a, b)).epsilon(1e-12));
}

TEST_CASE("v_measure input validation") {
  CHECK_THROWS_AS(v_measure(std::vector<int>{0, 1}, std::vector<int>{0}), alignment_error);
  CHECK_THROWS_AS(v_measure(std::vector<int>{}, std::vector<int>{}), empty_input_error);
}

TEST_CASE("v_measure is exactly symmetric and relabel-invariant") {
  rng::engine eng(16);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng::uniform_index(eng, 18);
    const int k = 1 + static_cast<int>(rng::uniform_index(eng, 5));
    const auto a = random_labels(eng, n, k);
    const auto b = random_labels(eng, n, k);
    const double v = v_measure(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == v_measure(b, a));  // bit-exact

    // Bijective relabeling of either side.
    auto relabel = [](const std::vector<int>& l, int offset) {
      std::vector<int> out = l;
      for (int& x : out) x = offset - x;
      return out;
    };
    CHECK(v == v_measure(relabel(a, 9), b));
    CHECK(v == v_measure(a, relabel(b, 5)));

    CHECK(v == doctest::Approx(oracles::v_measure(a, b)).epsilon(1e-12));
  }
  // Identity on clusterings with at least two distinct labels.
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_labels(eng, 3 + rng::uniform_index(eng, 10), 3);
    bool two_labels = false;
    for (int x : a) two_labels = two_labels || x != a[0];
    if (two_labels) CHECK(v_measure(a, a) == 1.0);
  }
}
