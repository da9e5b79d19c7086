#include <doctest.h>

#include <cmath>
#include <numeric>

#include "driverseg/features.hpp"
#include "driverseg/rng.hpp"
#include "oracles.hpp"

using namespace driverseg;

namespace {

UniformSeries series(std::vector<double> values, double rate = 4.0) {
  UniformSeries s;
  s.rate = rate;
  s.values = std::move(values);
  return s;
}

std::vector<double> random_series(rng::engine& eng, std::size_t max_len) {
  const std::size_t n = 1 + rng::uniform_index(eng, max_len);
  std::vector<double> out(n);
  rng::normal_sampler normal;
  for (double& v : out) v = 10.0 * normal(eng);
  // Sprinkle duplicates so plateaus actually occur.
  for (std::size_t i = 1; i < n; ++i) {
    if (rng::uniform01(eng) < 0.15) out[i] = out[i - 1];
  }
  return out;
}

}  // namespace

TEST_CASE("singular_points applies the strict product test") {
  const SingularPoints sp = singular_points(series({0, 1, 0, 1, 0}));
  CHECK(sp.all == std::vector<std::size_t>{1, 2, 3});
  CHECK(sp.maxima == std::vector<std::size_t>{1, 3});
}

TEST_CASE("singular_points of a monotone series is empty") {
  const SingularPoints sp = singular_points(series({0, 1, 2, 3}));
  CHECK(sp.all.empty());
  CHECK(sp.maxima.empty());
}

TEST_CASE("plateaus are not singular points") {
  const SingularPoints sp = singular_points(series({0, 1, 1, 0}));
  CHECK(sp.all.empty());
}

TEST_CASE("short series admit no singular points") {
  CHECK(singular_points(series({1, 2})).all.empty());
  CHECK(singular_points(series({})).all.empty());
}

TEST_CASE("difference_quotient scales steps by the rate") {
  CHECK(difference_quotient(series({0, 1, 3})) == std::vector<double>{4, 8});
  CHECK(difference_quotient(series({5, 5, 5})) == std::vector<double>{0, 0});
  CHECK(difference_quotient(series({1, 0})) == std::vector<double>{-4});
  CHECK(difference_quotient(series({1})).empty());
}

TEST_CASE("peak_intervals emits gaps between consecutive extrema") {
  CHECK(peak_intervals(series({0, 1, 0, 1, 0})) == std::vector<double>{0.25, 0.25});
  CHECK(peak_intervals(series({0, 1, 0})).empty());   // single extremum
  CHECK(peak_intervals(series({0, 1, 2, 3})).empty());  // none at all
}

TEST_CASE("peak_values keeps maxima only") {
  CHECK(peak_values(series({0, 2, 0, 5, 0})) == std::vector<double>{2, 5});
  CHECK(peak_values(series({0, 1, 2})).empty());
  CHECK(peak_values(series({0, -1, 0})).empty());  // a minimum
}

TEST_CASE("moving stats on a constant series") {
  const auto s = series(std::vector<double>(300, 7.0));
  for (double v : moving_stat(s, MovingStat::mean)) CHECK(v == doctest::Approx(7.0));
  for (double v : moving_stat(s, MovingStat::median)) CHECK(v == doctest::Approx(7.0));
  for (double v : moving_stat(s, MovingStat::stddev)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("moving mean at the center of a full ramp window") {
  std::vector<double> ramp(241);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const auto m = moving_stat(series(std::move(ramp)), MovingStat::mean);
  CHECK(m[120] == doctest::Approx(120.0));
}

TEST_CASE("moving median with truncated windows matches per-index sorting") {
  const auto s = series({0, 100, 0});
  const auto med = moving_stat(s, MovingStat::median);
  const auto expected = oracles::moving(s.values, oracles::Stat::median, kMovingHalfWidth);
  REQUIRE(med.size() == 3);
  for (std::size_t i = 0; i < med.size(); ++i) {
    CHECK(med[i] == expected[i]);
    CHECK(med[i] == 0.0);
  }
}

TEST_CASE("feature extractors match brute-force recomputation on random series") {
  rng::engine eng(99);
  for (int rep = 0; rep < 60; ++rep) {
    const auto values = random_series(eng, 400);
    const auto s = series(values);

    const SingularPoints sp = singular_points(s);
    CHECK(sp.all == oracles::singular_points(values));
    CHECK(sp.maxima == oracles::local_maxima(values));

    const auto dq = difference_quotient(s);
    const auto dq_ref = oracles::diff_quotient(values, 4.0);
    REQUIRE(dq.size() == dq_ref.size());
    for (std::size_t i = 0; i < dq.size(); ++i) {
      CHECK(dq[i] == doctest::Approx(dq_ref[i]).epsilon(1e-12));
    }

    CHECK(peak_values(s) == oracles::peak_values(values));

    const auto pi = peak_intervals(s);
    const auto pi_ref = oracles::peak_intervals(values, 4.0);
    REQUIRE(pi.size() == pi_ref.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
      CHECK(pi[i] == doctest::Approx(pi_ref[i]).epsilon(1e-12));
      CHECK(pi[i] > 0.0);
    }

    // Small half-width exercises both truncation and interior windows.
    for (const std::size_t hw : {3ul, 17ul}) {
      const auto mean = moving_stat(s, MovingStat::mean, hw);
      const auto med = moving_stat(s, MovingStat::median, hw);
      const auto sd = moving_stat(s, MovingStat::stddev, hw);
      const auto mean_ref = oracles::moving(values, oracles::Stat::mean, hw);
      const auto med_ref = oracles::moving(values, oracles::Stat::median, hw);
      const auto sd_ref = oracles::moving(values, oracles::Stat::stddev, hw);
      for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(std::abs(mean[i] - mean_ref[i]) <= 1e-9);
        CHECK(med[i] == med_ref[i]);
        CHECK(std::abs(sd[i] - sd_ref[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("peak set sizes satisfy the counting identities") {
  rng::engine eng(7);
  for (int rep = 0; rep < 40; ++rep) {
    const auto values = random_series(eng, 300);
    const auto s = series(values);
    const SingularPoints sp = singular_points(s);
    const auto intervals = peak_intervals(s);
    const auto maxima = peak_values(s);
    CHECK(intervals.size() ==
          (sp.all.size() > 0 ? sp.all.size() - 1 : 0));
    CHECK(maxima.size() == sp.maxima.size());

    // Maxima and minima partition J.
    std::size_t minima = 0;
    for (std::size_t j : sp.all) {
      if (values[j] < values[j + 1]) ++minima;
    }
    CHECK(sp.maxima.size() + minima == sp.all.size());
  }
}

TEST_CASE("moving stats are shift equivariant") {
  rng::engine eng(13);
  const auto values = random_series(eng, 250);
  const auto s = series(values);
  auto shifted = values;
  const double c = 123.456;
  for (double& v : shifted) v += c;
  const auto s2 = series(std::move(shifted));

  const auto mean1 = moving_stat(s, MovingStat::mean, 9);
  const auto mean2 = moving_stat(s2, MovingStat::mean, 9);
  const auto med1 = moving_stat(s, MovingStat::median, 9);
  const auto med2 = moving_stat(s2, MovingStat::median, 9);
  const auto sd1 = moving_stat(s, MovingStat::stddev, 9);
  const auto sd2 = moving_stat(s2, MovingStat::stddev, 9);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(std::abs(mean2[i] - mean1[i] - c) <= 1e-9);
    CHECK(std::abs(med2[i] - med1[i] - c) <= 1e-9);
    CHECK(std::abs(sd2[i] - sd1[i]) <= 1e-9);
  }
}

TEST_CASE("difference quotient of a cumulative sum recovers the shifted series") {
  rng::engine eng(17);
  const auto values = random_series(eng, 200);
  std::vector<double> cumsum(values.size());
  std::partial_sum(values.begin(), values.end(), cumsum.begin());
  const auto dq = difference_quotient(series(std::move(cumsum)));
  for (std::size_t i = 0; i < dq.size(); ++i) {
    CHECK(std::abs(dq[i] / 4.0 - values[i + 1]) <= 1e-9);
  }
}

namespace {

UserRecord user_with_sessions(std::vector<std::vector<double>> sessions) {
  UserRecord u;
  u.user_id = "u";
  for (auto& values : sessions) {
    ResampledSession s;
    s.session_id = "s" + std::to_string(u.sessions.size());
    s.duration_seconds = static_cast<double>(values.size()) / 4.0;
    for (SignalKind k : kAllSignals) {
      s.signals[static_cast<int>(k)] = series(values);
    }
    u.sessions.push_back(std::move(s));
  }
  return u;
}

}  // namespace

TEST_CASE("extract_feature concatenates per-session outputs") {
  rng::engine eng(23);
  std::vector<double> a(10), b(10);
  rng::normal_sampler normal;
  for (double& v : a) v = normal(eng);
  for (double& v : b) v = normal(eng);
  const UserRecord u = user_with_sessions({a, b});

  SUBCASE("feature 1 is the identity pass-through") {
    const auto fv = extract_feature(u, SignalKind::GAS, FeatureKind::values);
    REQUIRE(fv.values.size() == 20);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(fv.values[i] == a[i]);
      CHECK(fv.values[10 + i] == b[i]);
    }
  }
  SUBCASE("feature 2 never crosses the session boundary") {
    const auto fv = extract_feature(u, SignalKind::GAS, FeatureKind::diff_quotient);
    CHECK(fv.values.size() == 18);  // 9 + 9
  }
  SUBCASE("session split invariance") {
    const UserRecord ua = user_with_sessions({a});
    const UserRecord ub = user_with_sessions({b});
    for (FeatureKind f : kAllFeatures) {
      const auto joint = extract_feature(u, SignalKind::SPD, f);
      const auto fa = extract_feature(ua, SignalKind::SPD, f);
      const auto fb = extract_feature(ub, SignalKind::SPD, f);
      auto expected = fa.values;
      expected.insert(expected.end(), fb.values.begin(), fb.values.end());
      CHECK(joint.values == expected);
    }
  }
}

TEST_CASE("a constant session has zero moving deviation everywhere") {
  const UserRecord u = user_with_sessions({std::vector<double>(50, 3.25)});
  const auto fv = extract_feature(u, SignalKind::BRK, FeatureKind::moving_std);
  REQUIRE(fv.values.size() == 50);
  for (double v : fv.values) CHECK(v == 0.0);
}
