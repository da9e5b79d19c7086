#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "driverseg/features.hpp"
#include "driverseg/histogram.hpp"
#include "driverseg/ingest.hpp"
#include "driverseg/learn.hpp"
#include "driverseg/rng.hpp"
#include "driverseg/synth.hpp"

using namespace driverseg;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("driverseg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

const std::string kFullHeader = "t,BRK,GAS,RPM,SPD,SWA,SWM,FACC,LACC";

}  // namespace

TEST_CASE("parse_session_log reads a dense three-row file") {
  const auto dir = temp_dir("parse_ok");
  const auto path = write_file(dir, "alice__s1.csv",
                               kFullHeader +
                                   "\n"
                                   "0.0,1,2,3,4,5,6,7,8\n"
                                   "0.25,1,2,3,4,5,6,7,8\n"
                                   "0.5,9,9,9,9,9,9,9,9\n");
  const Session s = parse_session_log(path);
  CHECK(s.user_id == "alice");
  CHECK(s.session_id == "s1");
  CHECK(s.duration_seconds() == doctest::Approx(0.5));
  for (SignalKind k : kAllSignals) {
    CHECK(s.of(k).size() == 3);
    CHECK(s.of(k).t[0] == 0.0);
    CHECK(s.of(k).t[2] == 0.5);
  }
  CHECK(s.of(SignalKind::BRK).x[0] == 1.0);
  CHECK(s.of(SignalKind::LACC).x[2] == 9.0);
}

TEST_CASE("parse_session_log normalizes timestamps to start at zero") {
  const auto dir = temp_dir("parse_origin");
  const auto path = write_file(dir, "u__s.csv",
                               kFullHeader +
                                   "\n"
                                   "100.0,1,1,1,1,1,1,1,1\n"
                                   "100.5,2,2,2,2,2,2,2,2\n");
  const Session s = parse_session_log(path);
  CHECK(s.of(SignalKind::GAS).t[0] == 0.0);
  CHECK(s.of(SignalKind::GAS).t[1] == doctest::Approx(0.5));
}

TEST_CASE("parse_session_log accepts per-signal sparsity via empty cells") {
  const auto dir = temp_dir("parse_sparse");
  const auto path = write_file(dir, "u__s.csv",
                               kFullHeader +
                                   "\n"
                                   "0.0,1,,3,4,5,6,7,8\n"
                                   "0.25,,2,,,,,,\n"
                                   "0.5,2,3,4,5,6,7,8,9\n");
  const Session s = parse_session_log(path);
  CHECK(s.of(SignalKind::BRK).size() == 2);   // rows 1 and 3
  CHECK(s.of(SignalKind::GAS).size() == 2);   // rows 2 and 3
  CHECK(s.of(SignalKind::RPM).size() == 2);
  CHECK(s.of(SignalKind::GAS).t[0] == doctest::Approx(0.25));
}

TEST_CASE("parse_session_log rejects non-monotone timestamps naming the line") {
  const auto dir = temp_dir("parse_order");
  const auto path = write_file(dir, "u__s.csv",
                               kFullHeader +
                                   "\n"
                                   "0.5,1,1,1,1,1,1,1,1\n"
                                   "0.25,2,2,2,2,2,2,2,2\n");
  CHECK_THROWS_WITH_AS(parse_session_log(path), doctest::Contains(":3"), ordering_error);
}

TEST_CASE("parse_session_log rejects a missing column listing it") {
  const auto dir = temp_dir("parse_schema");
  const auto path = write_file(dir, "u__s.csv",
                               "t,BRK,GAS,RPM,SPD,SWA,FACC,LACC\n"
                               "0.0,1,1,1,1,1,1,1\n");
  CHECK_THROWS_WITH_AS(parse_session_log(path), doctest::Contains("SWM"), schema_error);
}

TEST_CASE("parse_session_log rejects malformed numbers naming the line") {
  const auto dir = temp_dir("parse_bad_number");
  const auto path = write_file(dir, "u__s.csv",
                               kFullHeader +
                                   "\n"
                                   "0.0,1,1,1,1,1,1,1,1\n"
                                   "0.25,1,oops,1,1,1,1,1,1\n");
  CHECK_THROWS_WITH_AS(parse_session_log(path), doctest::Contains(":3"), parse_error);
}

TEST_CASE("parse_session_log rejects a bad file name") {
  const auto dir = temp_dir("parse_name");
  const auto path = write_file(dir, "nodelimiter.csv", kFullHeader + "\n");
  CHECK_THROWS_AS(parse_session_log(path), schema_error);
}

TEST_CASE("session CSV round trip preserves every series") {
  FleetSpec spec = FleetSpec::make(1, 1, 1, 30.0, 30.0, 99);
  const Session raw = generate_raw_session(spec, 0, 0, 0);
  const auto dir = temp_dir("roundtrip");
  const fs::path path = dir / (raw.user_id + "__" + raw.session_id + ".csv");
  write_session_csv(raw, path);
  const Session back = parse_session_log(path);
  for (SignalKind k : kAllSignals) {
    REQUIRE(back.of(k).size() == raw.of(k).size());
    for (std::size_t i = 0; i < raw.of(k).size(); ++i) {
      CHECK(back.of(k).t[i] == doctest::Approx(raw.of(k).t[i]).epsilon(1e-9));
      CHECK(back.of(k).x[i] == doctest::Approx(raw.of(k).x[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("resample_linear interpolates a line onto the 4 Hz grid") {
  SampleSeries s;
  s.push_back(0.0, 0.0);
  s.push_back(1.0, 4.0);
  const UniformSeries u = resample_linear(s, 4.0);
  REQUIRE(u.values.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(u.values[static_cast<std::size_t>(i)] == doctest::Approx(i));
}

TEST_CASE("resample_linear keeps a constant signal constant") {
  SampleSeries s;
  s.push_back(0.0, 7.0);
  s.push_back(2.0, 7.0);
  const UniformSeries u = resample_linear(s, 4.0);
  REQUIRE(u.values.size() == 9);
  for (double v : u.values) CHECK(v == 7.0);
}

TEST_CASE("resample_linear returns raw samples verbatim on grid hits") {
  SampleSeries s;
  s.push_back(0.0, 0.0);
  s.push_back(0.25, 1.0);
  s.push_back(0.5, 0.0);
  const UniformSeries u = resample_linear(s, 4.0);
  REQUIRE(u.values.size() == 3);
  CHECK(u.values[0] == 0.0);
  CHECK(u.values[1] == 1.0);
  CHECK(u.values[2] == 0.0);
}

TEST_CASE("resample_linear needs two samples") {
  SampleSeries s;
  s.push_back(0.0, 1.0);
  CHECK_THROWS_AS(resample_linear(s, 4.0), insufficient_data_error);
}

TEST_CASE("resampling an affine signal is exact on every grid point") {
  rng::engine eng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const double a = rng::uniform(eng, -10.0, 10.0);
    const double b = rng::uniform(eng, -5.0, 5.0);
    SampleSeries s;
    double t = 0.0;
    for (int i = 0; i < 40; ++i) {
      s.push_back(t, a + b * t);
      t += rng::uniform(eng, 0.01, 0.7);
    }
    const UniformSeries u = resample_linear(s, 4.0);
    const std::size_t expected =
        static_cast<std::size_t>(std::floor((s.t.back() - s.t.front()) * 4.0)) + 1;
    CHECK(u.values.size() == expected);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double truth = a + b * u.time_at(i);
      CHECK(std::abs(u.values[i] - truth) <= 1e-12 * std::max(1.0, std::abs(truth)));
    }
  }
}

TEST_CASE("filter_min_duration keeps the boundary user") {
  auto user_with_hours = [](const std::string& id, double hours) {
    UserRecord u;
    u.user_id = id;
    ResampledSession s;
    s.duration_seconds = hours * 3600.0;
    u.sessions.push_back(s);
    return u;
  };
  const std::vector<UserRecord> users = {user_with_hours("short", 9.9),
                                         user_with_hours("exact", 10.0)};
  const auto kept = filter_min_duration(users, 10.0);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].user_id == "exact");

  SUBCASE("zero threshold is the identity") {
    const auto all = filter_min_duration(users, 0.0);
    REQUIRE(all.size() == 2);
    CHECK(all[0].user_id == "short");
  }
  SUBCASE("empty input stays empty") {
    CHECK(filter_min_duration({}, 10.0).empty());
  }
  SUBCASE("idempotent and monotone in the threshold") {
    const auto once = filter_min_duration(users, 9.95);
    const auto twice = filter_min_duration(once, 9.95);
    CHECK(once.size() == twice.size());
    const auto tighter = filter_min_duration(users, 11.0);
    CHECK(tighter.size() <= once.size());
  }
}

TEST_CASE("assemble_users groups sessions by user and sorts users by id") {
  FleetSpec spec = FleetSpec::make(1, 2, 2, 20.0, 20.0, 5);
  std::vector<Session> sessions;
  for (int d = 1; d >= 0; --d) {
    for (int s = 0; s < 2; ++s) sessions.push_back(generate_raw_session(spec, 0, d, s));
  }
  const auto users = assemble_users(sessions);
  REQUIRE(users.size() == 2);
  CHECK(users[0].user_id == "drv000");
  CHECK(users[1].user_id == "drv001");
  CHECK(users[0].sessions.size() == 2);
  CHECK(users[0].sessions[0].of(SignalKind::GAS).rate == 4.0);
}

TEST_CASE("synthetic fleet generation is a pure function of the fleet spec") {
  const FleetSpec spec = FleetSpec::make(1, 5, 2, 15.0, 30.0, 77);
  const SyntheticFleet a = generate_synthetic_fleet(spec);
  const SyntheticFleet b = generate_synthetic_fleet(spec, 2);
  REQUIRE(a.users.size() == 5);
  REQUIRE(b.users.size() == 5);
  for (std::size_t u = 0; u < a.users.size(); ++u) {
    CHECK(a.users[u].user_id == b.users[u].user_id);
    REQUIRE(a.users[u].sessions.size() == b.users[u].sessions.size());
    for (std::size_t s = 0; s < a.users[u].sessions.size(); ++s) {
      for (SignalKind k : kAllSignals) {
        const auto& va = a.users[u].sessions[s].of(k).values;
        const auto& vb = b.users[u].sessions[s].of(k).values;
        REQUIRE(va.size() == vb.size());
        CHECK(va == vb);  // bitwise identical
      }
    }
  }
}

TEST_CASE("synthetic fleet counts drivers per archetype") {
  const FleetSpec spec = FleetSpec::make(3, 6, 1, 10.0, 10.0, 3);
  const SyntheticFleet fleet = generate_synthetic_fleet(spec);
  REQUIRE(fleet.users.size() == 18);
  int per_archetype[3] = {0, 0, 0};
  for (int g : fleet.archetype) ++per_archetype[g];
  CHECK(per_archetype[0] == 6);
  CHECK(per_archetype[1] == 6);
  CHECK(per_archetype[2] == 6);
}

TEST_CASE("fleet spec validation rejects bad values") {
  FleetSpec spec = FleetSpec::make(1, 0, 1, 10.0, 10.0, 1);
  CHECK_THROWS_AS(spec.validate(), config_error);
  spec = FleetSpec::make(0, 1, 1, 10.0, 10.0, 1);
  CHECK_THROWS_AS(spec.validate(), config_error);
  spec = FleetSpec::make(1, 1, 1, 10.0, 5.0, 1);
  CHECK_THROWS_AS(spec.validate(), config_error);
  spec = FleetSpec::make(1, 1, 1, 10.0, 10.0, 1);
  spec.param(0, SignalKind::GAS).stddev = -1.0;
  CHECK_THROWS_AS(spec.validate(), config_error);
}

TEST_CASE("parse_fleet_spec reads overrides and rejects unknown keys") {
  const auto dir = temp_dir("fleet_spec");
  const auto path = write_file(dir, "fleet.cfg",
                               "# two archetypes, far apart on GAS\n"
                               "archetypes = 2\n"
                               "drivers_per_archetype = 3\n"
                               "sessions_per_driver = 2\n"
                               "session_seconds_min = 60\n"
                               "session_seconds_max = 90\n"
                               "seed = 11\n"
                               "archetype.0.GAS.mean = 20\n"
                               "archetype.1.GAS.mean = 60\n");
  const FleetSpec spec = parse_fleet_spec(path);
  CHECK(spec.archetypes == 2);
  CHECK(spec.drivers_per_archetype == 3);
  CHECK(spec.seed == 11);
  CHECK(spec.param(0, SignalKind::GAS).mean == 20.0);
  CHECK(spec.param(1, SignalKind::GAS).mean == 60.0);
  CHECK(spec.param(0, SignalKind::BRK).mean == default_signal_params(SignalKind::BRK).mean);

  const auto bad = write_file(dir, "bad.cfg", "archetypes = 1\nnot_a_key = 7\n");
  CHECK_THROWS_WITH_AS(parse_fleet_spec(bad), doctest::Contains("not_a_key"), config_error);
  const auto bad_idx = write_file(dir, "bad_idx.cfg",
                                  "archetypes = 1\narchetype.3.GAS.mean = 1\n");
  CHECK_THROWS_AS(parse_fleet_spec(bad_idx), config_error);
}

TEST_CASE("two archetypes with disjoint GAS levels split cleanly downstream") {
  FleetSpec spec = FleetSpec::make(2, 6, 2, 300.0, 300.0, 42);
  spec.param(0, SignalKind::GAS).mean = 20.0;
  spec.param(1, SignalKind::GAS).mean = 60.0;
  const SyntheticFleet fleet = generate_synthetic_fleet(spec, 2);

  const auto vectors = extract_feature_table(fleet.users, SignalKind::GAS, FeatureKind::values);
  const HistogramSet set = build_histogram_set(vectors);
  REQUIRE(set.user_ids.size() == 12);
  const Clustering clustering = kmeans(point_set_from(set), 2, 7);
  CHECK(v_measure(clustering.labels, fleet.archetype) == doctest::Approx(1.0).epsilon(1e-12));
}
