#include "driverseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "driverseg/rng.hpp"
#include "util.hpp"

namespace driverseg {

namespace {

// Seed streams, keeping driver/session/signal draws well separated.
constexpr std::uint64_t kSessionStream = 0x5e5510;
constexpr std::uint64_t kSignalStream = 0x516e41;

struct Peak {
  std::size_t start;
  std::size_t length;
  double amp;
};

}  // namespace

SignalParams default_signal_params(SignalKind kind) {
  switch (kind) {
    case SignalKind::BRK:
      return {8.0, 5.0, 0.6, 0.06, 25.0, 1.0, 0.0};
    case SignalKind::GAS:
      return {30.0, 10.0, 0.4, 0.08, 30.0, 2.0, 0.0};
    case SignalKind::RPM:
      return {2000.0, 350.0, 0.3, 0.04, 900.0, 80.0, 600.0};
    case SignalKind::SPD:
      return {60.0, 18.0, 0.15, 0.03, 25.0, 4.0, 0.0};
    case SignalKind::SWA:
      return {0.0, 25.0, 0.8, 0.15, 60.0, 0.0, -1e300};
    case SignalKind::SWM:
      return {0.0, 2.5, 1.2, 0.15, 5.0, 0.0, -1e300};
    case SignalKind::FACC:
      return {0.0, 0.9, 1.0, 0.1, 2.5, 0.0, -1e300};
    case SignalKind::LACC:
    default:
      return {0.0, 0.7, 1.0, 0.1, 2.0, 0.0, -1e300};
  }
}

FleetSpec FleetSpec::make(int archetypes, int drivers_per_archetype, int sessions_per_driver,
                          double session_seconds_min, double session_seconds_max,
                          std::uint64_t seed) {
  FleetSpec spec;
  spec.archetypes = archetypes;
  spec.drivers_per_archetype = drivers_per_archetype;
  spec.sessions_per_driver = sessions_per_driver;
  spec.session_seconds_min = session_seconds_min;
  spec.session_seconds_max = session_seconds_max;
  spec.seed = seed;
  spec.params.resize(std::max(archetypes, 0));
  for (auto& per_signal : spec.params) {
    for (SignalKind k : kAllSignals) per_signal[static_cast<int>(k)] = default_signal_params(k);
  }
  return spec;
}

SignalParams& FleetSpec::param(int archetype, SignalKind kind) {
  return params.at(archetype)[static_cast<int>(kind)];
}

const SignalParams& FleetSpec::param(int archetype, SignalKind kind) const {
  return params.at(archetype)[static_cast<int>(kind)];
}

void FleetSpec::validate() const {
  if (archetypes < 1) throw config_error("fleet spec: archetypes must be >= 1");
  if (drivers_per_archetype < 1) {
    throw config_error("fleet spec: drivers_per_archetype must be >= 1");
  }
  if (sessions_per_driver < 1) throw config_error("fleet spec: sessions_per_driver must be >= 1");
  if (!(session_seconds_min > 0.0) || session_seconds_max < session_seconds_min) {
    throw config_error("fleet spec: need 0 < session_seconds_min <= session_seconds_max");
  }
  if (static_cast<int>(params.size()) != archetypes) {
    throw config_error("fleet spec: per-archetype parameter table has wrong size");
  }
  for (int g = 0; g < archetypes; ++g) {
    for (SignalKind k : kAllSignals) {
      const SignalParams& p = param(g, k);
      if (!(p.stddev >= 0.0)) throw config_error("fleet spec: stddev must be >= 0");
      if (!(p.reversion > 0.0)) throw config_error("fleet spec: reversion must be > 0");
      if (!(p.peak_rate >= 0.0)) throw config_error("fleet spec: peak_rate must be >= 0");
      if (!(p.peak_amp >= 0.0)) throw config_error("fleet spec: peak_amp must be >= 0");
      if (!(p.session_jitter >= 0.0)) {
        throw config_error("fleet spec: session_jitter must be >= 0");
      }
    }
  }
}

FleetSpec parse_fleet_spec(const std::filesystem::path& path) {
  const auto entries = detail::read_key_value_file(path);

  // Sizing keys first, so archetype overrides can be bounds-checked.
  FleetSpec spec = FleetSpec::make(1, 1, 1, 600.0, 600.0, 0);
  auto to_int = [&](const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw config_error(path.string() + ": key '" + key + "': not an integer: '" + value + "'");
    }
  };
  auto to_double = [&](const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw config_error(path.string() + ": key '" + key + "': not a number: '" + value + "'");
    }
  };
  auto to_u64 = [&](const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw config_error(path.string() + ": key '" + key + "': not an unsigned integer: '" +
                         value + "'");
    }
  };

  for (const auto& [key, value] : entries) {
    if (key == "archetypes") {
      spec.archetypes = to_int(key, value);
      if (spec.archetypes >= 1) {
        spec.params = FleetSpec::make(spec.archetypes, 1, 1, 600, 600, 0).params;
      }
    } else if (key == "drivers_per_archetype") {
      spec.drivers_per_archetype = to_int(key, value);
    } else if (key == "sessions_per_driver") {
      spec.sessions_per_driver = to_int(key, value);
    } else if (key == "session_seconds_min") {
      spec.session_seconds_min = to_double(key, value);
    } else if (key == "session_seconds_max") {
      spec.session_seconds_max = to_double(key, value);
    } else if (key == "seed") {
      spec.seed = to_u64(key, value);
    } else if (key.rfind("archetype.", 0) == 0) {
      const auto parts = detail::split(key, '.');
      if (parts.size() != 4) {
        throw config_error(path.string() + ": bad archetype key '" + key +
                           "', expected archetype.<g>.<SIGNAL>.<param>");
      }
      const int g = to_int(key, parts[1]);
      if (g < 0 || g >= spec.archetypes) {
        throw config_error(path.string() + ": key '" + key + "': archetype index out of range");
      }
      SignalKind kind;
      try {
        kind = signal_from_name(parts[2]);
      } catch (const config_error&) {
        throw config_error(path.string() + ": key '" + key + "': unknown signal '" + parts[2] +
                           "'");
      }
      SignalParams& p = spec.param(g, kind);
      const double v = to_double(key, value);
      if (parts[3] == "mean") {
        p.mean = v;
      } else if (parts[3] == "stddev") {
        p.stddev = v;
      } else if (parts[3] == "reversion") {
        p.reversion = v;
      } else if (parts[3] == "peak_rate") {
        p.peak_rate = v;
      } else if (parts[3] == "peak_amp") {
        p.peak_amp = v;
      } else if (parts[3] == "session_jitter") {
        p.session_jitter = v;
      } else if (parts[3] == "floor") {
        p.floor = v;
      } else {
        throw config_error(path.string() + ": key '" + key + "': unknown parameter '" +
                           parts[3] + "'");
      }
    } else {
      throw config_error(path.string() + ": unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

std::string synth_user_id(int driver_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "drv%03d", driver_index);
  return buf;
}

std::string synth_session_id(int session_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%03d", session_index);
  return buf;
}

Session generate_raw_session(const FleetSpec& spec, int archetype, int driver_index,
                             int session_index) {
  const double dt = 1.0 / kRawRateHz;

  // Session length is a session-level draw shared by all signals.
  rng::engine session_eng(
      rng::derive(spec.seed, kSessionStream, static_cast<std::uint64_t>(driver_index),
                  static_cast<std::uint64_t>(session_index)));
  const double seconds =
      rng::uniform(session_eng, spec.session_seconds_min, spec.session_seconds_max);
  const auto steps = static_cast<std::size_t>(std::llround(seconds * kRawRateHz));

  Session session;
  session.user_id = synth_user_id(driver_index);
  session.session_id = synth_session_id(session_index);

  for (SignalKind kind : kAllSignals) {
    const SignalParams& p = spec.param(archetype, kind);
    rng::engine eng(rng::derive(spec.seed, kSignalStream,
                                static_cast<std::uint64_t>(driver_index),
                                static_cast<std::uint64_t>(session_index),
                                static_cast<std::uint64_t>(kind)));
    rng::normal_sampler normal;

    const double level = p.mean + p.session_jitter * normal(eng);
    // Exact one-step transition of the mean-reverting process keeps the
    // stationary stddev at p.stddev for any reversion rate.
    const double decay = std::exp(-p.reversion * dt);
    const double step_sigma = p.stddev * std::sqrt(1.0 - decay * decay);

    SampleSeries& series = session.of(kind);
    series.t.reserve(steps + 1);
    series.x.reserve(steps + 1);

    std::vector<Peak> active;
    double base = level + p.stddev * normal(eng);
    for (std::size_t i = 0; i <= steps; ++i) {
      if (i > 0) base = level + (base - level) * decay + step_sigma * normal(eng);

      if (p.peak_rate > 0.0 && p.peak_amp > 0.0 &&
          rng::uniform01(eng) < p.peak_rate * dt) {
        const double duration = rng::uniform(eng, 1.0, 3.0);
        active.push_back({i, static_cast<std::size_t>(std::llround(duration * kRawRateHz)),
                          p.peak_amp * rng::uniform(eng, 0.5, 1.5)});
      }

      double bump = 0.0;
      for (std::size_t a = 0; a < active.size();) {
        const std::size_t offset = i - active[a].start;
        if (offset >= active[a].length) {
          active[a] = active.back();
          active.pop_back();
          continue;
        }
        const double phase = static_cast<double>(offset) / static_cast<double>(active[a].length);
        bump += active[a].amp * std::sin(phase * 3.14159265358979323846);
        ++a;
      }

      series.push_back(static_cast<double>(i) * dt, std::max(base + bump, p.floor));
    }
  }
  return session;
}

SyntheticFleet generate_synthetic_fleet(const FleetSpec& spec, int jobs) {
  spec.validate();
  const int drivers = spec.driver_count();

  SyntheticFleet fleet;
  fleet.users.resize(drivers);
  fleet.archetype.resize(drivers);

  detail::parallel_for(drivers, jobs, [&](int d) {
    const int archetype = d / spec.drivers_per_archetype;
    UserRecord record;
    record.user_id = synth_user_id(d);
    record.sessions.reserve(spec.sessions_per_driver);
    for (int s = 0; s < spec.sessions_per_driver; ++s) {
      record.sessions.push_back(
          resample_session(generate_raw_session(spec, archetype, d, s), kAnalysisRateHz));
    }
    fleet.users[d] = std::move(record);
    fleet.archetype[d] = archetype;
  });
  return fleet;
}

}  // namespace driverseg
