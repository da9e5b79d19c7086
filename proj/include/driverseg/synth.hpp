#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "driverseg/ingest.hpp"

namespace driverseg {

// Generative parameters for one signal of one driver archetype. The base
// trajectory is a mean-reverting random walk with stationary distribution
// N(mean, stddev^2); sparse peak events superimpose short half-sine bumps.
struct SignalParams {
  double mean = 0.0;
  double stddev = 1.0;
  double reversion = 0.5;        // pull toward the mean, 1/seconds
  double peak_rate = 0.1;        // expected peak events per second
  double peak_amp = 1.0;         // nominal bump height
  double session_jitter = 0.0;   // stddev of a per-session mean offset
  double floor = -1e300;         // physical lower clamp
};

SignalParams default_signal_params(SignalKind kind);

struct FleetSpec {
  int archetypes = 1;
  int drivers_per_archetype = 1;
  int sessions_per_driver = 1;
  double session_seconds_min = 600.0;
  double session_seconds_max = 600.0;
  std::uint64_t seed = 0;
  // params[archetype][signal]; prefilled with per-signal defaults.
  std::vector<std::array<SignalParams, kSignalCount>> params;

  static FleetSpec make(int archetypes, int drivers_per_archetype, int sessions_per_driver,
                        double session_seconds_min, double session_seconds_max,
                        std::uint64_t seed);

  SignalParams& param(int archetype, SignalKind kind);
  const SignalParams& param(int archetype, SignalKind kind) const;

  int driver_count() const { return archetypes * drivers_per_archetype; }

  // Throws config_error when any invariant fails.
  void validate() const;
};

// Reads a fleet spec from a flat key = value file. Unknown keys are an
// error. Recognized keys: archetypes, drivers_per_archetype,
// sessions_per_driver, session_seconds_min, session_seconds_max, seed, and
// archetype.<g>.<SIGNAL>.<mean|stddev|reversion|peak_rate|peak_amp|
// session_jitter|floor>.
FleetSpec parse_fleet_spec(const std::filesystem::path& path);

struct SyntheticFleet {
  std::vector<UserRecord> users;
  std::vector<int> archetype;  // planted ground truth, aligned with users
};

// Raw 20 Hz session for one driver; deterministic in (spec, indices).
Session generate_raw_session(const FleetSpec& spec, int archetype, int driver_index,
                             int session_index);

std::string synth_user_id(int driver_index);
std::string synth_session_id(int session_index);

// Full fleet, resampled to 4 Hz. Deterministic in spec; jobs only changes
// wall time.
SyntheticFleet generate_synthetic_fleet(const FleetSpec& spec, int jobs = 1);

}  // namespace driverseg
