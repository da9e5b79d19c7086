#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "driverseg/errors.hpp"

namespace driverseg {

// The eight CAN signals the analysis runs on, in session-log column order.
enum class SignalKind : int { BRK = 0, GAS, RPM, SPD, SWA, SWM, FACC, LACC };

inline constexpr int kSignalCount = 8;

inline constexpr std::array<SignalKind, kSignalCount> kAllSignals = {
    SignalKind::BRK,  SignalKind::GAS, SignalKind::RPM,  SignalKind::SPD,
    SignalKind::SWA,  SignalKind::SWM, SignalKind::FACC, SignalKind::LACC};

const char* signal_name(SignalKind kind);

// Throws config_error on an unknown name.
SignalKind signal_from_name(const std::string& name);

// Raw timestamped samples of one signal within one session. Timestamps are
// seconds since session start and strictly increasing.
struct SampleSeries {
  std::vector<double> t;
  std::vector<double> x;

  std::size_t size() const { return t.size(); }
  void push_back(double time, double value) {
    t.push_back(time);
    x.push_back(value);
  }
};

// One engine-on to engine-off recording, as parsed from a session log.
struct Session {
  std::string user_id;
  std::string session_id;
  std::array<SampleSeries, kSignalCount> series;  // indexed by SignalKind

  const SampleSeries& of(SignalKind k) const { return series[static_cast<int>(k)]; }
  SampleSeries& of(SignalKind k) { return series[static_cast<int>(k)]; }

  // Largest timestamp over all series.
  double duration_seconds() const;
};

// A signal resampled onto a uniform grid: values[i] sits at start + i/rate.
struct UniformSeries {
  double rate = 4.0;  // samples per second
  double start = 0.0;
  std::vector<double> values;

  double time_at(std::size_t i) const { return start + static_cast<double>(i) / rate; }
  std::size_t size() const { return values.size(); }
};

struct ResampledSession {
  std::string session_id;
  std::array<UniformSeries, kSignalCount> signals;
  double duration_seconds = 0.0;  // duration of the raw session

  const UniformSeries& of(SignalKind k) const { return signals[static_cast<int>(k)]; }
};

struct UserRecord {
  std::string user_id;
  std::vector<ResampledSession> sessions;

  double total_hours() const;
};

// Analysis-side sampling rate; raw synthetic sessions run at kRawRateHz.
inline constexpr double kAnalysisRateHz = 4.0;
inline constexpr double kRawRateHz = 20.0;

// Parses one session log (CSV, header t,BRK,GAS,RPM,SPD,SWA,SWM,FACC,LACC;
// empty cell = no sample). user_id and session_id come from the file name
// <user_id>__<session_id>.csv. Timestamps are shifted to start at 0.
// Throws parse_error / ordering_error with the offending line number, or
// schema_error for a wrong column set or bad file name.
Session parse_session_log(const std::filesystem::path& path);

// Writes a session in the same CSV format (full sample grid, no gaps).
void write_session_csv(const Session& session, const std::filesystem::path& path);

// Linear interpolation onto a uniform grid anchored at the first raw
// timestamp. Output length is floor((t_last - t_first) * rate) + 1.
// Throws insufficient_data_error for fewer than 2 samples.
UniformSeries resample_linear(const SampleSeries& series, double rate);

ResampledSession resample_session(const Session& session, double rate = kAnalysisRateHz);

// Groups sessions by user (users ordered by id, sessions in input order)
// and resamples every series.
std::vector<UserRecord> assemble_users(const std::vector<Session>& sessions,
                                       double rate = kAnalysisRateHz);

// Keeps users with total_hours >= min_hours (boundary inclusive), order
// preserved.
std::vector<UserRecord> filter_min_duration(const std::vector<UserRecord>& users,
                                            double min_hours);

// All *.csv files in a directory, sorted by file name.
std::vector<std::filesystem::path> find_session_files(const std::filesystem::path& dir);

}  // namespace driverseg
