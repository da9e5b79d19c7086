#include "driverseg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "util.hpp"

namespace driverseg {

namespace {

const char* kSignalNames[kSignalCount] = {"BRK", "GAS", "RPM", "SPD",
                                          "SWA", "SWM", "FACC", "LACC"};

double parse_strict_double(const std::string& field, const std::filesystem::path& path,
                           std::size_t line_no) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &consumed);
  } catch (const std::exception&) {
    throw parse_error(path.string() + ":" + std::to_string(line_no) +
                      ": malformed number '" + field + "'");
  }
  if (consumed != field.size() || !std::isfinite(v)) {
    throw parse_error(path.string() + ":" + std::to_string(line_no) +
                      ": malformed number '" + field + "'");
  }
  return v;
}

}  // namespace

const char* signal_name(SignalKind kind) { return kSignalNames[static_cast<int>(kind)]; }

SignalKind signal_from_name(const std::string& name) {
  for (SignalKind k : kAllSignals) {
    if (name == signal_name(k)) return k;
  }
  throw config_error("unknown signal name '" + name + "'");
}

double Session::duration_seconds() const {
  double d = 0.0;
  for (const auto& s : series) {
    if (!s.t.empty()) d = std::max(d, s.t.back());
  }
  return d;
}

double UserRecord::total_hours() const {
  double seconds = 0.0;
  for (const auto& s : sessions) seconds += s.duration_seconds;
  return seconds / 3600.0;
}

Session parse_session_log(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  const std::size_t sep = stem.find("__");
  if (sep == std::string::npos || sep == 0 || sep + 2 >= stem.size()) {
    throw schema_error("session file name must be <user_id>__<session_id>.csv, got '" +
                       path.filename().string() + "'");
  }

  std::ifstream in(path);
  if (!in) throw data_error("cannot open session log '" + path.string() + "'");

  Session session;
  session.user_id = stem.substr(0, sep);
  session.session_id = stem.substr(sep + 2);

  std::string line;
  if (!std::getline(in, line)) {
    throw schema_error(path.string() + ": empty file, expected a header row");
  }

  // Header: the full column set must be present, each name exactly once.
  const auto header = detail::split(detail::strip(line), ',');
  std::map<std::string, int> column;  // name -> field index
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::strip(header[i]);
    bool known = name == "t";
    for (SignalKind k : kAllSignals) known = known || name == signal_name(k);
    if (!known) throw schema_error(path.string() + ": unknown column '" + name + "'");
    if (!column.emplace(name, static_cast<int>(i)).second) {
      throw schema_error(path.string() + ": duplicate column '" + name + "'");
    }
  }
  std::string missing;
  if (!column.count("t")) missing = "t";
  for (SignalKind k : kAllSignals) {
    if (!column.count(signal_name(k))) {
      if (!missing.empty()) missing += ", ";
      missing += signal_name(k);
    }
  }
  if (!missing.empty()) {
    throw schema_error(path.string() + ": missing column(s): " + missing);
  }

  const int t_col = column.at("t");
  int signal_col[kSignalCount];
  for (SignalKind k : kAllSignals) {
    signal_col[static_cast<int>(k)] = column.at(signal_name(k));
  }

  std::size_t line_no = 1;
  double prev_t = 0.0;
  bool first_row = true;
  double t_origin = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::strip(line);
    if (stripped.empty()) continue;
    const auto fields = detail::split(stripped, ',');
    if (fields.size() != header.size()) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    const std::string t_field = detail::strip(fields[t_col]);
    if (t_field.empty()) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": empty timestamp");
    }
    const double t_raw = parse_strict_double(t_field, path, line_no);
    if (first_row) {
      t_origin = t_raw;
      first_row = false;
    } else if (t_raw <= prev_t) {
      throw ordering_error(path.string() + ":" + std::to_string(line_no) +
                           ": timestamp " + t_field + " not after the previous row");
    }
    prev_t = t_raw;
    const double t = t_raw - t_origin;
    for (SignalKind k : kAllSignals) {
      const std::string field = detail::strip(fields[signal_col[static_cast<int>(k)]]);
      if (field.empty()) continue;  // no sample for this signal at this row
      session.of(k).push_back(t, parse_strict_double(field, path, line_no));
    }
  }
  return session;
}

void write_session_csv(const Session& session, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "t";
  for (SignalKind k : kAllSignals) out << ',' << signal_name(k);
  out << '\n';

  // Merge the per-signal series over the union of timestamps.
  std::size_t cursor[kSignalCount] = {};
  while (true) {
    double t = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kSignalCount; ++s) {
      const auto& series = session.series[s];
      if (cursor[s] < series.size()) t = std::min(t, series.t[cursor[s]]);
    }
    if (!std::isfinite(t)) break;
    out << detail::format_time(t);
    for (int s = 0; s < kSignalCount; ++s) {
      const auto& series = session.series[s];
      out << ',';
      if (cursor[s] < series.size() && series.t[cursor[s]] == t) {
        out << detail::format_double(series.x[cursor[s]]);
        ++cursor[s];
      }
    }
    out << '\n';
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw error("cannot write '" + path.string() + "'");
  file << out.str();
}

UniformSeries resample_linear(const SampleSeries& series, double rate) {
  if (series.size() < 2) {
    throw insufficient_data_error("resampling needs at least 2 samples, got " +
                                  std::to_string(series.size()));
  }
  if (!(rate > 0.0)) throw domain_error("resampling rate must be positive");

  UniformSeries out;
  out.rate = rate;
  out.start = series.t.front();
  const double span = series.t.back() - series.t.front();
  const auto n = static_cast<std::size_t>(std::floor(span * rate)) + 1;
  out.values.reserve(n);

  std::size_t seg = 0;  // current segment [t[seg], t[seg+1]]
  for (std::size_t i = 0; i < n; ++i) {
    double t = out.start + static_cast<double>(i) / rate;
    if (t > series.t.back()) t = series.t.back();  // guard the last grid point
    while (seg + 2 < series.size() && series.t[seg + 1] <= t) ++seg;
    const double t0 = series.t[seg], t1 = series.t[seg + 1];
    if (t == t0) {
      out.values.push_back(series.x[seg]);
    } else if (t == t1) {
      out.values.push_back(series.x[seg + 1]);
    } else {
      const double alpha = (t - t0) / (t1 - t0);
      out.values.push_back(series.x[seg] + alpha * (series.x[seg + 1] - series.x[seg]));
    }
  }
  return out;
}

ResampledSession resample_session(const Session& session, double rate) {
  ResampledSession out;
  out.session_id = session.session_id;
  out.duration_seconds = session.duration_seconds();
  for (int s = 0; s < kSignalCount; ++s) {
    try {
      out.signals[s] = resample_linear(session.series[s], rate);
    } catch (const insufficient_data_error&) {
      throw insufficient_data_error("session '" + session.session_id + "' of user '" +
                                    session.user_id + "': signal " +
                                    signal_name(static_cast<SignalKind>(s)) +
                                    " has fewer than 2 samples");
    }
  }
  return out;
}

std::vector<UserRecord> assemble_users(const std::vector<Session>& sessions, double rate) {
  std::map<std::string, UserRecord> by_user;  // ordered by user_id
  for (const auto& session : sessions) {
    auto& record = by_user[session.user_id];
    record.user_id = session.user_id;
    record.sessions.push_back(resample_session(session, rate));
  }
  std::vector<UserRecord> out;
  out.reserve(by_user.size());
  for (auto& [id, record] : by_user) out.push_back(std::move(record));
  return out;
}

std::vector<UserRecord> filter_min_duration(const std::vector<UserRecord>& users,
                                            double min_hours) {
  if (min_hours < 0.0) throw domain_error("min_hours must be non-negative");
  std::vector<UserRecord> out;
  for (const auto& u : users) {
    if (u.total_hours() >= min_hours) out.push_back(u);
  }
  return out;
}

std::vector<std::filesystem::path> find_session_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace driverseg
