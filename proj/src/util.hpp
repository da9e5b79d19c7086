#pragma once

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "driverseg/errors.hpp"

namespace driverseg::detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

inline std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

// Deterministic shortest-ish decimal rendering used by the CSV exports.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Fixed-point rendering for raw timestamps (microsecond resolution).
inline std::string format_time(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Flat key = value file; '#' starts a comment. Order preserved, duplicate
// keys rejected.
inline std::vector<std::pair<std::string, std::string>> read_key_value_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = strip(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw config_error(path.string() + ":" + std::to_string(line_no) +
                         ": expected key = value");
    }
    const std::string key = strip(stripped.substr(0, eq));
    const std::string value = strip(stripped.substr(eq + 1));
    if (key.empty()) {
      throw config_error(path.string() + ":" + std::to_string(line_no) + ": empty key");
    }
    for (const auto& [k, v] : out) {
      if (k == key) {
        throw config_error(path.string() + ":" + std::to_string(line_no) +
                           ": duplicate key '" + key + "'");
      }
    }
    out.emplace_back(key, value);
  }
  return out;
}

// Runs fn(0..n-1) on up to jobs threads. Slot-indexed outputs keep results
// independent of the schedule; the first exception is rethrown after join.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(jobs, n);
  std::vector<std::thread> threads;
  std::mutex mu;
  std::exception_ptr first_error;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        {
          std::lock_guard<std::mutex> lock(mu);
          if (first_error) return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace driverseg::detail
