#include "driverseg/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "driverseg/experiments.hpp"
#include "driverseg/features.hpp"
#include "driverseg/rng.hpp"
#include "util.hpp"

namespace driverseg {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Seed streams for the per-cell stages.
constexpr std::uint64_t kCrossValStage = 1;
constexpr std::uint64_t kFullClusterStage = 2;
constexpr std::uint64_t kRobustnessStage = 3;

std::string cell_tag(SignalKind s, FeatureKind f) {
  return std::string(signal_name(s)) + "_f" + std::to_string(feature_number(f));
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write '" + path.string() + "'");
  out << content;
}

void write_failed_marker(const fs::path& out_dir, const std::string& message) {
  std::error_code ec;
  if (fs::is_directory(out_dir, ec)) {
    std::ofstream out(out_dir / "FAILED", std::ios::binary);
    out << message << '\n';
  }
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw missing_results_error("cannot open '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = detail::strip(line);
    if (!stripped.empty()) rows.push_back(detail::split(stripped, ','));
  }
  return rows;
}

void write_histogram_csv(const fs::path& path, const HistogramSet& set) {
  std::ostringstream out;
  out << "user_id";
  for (int b = 1; b <= set.bins.count; ++b) out << ",b" << b;
  out << '\n';
  for (std::size_t i = 0; i < set.user_ids.size(); ++i) {
    out << set.user_ids[i];
    for (double bar : set.bars[i]) out << ',' << detail::format_double(bar);
    out << '\n';
  }
  write_text(path, out.str());
}

void write_clusters_csv(const fs::path& path, const PointSet& points,
                        const Clustering& clustering) {
  std::ostringstream out;
  out << "user_id,label\n";
  for (std::size_t i = 0; i < points.user_ids.size(); ++i) {
    out << points.user_ids[i] << ',' << clustering.labels[i] << '\n';
  }
  write_text(path, out.str());
}

void write_pca_csv(const fs::path& path, const PcaProjection& pca) {
  std::ostringstream out;
  out << "user_id,pc1,pc2\n";
  for (std::size_t i = 0; i < pca.user_ids.size(); ++i) {
    out << pca.user_ids[i] << ',' << detail::format_double(pca.coords[i][0]) << ','
        << detail::format_double(pca.coords[i][1]) << '\n';
  }
  write_text(path, out.str());
}

void write_pca_json(const fs::path& path, SignalKind signal, FeatureKind feature,
                    const PcaProjection& pca) {
  ordered_json j;
  j["signal"] = signal_name(signal);
  j["feature"] = feature_number(feature);
  j["explained_variance_ratio"] = pca.explained_variance_ratio;
  j["ratio_spectrum"] = pca.ratio_spectrum;
  write_text(path, j.dump(2) + "\n");
}

void write_subsample_csv(const fs::path& path, const std::vector<SubsampleCurve>& curves) {
  std::ostringstream out;
  out << "method,percentage,mean,std\n";
  for (const auto& curve : curves) {
    for (std::size_t i = 0; i < curve.percentages.size(); ++i) {
      out << subsample_method_name(curve.method) << ','
          << detail::format_double(curve.percentages[i]) << ','
          << detail::format_double(curve.mean_v[i]) << ','
          << detail::format_double(curve.std_v[i]) << '\n';
    }
  }
  write_text(path, out.str());
}

std::string table_cell(const CrossValCell& cell) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "\"%d (%.2f, %.2f)\"", cell.optimal_k,
                cell.mean_at_optimal(), cell.std_at_optimal());
  return buf;
}

}  // namespace

int run_synth(const fs::path& spec_path, const fs::path& out_dir,
              std::optional<std::uint64_t> seed_override) {
  try {
    FleetSpec spec = parse_fleet_spec(spec_path);
    if (seed_override) spec.seed = *seed_override;
    spec.validate();
    fs::create_directories(out_dir);

    ordered_json manifest;
    manifest["seed"] = spec.seed;
    manifest["archetypes"] = spec.archetypes;
    manifest["drivers_per_archetype"] = spec.drivers_per_archetype;
    manifest["sessions_per_driver"] = spec.sessions_per_driver;
    manifest["users"] = ordered_json::array();

    int files = 0;
    for (int d = 0; d < spec.driver_count(); ++d) {
      const int archetype = d / spec.drivers_per_archetype;
      ordered_json user;
      user["user_id"] = synth_user_id(d);
      user["archetype"] = archetype;
      double seconds = 0.0;
      ordered_json session_ids = ordered_json::array();
      for (int s = 0; s < spec.sessions_per_driver; ++s) {
        const Session session = generate_raw_session(spec, archetype, d, s);
        seconds += session.duration_seconds();
        write_session_csv(session,
                          out_dir / (session.user_id + "__" + session.session_id + ".csv"));
        session_ids.push_back(session.session_id);
        ++files;
      }
      user["hours"] = seconds / 3600.0;
      user["sessions"] = std::move(session_ids);
      manifest["users"].push_back(std::move(user));
    }
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "[synth] wrote " << files << " session files and manifest.json to " << out_dir
              << "\n";
    return kExitOk;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_pipeline(RunConfig cfg) {
  bool out_ready = false;
  try {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    out_ready = true;
    std::error_code ec;
    fs::remove(cfg.out_dir / "FAILED", ec);

    // Ingest.
    std::vector<UserRecord> users;
    if (!cfg.fleet_spec.empty()) {
      const FleetSpec spec = parse_fleet_spec(cfg.fleet_spec);
      users = generate_synthetic_fleet(spec, cfg.jobs).users;
      std::cout << "[pipeline] generated " << users.size() << " synthetic users\n";
    } else {
      const auto files = find_session_files(cfg.data_dir);
      if (files.empty()) {
        throw data_error("no sessions found in '" + cfg.data_dir.string() + "'");
      }
      std::vector<Session> sessions;
      sessions.reserve(files.size());
      for (const auto& f : files) sessions.push_back(parse_session_log(f));
      users = assemble_users(sessions);
      std::cout << "[pipeline] parsed " << sessions.size() << " sessions from "
                << users.size() << " users\n";
    }

    const std::size_t users_total = users.size();
    users = filter_min_duration(users, cfg.min_hours);
    std::cout << "[pipeline] " << users.size() << " of " << users_total << " users have >= "
              << cfg.min_hours << " h of driving\n";
    if (users.empty()) {
      throw data_error("no users left after the " + detail::format_double(cfg.min_hours) +
                       " h filter");
    }

    ordered_json summary;
    summary["seed"] = cfg.seed;
    summary["users"] = {{"total", users_total},
                        {"analyzed", users.size()},
                        {"min_hours", cfg.min_hours}};
    {
      ordered_json jc;
      ordered_json sig = ordered_json::array();
      for (SignalKind s : cfg.signals) sig.push_back(signal_name(s));
      ordered_json feat = ordered_json::array();
      for (FeatureKind f : cfg.features) feat.push_back(feature_number(f));
      jc["signals"] = std::move(sig);
      jc["features"] = std::move(feat);
      jc["bins"] = cfg.bin_count;
      jc["trim"] = {cfg.trim.lo_pct, cfg.trim.hi_pct};
      jc["k_range"] = {cfg.k_min, cfg.k_max};
      jc["trials"] = cfg.trials;
      jc["percentages"] = cfg.percentages;
      ordered_json methods = ordered_json::array();
      for (SubsampleMethod m : cfg.methods) methods.push_back(subsample_method_name(m));
      jc["subsample_methods"] = std::move(methods);
      jc["crossval_bins"] = cfg.crossval_bins == BinsMode::local ? "local" : "global";
      summary["config"] = std::move(jc);
    }
    summary["cells"] = ordered_json::array();

    ordered_json crossval;
    crossval["cells"] = ordered_json::array();

    std::ostringstream table;
    table << "signal";
    for (FeatureKind f : cfg.features) table << ",f" << feature_number(f);
    table << '\n';

    for (SignalKind signal : cfg.signals) {
      table << signal_name(signal);
      for (FeatureKind feature : cfg.features) {
        const std::string tag = cell_tag(signal, feature);
        const std::uint64_t cell_seed =
            rng::derive(cfg.seed, static_cast<std::uint64_t>(signal),
                        static_cast<std::uint64_t>(feature_number(feature)));

        const auto vectors = extract_feature_table(users, signal, feature);
        if (cfg.dump_features) {
          fs::create_directories(cfg.out_dir / "features");
          for (const auto& fv : vectors) {
            std::ostringstream dump;
            dump << "value\n";
            for (double v : fv.values) dump << detail::format_double(v) << '\n';
            write_text(cfg.out_dir / "features" / (fv.user_id + "_" + tag + ".csv"),
                       dump.str());
          }
        }

        const HistogramSet full = build_histogram_set(vectors, cfg.bin_count, cfg.trim);
        write_histogram_csv(cfg.out_dir / ("hist_" + tag + ".csv"), full);
        for (const auto& dropped : full.dropped_users) {
          std::cout << "[pipeline] " << tag << ": user " << dropped
                    << " dropped (no values after trimming)\n";
        }

        CrossValParams cv_params;
        cv_params.k_min = cfg.k_min;
        cv_params.k_max = cfg.k_max;
        cv_params.trials = cfg.trials;
        cv_params.bin_count = cfg.bin_count;
        cv_params.trim = cfg.trim;
        cv_params.bins_mode = cfg.crossval_bins;
        cv_params.kmeans = cfg.kmeans;
        cv_params.seed = rng::derive(cell_seed, kCrossValStage);
        cv_params.jobs = cfg.jobs;
        const CrossValCell cell = cross_validate(vectors, cv_params);

        ordered_json jcell;
        jcell["signal"] = signal_name(signal);
        jcell["feature"] = feature_number(feature);
        jcell["trials"] = cell.trials;
        jcell["k"] = ordered_json::array();
        for (std::size_t i = 0; i < cell.k_values.size(); ++i) {
          jcell["k"].push_back({{"k", cell.k_values[i]},
                                {"mean", cell.mean_v[i]},
                                {"std", cell.std_v[i]},
                                {"optimal", cell.k_values[i] == cell.optimal_k}});
        }
        crossval["cells"].push_back(std::move(jcell));
        table << ',' << table_cell(cell);

        const PointSet points = point_set_from(full);
        const Clustering full_clustering = kmeans(
            points, cell.optimal_k, rng::derive(cell_seed, kFullClusterStage), cfg.kmeans);
        write_clusters_csv(cfg.out_dir / ("clusters_" + tag + ".csv"), points, full_clustering);

        const PcaProjection pca = pca_project(points);
        write_pca_csv(cfg.out_dir / ("pca_" + tag + ".csv"), pca);
        write_pca_json(cfg.out_dir / ("pca_" + tag + ".json"), signal, feature, pca);

        RobustnessParams rb_params;
        rb_params.percentages = cfg.percentages;
        rb_params.trials = cfg.trials;
        rb_params.k = cell.optimal_k;
        rb_params.bin_count = cfg.bin_count;
        rb_params.trim = cfg.trim;
        rb_params.kmeans = cfg.kmeans;
        rb_params.seed = rng::derive(cell_seed, kRobustnessStage);
        rb_params.jobs = cfg.jobs;
        std::vector<SubsampleCurve> curves;
        for (SubsampleMethod method : cfg.methods) {
          curves.push_back(robustness_curve(vectors, method, rb_params));
        }
        write_subsample_csv(cfg.out_dir / ("subsample_" + tag + ".csv"), curves);

        ordered_json scell;
        scell["signal"] = signal_name(signal);
        scell["feature"] = feature_number(feature);
        scell["optimal_k"] = cell.optimal_k;
        scell["mean_v_at_optimal"] = cell.mean_at_optimal();
        scell["std_v_at_optimal"] = cell.std_at_optimal();
        scell["dropped_users"] = full.dropped_users;
        scell["files"] = {{"histograms", "hist_" + tag + ".csv"},
                          {"clusters", "clusters_" + tag + ".csv"},
                          {"pca", "pca_" + tag + ".csv"},
                          {"pca_spectrum", "pca_" + tag + ".json"},
                          {"subsample", "subsample_" + tag + ".csv"}};
        summary["cells"].push_back(std::move(scell));

        std::cout << "[pipeline] " << tag << ": optimal K = " << cell.optimal_k << " (mean V "
                  << detail::format_double(cell.mean_at_optimal()) << ", std "
                  << detail::format_double(cell.std_at_optimal()) << ")\n";
      }
      table << '\n';
    }

    summary["files"] = {{"crossval", "crossval.json"},
                        {"crossval_table", "crossval_table.csv"}};
    write_text(cfg.out_dir / "crossval.json", crossval.dump(2) + "\n");
    write_text(cfg.out_dir / "crossval_table.csv", table.str());
    write_text(cfg.out_dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "[pipeline] done, outputs in " << cfg.out_dir << "\n";
    return kExitOk;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (out_ready) write_failed_marker(cfg.out_dir, e.what());
    return kExitBadConfig;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (out_ready) write_failed_marker(cfg.out_dir, e.what());
    return kExitNoData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (out_ready) write_failed_marker(cfg.out_dir, e.what());
    return kExitInternal;
  }
}

namespace {

struct CellFiles {
  std::string signal;
  int feature = 0;
  std::string pca;
  std::string clusters;
  std::string subsample;
};

}  // namespace

int run_report(const fs::path& results_dir, const fs::path& out_dir) {
  try {
    const fs::path out = out_dir.empty() ? results_dir : out_dir;
    const fs::path summary_path = results_dir / "summary.json";
    if (!fs::exists(summary_path)) {
      throw missing_results_error("missing results: " + summary_path.string());
    }
    std::ifstream in(summary_path);
    ordered_json summary;
    try {
      summary = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw missing_results_error("unreadable summary.json: " + std::string(e.what()));
    }

    std::vector<CellFiles> cells;
    std::vector<std::string> missing;
    auto require = [&](const std::string& name) {
      if (!fs::exists(results_dir / name)) missing.push_back(name);
      return name;
    };
    const std::string crossval_name = require(summary["files"]["crossval"].get<std::string>());
    for (const auto& cell : summary["cells"]) {
      CellFiles cf;
      cf.signal = cell["signal"].get<std::string>();
      cf.feature = cell["feature"].get<int>();
      cf.pca = require(cell["files"]["pca"].get<std::string>());
      cf.clusters = require(cell["files"]["clusters"].get<std::string>());
      cf.subsample = require(cell["files"]["subsample"].get<std::string>());
      cells.push_back(std::move(cf));
    }
    if (!missing.empty()) {
      std::string names;
      for (const auto& m : missing) {
        if (!names.empty()) names += ", ";
        names += m;
      }
      throw missing_results_error("missing results: " + names);
    }

    fs::create_directories(out);

    // V-measure vs K curves.
    {
      std::ifstream cv_in(results_dir / crossval_name);
      const ordered_json crossval = ordered_json::parse(cv_in);
      std::ostringstream o;
      o << "signal,feature,k,mean,std\n";
      for (const auto& cell : crossval["cells"]) {
        for (const auto& row : cell["k"]) {
          o << cell["signal"].get<std::string>() << ',' << cell["feature"].get<int>() << ','
            << row["k"].get<int>() << ',' << row["mean"].dump() << ',' << row["std"].dump()
            << '\n';
        }
      }
      write_text(out / "report_vmeasure_vs_k.csv", o.str());
    }

    // PCA scatter joined with cluster labels.
    {
      std::ostringstream o;
      o << "signal,feature,user_id,pc1,pc2,label\n";
      for (const auto& cf : cells) {
        const auto pca = read_csv(results_dir / cf.pca);
        const auto clusters = read_csv(results_dir / cf.clusters);
        std::map<std::string, std::string> label;
        for (std::size_t i = 1; i < clusters.size(); ++i) {
          label[clusters[i][0]] = clusters[i][1];
        }
        for (std::size_t i = 1; i < pca.size(); ++i) {
          const auto it = label.find(pca[i][0]);
          if (it == label.end()) {
            throw missing_results_error("user '" + pca[i][0] + "' missing from " + cf.clusters);
          }
          o << cf.signal << ',' << cf.feature << ',' << pca[i][0] << ',' << pca[i][1] << ','
            << pca[i][2] << ',' << it->second << '\n';
        }
      }
      write_text(out / "report_pca_scatter.csv", o.str());
    }

    // Subsampling curves.
    {
      std::ostringstream o;
      o << "signal,feature,method,percentage,mean,std\n";
      for (const auto& cf : cells) {
        const auto rows = read_csv(results_dir / cf.subsample);
        for (std::size_t i = 1; i < rows.size(); ++i) {
          o << cf.signal << ',' << cf.feature << ',' << rows[i][0] << ',' << rows[i][1] << ','
            << rows[i][2] << ',' << rows[i][3] << '\n';
        }
      }
      write_text(out / "report_subsampling.csv", o.str());
    }

    std::cout << "[report] wrote report_vmeasure_vs_k.csv, report_pca_scatter.csv, "
                 "report_subsampling.csv to "
              << out << "\n";
    return kExitOk;
  } catch (const missing_results_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingResults;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace driverseg
