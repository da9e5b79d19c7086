#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driverseg/experiments.hpp"
#include "driverseg/features.hpp"
#include "driverseg/histogram.hpp"
#include "driverseg/learn.hpp"
#include "driverseg/synth.hpp"

namespace py = pybind11;
using namespace driverseg;

namespace {

UniformSeries series_from_values(std::vector<double> values, double rate) {
  UniformSeries s;
  s.rate = rate;
  s.values = std::move(values);
  return s;
}

PointSet point_set(std::vector<std::vector<double>> points,
                   std::vector<std::string> user_ids) {
  PointSet ps;
  if (user_ids.empty()) {
    for (std::size_t i = 0; i < points.size(); ++i) user_ids.push_back(std::to_string(i));
  }
  ps.user_ids = std::move(user_ids);
  ps.points = std::move(points);
  return ps;
}

std::vector<FeatureVector> feature_table(const std::vector<std::string>& user_ids,
                                         const std::vector<std::vector<double>>& vectors,
                                         const std::string& signal, int feature) {
  if (user_ids.size() != vectors.size()) {
    throw alignment_error("user_ids and vectors differ in length");
  }
  std::vector<FeatureVector> out;
  out.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    out.push_back(FeatureVector{user_ids[i], signal_from_name(signal),
                                feature_from_number(feature), vectors[i]});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_driverseg, m) {
  m.doc() = "Driver segmentation from CAN-signal feature histograms";

  py::class_<UniformSeries>(m, "UniformSeries")
      .def(py::init(&series_from_values), py::arg("values"), py::arg("rate") = 4.0)
      .def_readonly("rate", &UniformSeries::rate)
      .def_readonly("start", &UniformSeries::start)
      .def_readonly("values", &UniformSeries::values);

  py::class_<BinSpec>(m, "BinSpec")
      .def(py::init([](double lo, double hi, int count) {
             return BinSpec{lo, hi, count};
           }),
           py::arg("lo"), py::arg("hi"), py::arg("count") = 10)
      .def_readonly("lo", &BinSpec::lo)
      .def_readonly("hi", &BinSpec::hi)
      .def_readonly("count", &BinSpec::count)
      .def("bin_of", &BinSpec::bin_of, py::arg("value"));

  py::class_<Clustering>(m, "Clustering")
      .def_readonly("labels", &Clustering::labels)
      .def_readonly("k", &Clustering::k)
      .def_readonly("inertia", &Clustering::inertia)
      .def_readonly("inertia_history", &Clustering::inertia_history);

  py::class_<PcaProjection>(m, "PcaProjection")
      .def_readonly("user_ids", &PcaProjection::user_ids)
      .def_readonly("coords", &PcaProjection::coords)
      .def_readonly("explained_variance_ratio", &PcaProjection::explained_variance_ratio)
      .def_readonly("ratio_spectrum", &PcaProjection::ratio_spectrum);

  py::class_<CrossValCell>(m, "CrossValCell")
      .def_readonly("k_values", &CrossValCell::k_values)
      .def_readonly("mean_v", &CrossValCell::mean_v)
      .def_readonly("std_v", &CrossValCell::std_v)
      .def_readonly("trials", &CrossValCell::trials)
      .def_readonly("optimal_k", &CrossValCell::optimal_k);

  py::class_<SubsampleCurve>(m, "SubsampleCurve")
      .def_property_readonly(
          "method", [](const SubsampleCurve& c) { return subsample_method_name(c.method); })
      .def_readonly("percentages", &SubsampleCurve::percentages)
      .def_readonly("mean_v", &SubsampleCurve::mean_v)
      .def_readonly("std_v", &SubsampleCurve::std_v)
      .def_readonly("trials", &SubsampleCurve::trials);

  py::class_<FleetSpec>(m, "FleetSpec")
      .def(py::init(&FleetSpec::make), py::arg("archetypes"), py::arg("drivers_per_archetype"),
           py::arg("sessions_per_driver"), py::arg("session_seconds_min"),
           py::arg("session_seconds_max"), py::arg("seed"))
      .def_readwrite("seed", &FleetSpec::seed)
      .def("set_param",
           [](FleetSpec& spec, int archetype, const std::string& signal,
              const std::string& name, double value) {
             SignalParams& p = spec.param(archetype, signal_from_name(signal));
             if (name == "mean") {
               p.mean = value;
             } else if (name == "stddev") {
               p.stddev = value;
             } else if (name == "reversion") {
               p.reversion = value;
             } else if (name == "peak_rate") {
               p.peak_rate = value;
             } else if (name == "peak_amp") {
               p.peak_amp = value;
             } else if (name == "session_jitter") {
               p.session_jitter = value;
             } else if (name == "floor") {
               p.floor = value;
             } else {
               throw config_error("unknown signal parameter '" + name + "'");
             }
           },
           py::arg("archetype"), py::arg("signal"), py::arg("name"), py::arg("value"));

  m.def(
      "resample_linear",
      [](const std::vector<double>& t, const std::vector<double>& x, double rate) {
        if (t.size() != x.size()) throw alignment_error("t and x differ in length");
        SampleSeries s;
        s.t = t;
        s.x = x;
        return resample_linear(s, rate);
      },
      py::arg("t"), py::arg("x"), py::arg("rate") = 4.0);

  m.def(
      "singular_points",
      [](std::vector<double> values) {
        const SingularPoints sp = singular_points(series_from_values(std::move(values), 4.0));
        return py::make_tuple(sp.all, sp.maxima);
      },
      py::arg("values"), "Returns (J, J_max) as index lists");

  m.def(
      "difference_quotient",
      [](std::vector<double> values, double rate) {
        return difference_quotient(series_from_values(std::move(values), rate));
      },
      py::arg("values"), py::arg("rate") = 4.0);

  m.def(
      "peak_intervals",
      [](std::vector<double> values, double rate) {
        return peak_intervals(series_from_values(std::move(values), rate));
      },
      py::arg("values"), py::arg("rate") = 4.0);

  m.def(
      "peak_values",
      [](std::vector<double> values) {
        return peak_values(series_from_values(std::move(values), 4.0));
      },
      py::arg("values"));

  const auto bind_moving = [&m](const char* name, MovingStat stat) {
    m.def(
        name,
        [stat](std::vector<double> values, std::size_t half_width) {
          return moving_stat(series_from_values(std::move(values), 4.0), stat, half_width);
        },
        py::arg("values"), py::arg("half_width") = kMovingHalfWidth);
  };
  bind_moving("moving_mean", MovingStat::mean);
  bind_moving("moving_median", MovingStat::median);
  bind_moving("moving_std", MovingStat::stddev);

  m.def("percentile", &percentile, py::arg("values"), py::arg("pct"));
  m.def("trim_percentiles", &trim_percentiles, py::arg("values"), py::arg("lo_pct") = 2.0,
        py::arg("hi_pct") = 98.0);
  m.def("global_bin_spec", &global_bin_spec, py::arg("trimmed_vectors"), py::arg("count") = 10);
  m.def("build_histogram", &build_histogram, py::arg("values"), py::arg("bins"));

  m.def(
      "kmeans",
      [](std::vector<std::vector<double>> points, int k, std::uint64_t seed, int restarts) {
        KMeansOptions opt;
        opt.restarts = restarts;
        return kmeans(point_set(std::move(points), {}), k, seed, opt);
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 10);

  m.def(
      "pca_project",
      [](std::vector<std::vector<double>> points, int dims) {
        return pca_project(point_set(std::move(points), {}), dims);
      },
      py::arg("points"), py::arg("dims") = 2);

  m.def(
      "v_measure",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return v_measure(std::span<const int>(a), std::span<const int>(b));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "split_train_validation",
      [](const std::vector<double>& w, double train_fraction, std::uint64_t seed) {
        SplitResult s = split_train_validation(w, train_fraction, seed);
        return py::make_tuple(std::move(s.train), std::move(s.validation));
      },
      py::arg("w"), py::arg("train_fraction") = 0.7, py::arg("seed") = 0);

  m.def(
      "select_optimal_k",
      [](const std::vector<double>& means, int k_min) {
        return select_optimal_k(means, k_min);
      },
      py::arg("means"), py::arg("k_min") = 2);

  m.def("subsample_independent", &subsample_independent, py::arg("w"), py::arg("p"),
        py::arg("seed") = 0);
  m.def("subsample_contiguous", &subsample_contiguous, py::arg("w"), py::arg("p"),
        py::arg("seed") = 0);

  m.def(
      "cross_validate",
      [](const std::vector<std::string>& user_ids,
         const std::vector<std::vector<double>>& vectors, int k_min, int k_max, int trials,
         double train_fraction, int bins, double trim_lo, double trim_hi,
         const std::string& bins_mode, std::uint64_t seed, int jobs, const std::string& signal,
         int feature) {
        CrossValParams p;
        p.k_min = k_min;
        p.k_max = k_max;
        p.trials = trials;
        p.train_fraction = train_fraction;
        p.bin_count = bins;
        p.trim = {trim_lo, trim_hi};
        if (bins_mode == "local") {
          p.bins_mode = BinsMode::local;
        } else if (bins_mode == "global") {
          p.bins_mode = BinsMode::global;
        } else {
          throw config_error("bins_mode must be local or global");
        }
        p.seed = seed;
        p.jobs = jobs;
        return cross_validate(feature_table(user_ids, vectors, signal, feature), p);
      },
      py::arg("user_ids"), py::arg("vectors"), py::arg("k_min") = 2, py::arg("k_max") = 10,
      py::arg("trials") = 40, py::arg("train_fraction") = 0.7, py::arg("bins") = 10,
      py::arg("trim_lo") = 2.0, py::arg("trim_hi") = 98.0, py::arg("bins_mode") = "local",
      py::arg("seed") = 0, py::arg("jobs") = 1, py::arg("signal") = "GAS",
      py::arg("feature") = 1);

  m.def(
      "robustness_curve",
      [](const std::vector<std::string>& user_ids,
         const std::vector<std::vector<double>>& vectors, const std::string& method, int k,
         const std::vector<double>& percentages, int trials, int bins, double trim_lo,
         double trim_hi, std::uint64_t seed, int jobs, const std::string& signal, int feature) {
        RobustnessParams p;
        p.percentages = percentages;
        p.trials = trials;
        p.k = k;
        p.bin_count = bins;
        p.trim = {trim_lo, trim_hi};
        p.seed = seed;
        p.jobs = jobs;
        return robustness_curve(feature_table(user_ids, vectors, signal, feature),
                                subsample_method_from_name(method), p);
      },
      py::arg("user_ids"), py::arg("vectors"), py::arg("method") = "independent",
      py::arg("k") = 2, py::arg("percentages") = std::vector<double>{100, 50, 20, 10, 5, 2, 1},
      py::arg("trials") = 40, py::arg("bins") = 10, py::arg("trim_lo") = 2.0,
      py::arg("trim_hi") = 98.0, py::arg("seed") = 0, py::arg("jobs") = 1,
      py::arg("signal") = "GAS", py::arg("feature") = 1);

  m.def(
      "synthetic_feature_vectors",
      [](const FleetSpec& spec, const std::string& signal, int feature, int jobs) {
        const SyntheticFleet fleet = generate_synthetic_fleet(spec, jobs);
        const auto table = extract_feature_table(fleet.users, signal_from_name(signal),
                                                 feature_from_number(feature));
        std::vector<std::string> ids;
        std::vector<std::vector<double>> vectors;
        for (const auto& fv : table) {
          ids.push_back(fv.user_id);
          vectors.push_back(fv.values);
        }
        return py::make_tuple(std::move(ids), fleet.archetype, std::move(vectors));
      },
      py::arg("spec"), py::arg("signal") = "GAS", py::arg("feature") = 1, py::arg("jobs") = 1,
      "Generates a fleet and returns (user_ids, archetypes, vectors) for one "
      "(signal, feature)");
}
