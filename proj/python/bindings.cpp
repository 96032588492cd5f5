// _firemap: python bindings over the core library. Arrays cross the
// boundary as numpy; heavier objects (Dataset, Forest, GridRaster) stay
// opaque handles.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "firemap/data.hpp"
#include "firemap/forest.hpp"
#include "firemap/geodata.hpp"
#include "firemap/metrics.hpp"
#include "firemap/shap.hpp"
#include "firemap/validation.hpp"
#include "firemap/version.hpp"

namespace py = pybind11;
using namespace firemap;

namespace {

std::vector<int> to_labels(const py::object& obj) {
  return obj.cast<std::vector<int>>();
}

std::vector<double> to_scores(const py::object& obj) {
  return obj.cast<std::vector<double>>();
}

py::array_t<double> matrix_of(const Dataset& d) {
  const std::size_t n = d.size();
  const std::size_t p = d.schema().size();
  py::array_t<double> out({n, p});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) view(i, j) = d[i].values[j];
  return out;
}

Dataset dataset_from_arrays(const std::vector<std::string>& feature_names,
                            py::array_t<double, py::array::c_style | py::array::forcecast> X,
                            const std::vector<int>& labels,
                            const std::vector<std::string>& region_ids,
                            const std::vector<std::string>& district_ids,
                            const std::vector<int>& years,
                            const std::vector<std::string>& strata) {
  if (X.ndim() != 2) throw std::invalid_argument("X must be a 2-D array");
  const std::size_t n = static_cast<std::size_t>(X.shape(0));
  const std::size_t p = static_cast<std::size_t>(X.shape(1));
  if (feature_names.size() != p)
    throw std::invalid_argument("feature_names length must match X columns");
  if (labels.size() != n) throw std::invalid_argument("labels length must match X rows");

  std::vector<Feature> features;
  const FeatureSchema canonical = FeatureSchema::canonical();
  for (const auto& name : feature_names) {
    std::string unit;
    if (auto idx = canonical.index_of(name)) unit = canonical.at(*idx).unit;
    features.push_back({name, unit});
  }

  auto view = X.unchecked<2>();
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.region_id = region_ids.empty() ? "0" : region_ids[i];
    s.district_id = district_ids.empty() ? s.region_id : district_ids[i];
    s.stratum = strata.empty() ? Stratum::Forest : stratum_from_token(strata[i]);
    s.year = years.empty() ? 2024 : years[i];
    s.label = labels[i];
    s.values.resize(p);
    for (std::size_t j = 0; j < p; ++j) s.values[j] = view(i, j);
    samples.push_back(std::move(s));
  }
  return Dataset(FeatureSchema(std::move(features)), std::move(samples));
}

py::array_t<double> raster_to_array(const GridRaster& g) {
  py::array_t<double> out({static_cast<std::size_t>(g.nrows), static_cast<std::size_t>(g.ncols)});
  auto view = out.mutable_unchecked<2>();
  for (int r = 0; r < g.nrows; ++r)
    for (int c = 0; c < g.ncols; ++c) view(r, c) = g.at(r, c);
  return out;
}

GridRaster raster_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a,
                             double xllcorner, double yllcorner, double cellsize,
                             double nodata_value) {
  if (a.ndim() != 2) throw std::invalid_argument("raster array must be 2-D");
  GridRaster g;
  g.nrows = static_cast<int>(a.shape(0));
  g.ncols = static_cast<int>(a.shape(1));
  g.xllcorner = xllcorner;
  g.yllcorner = yllcorner;
  g.cellsize = cellsize;
  g.nodata_value = nodata_value;
  auto view = a.unchecked<2>();
  g.cells.reserve(static_cast<std::size_t>(g.nrows) * g.ncols);
  for (int r = 0; r < g.nrows; ++r)
    for (int c = 0; c < g.ncols; ++c) g.cells.push_back(view(r, c));
  return g;
}

MetricKind metric_kind_of(const std::string& name) {
  if (name == "roc_auc") return MetricKind::RocAuc;
  if (name == "pr_auc") return MetricKind::PrAuc;
  if (name == "brier") return MetricKind::Brier;
  if (name == "accuracy") return MetricKind::Accuracy;
  if (name == "precision") return MetricKind::Precision;
  if (name == "recall") return MetricKind::Recall;
  if (name == "f1") return MetricKind::F1;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_firemap, m) {
  m.doc() = "wildfire susceptibility modeling toolkit";
  m.attr("__version__") = kVersion;

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n", &Dataset::size)
      .def("__len__", &Dataset::size)
      .def_property_readonly("feature_names",
                             [](const Dataset& d) {
                               std::vector<std::string> names;
                               for (const auto& f : d.schema().features())
                                 names.push_back(f.name);
                               return names;
                             })
      .def("ids",
           [](const Dataset& d) {
             std::vector<std::string> ids;
             for (const Sample& s : d.samples()) ids.push_back(s.id);
             return ids;
           })
      .def("labels",
           [](const Dataset& d) {
             std::vector<int> labels;
             for (const Sample& s : d.samples()) labels.push_back(s.label);
             return labels;
           })
      .def("regions",
           [](const Dataset& d) {
             std::vector<std::string> out;
             for (const Sample& s : d.samples()) out.push_back(s.region_id);
             return out;
           })
      .def("years",
           [](const Dataset& d) {
             std::vector<int> out;
             for (const Sample& s : d.samples()) out.push_back(s.year);
             return out;
           })
      .def("features", &matrix_of, "feature matrix, rows in dataset order")
      .def("positive_rate", [](const Dataset& d) { return positive_rate(d); });

  m.def("make_dataset", &dataset_from_arrays, py::arg("feature_names"), py::arg("X"),
        py::arg("labels"), py::arg("region_ids") = std::vector<std::string>{},
        py::arg("district_ids") = std::vector<std::string>{},
        py::arg("years") = std::vector<int>{}, py::arg("strata") = std::vector<std::string>{});
  m.def("parse_samples_csv", [](const std::string& text) { return parse_samples_csv(text); });
  m.def("write_samples_csv", &write_samples_csv);
  m.def("stratify",
        [](const Dataset& d, const std::string& s) { return stratify(d, stratum_from_token(s)); });
  m.def("balanced_absence_sample", &balanced_absence_sample, py::arg("presence"),
        py::arg("candidates"), py::arg("seed"));

  py::class_<ForestParams>(m, "ForestParams")
      .def(py::init([](int n_trees, int max_depth, int min_samples_leaf, int mtry,
                       bool bootstrap, std::uint64_t seed) {
             ForestParams p;
             p.n_trees = n_trees;
             p.max_depth = max_depth;
             p.min_samples_leaf = min_samples_leaf;
             p.mtry = mtry;
             p.bootstrap = bootstrap;
             p.seed = seed;
             return p;
           }),
           py::arg("n_trees") = 200, py::arg("max_depth") = 12,
           py::arg("min_samples_leaf") = 5, py::arg("mtry") = 0, py::arg("bootstrap") = true,
           py::arg("seed") = 0)
      .def_readwrite("n_trees", &ForestParams::n_trees)
      .def_readwrite("max_depth", &ForestParams::max_depth)
      .def_readwrite("min_samples_leaf", &ForestParams::min_samples_leaf)
      .def_readwrite("mtry", &ForestParams::mtry)
      .def_readwrite("bootstrap", &ForestParams::bootstrap)
      .def_readwrite("seed", &ForestParams::seed);

  py::class_<Forest>(m, "Forest")
      .def_property_readonly("n_trees",
                             [](const Forest& f) { return f.trees.size(); })
      .def_property_readonly("feature_names",
                             [](const Forest& f) {
                               std::vector<std::string> names;
                               for (const auto& feat : f.schema.features())
                                 names.push_back(feat.name);
                               return names;
                             })
      .def("predict_proba",
           [](const Forest& f,
              py::array_t<double, py::array::c_style | py::array::forcecast> X) {
             if (X.ndim() == 1) {
               std::vector<double> x(X.data(), X.data() + X.shape(0));
               return py::cast(predict_proba(f, x));
             }
             if (X.ndim() != 2) throw std::invalid_argument("X must be 1-D or 2-D");
             auto view = X.unchecked<2>();
             py::array_t<double> out(static_cast<std::size_t>(X.shape(0)));
             auto out_view = out.mutable_unchecked<1>();
             std::vector<double> x(static_cast<std::size_t>(X.shape(1)));
             for (py::ssize_t i = 0; i < X.shape(0); ++i) {
               for (py::ssize_t j = 0; j < X.shape(1); ++j)
                 x[static_cast<std::size_t>(j)] = view(i, j);
               out_view(i) = predict_proba(f, x);
             }
             return py::object(out);
           })
      .def("predict_label",
           [](const Forest& f, const std::vector<double>& x, double threshold) {
             return predict_label(f, x, threshold);
           },
           py::arg("x"), py::arg("threshold") = 0.5)
      .def("dumps", [](const Forest& f) { return write_forest(f); })
      .def("save", [](const Forest& f, const std::string& path) { write_forest_file(f, path); });

  m.def("train_forest", &train_forest, py::arg("dataset"), py::arg("params") = ForestParams{},
        py::arg("threads") = 1);
  m.def("load_forest", &read_forest_file);
  m.def("loads_forest", [](const std::string& text) { return read_forest(text); });

  py::class_<ShapExplanation>(m, "ShapExplanation")
      .def_readonly("base_value", &ShapExplanation::base_value)
      .def_readonly("contributions", &ShapExplanation::contributions)
      .def_readonly("prediction", &ShapExplanation::prediction);

  m.def("forest_shap",
        [](const Forest& f, const std::vector<double>& x) { return forest_shap(f, x); });
  m.def("shap_matrix",
        [](const Forest& f, const Dataset& d, int threads) {
          const auto explanations = explain_dataset(f, d, threads);
          const std::size_t n = explanations.size();
          const std::size_t p = f.schema.size();
          py::array_t<double> phi({n, p});
          py::array_t<double> base(n), pred(n);
          auto phi_view = phi.mutable_unchecked<2>();
          auto base_view = base.mutable_unchecked<1>();
          auto pred_view = pred.mutable_unchecked<1>();
          for (std::size_t i = 0; i < n; ++i) {
            base_view(i) = explanations[i].base_value;
            pred_view(i) = explanations[i].prediction;
            for (std::size_t j = 0; j < p; ++j) phi_view(i, j) = explanations[i].contributions[j];
          }
          return py::make_tuple(base, phi, pred);
        },
        py::arg("forest"), py::arg("dataset"), py::arg("threads") = 1,
        "per-row (base, contributions, prediction)");
  m.def("importance_table",
        [](const Forest& f, const Dataset& d, int threads) {
          std::vector<py::tuple> rows;
          for (const auto& r : importance_table(f, d, threads))
            rows.push_back(py::make_tuple(r.feature, r.mean_abs_shap, r.rank));
          return rows;
        },
        py::arg("forest"), py::arg("dataset"), py::arg("threads") = 1);

  m.def("roc_auc", [](const py::object& y, const py::object& s) {
    return roc_auc(to_labels(y), to_scores(s));
  });
  m.def("pr_auc", [](const py::object& y, const py::object& s) {
    return pr_curve_and_auc(to_labels(y), to_scores(s)).second;
  });
  m.def("brier", [](const py::object& y, const py::object& s) {
    return brier(to_labels(y), to_scores(s));
  });
  m.def("confusion",
        [](const py::object& y, const py::object& s, double threshold) {
          const ConfusionMatrix cm = confusion(to_labels(y), to_scores(s), threshold);
          return py::make_tuple(cm.tp, cm.fp, cm.fn, cm.tn);
        },
        py::arg("labels"), py::arg("scores"), py::arg("threshold") = 0.5);
  m.def("derived_metrics",
        [](std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn) {
          const DerivedMetrics dm = derived_metrics(ConfusionMatrix{tp, fp, fn, tn});
          py::dict out;
          auto set = [&out](const char* key, const std::optional<double>& v) {
            out[key] = v ? py::cast(*v) : py::none();
          };
          set("accuracy", dm.accuracy);
          set("precision", dm.precision);
          set("recall", dm.recall);
          set("f1", dm.f1);
          return out;
        });
  m.def("reliability_bins",
        [](const py::object& y, const py::object& s, int n_bins) {
          const ReliabilityBins rb = reliability_bins(to_labels(y), to_scores(s), n_bins);
          std::vector<py::dict> bins;
          for (const auto& b : rb.bins) {
            py::dict bin;
            bin["lo"] = b.lo;
            bin["hi"] = b.hi;
            bin["count"] = b.count;
            bin["mean_predicted"] = b.count ? py::cast(b.mean_predicted) : py::none();
            bin["observed_frequency"] = b.count ? py::cast(b.observed_frequency) : py::none();
            bins.push_back(bin);
          }
          return py::make_tuple(bins, rb.brier);
        },
        py::arg("labels"), py::arg("scores"), py::arg("n_bins") = 10);
  m.def("topk_capture",
        [](const py::object& y, const py::object& s, const std::vector<double>& ks) {
          std::vector<py::tuple> out;
          for (const auto& p :
               topk_capture(to_labels(y), to_scores(s), ks.empty() ? default_topk_grid() : ks))
            out.push_back(py::make_tuple(p.k_fraction, p.captured_fraction));
          return out;
        },
        py::arg("labels"), py::arg("scores"), py::arg("k_grid") = std::vector<double>{});
  m.def("bootstrap_ci",
        [](const std::string& metric, const py::object& y, const py::object& s, int B,
           double level, std::uint64_t seed, double threshold, int threads) {
          const BootstrapInterval ci = bootstrap_ci(metric_kind_of(metric), to_labels(y),
                                                    to_scores(s), B, level, seed, threshold,
                                                    threads);
          py::dict out;
          out["point"] = ci.point;
          out["lo"] = ci.lo;
          out["hi"] = ci.hi;
          out["B"] = ci.B;
          out["level"] = ci.level;
          out["skipped"] = ci.skipped;
          return out;
        },
        py::arg("metric"), py::arg("labels"), py::arg("scores"), py::arg("B") = 1000,
        py::arg("level") = 0.95, py::arg("seed") = 0, py::arg("threshold") = 0.5,
        py::arg("threads") = 1);
  m.def("eval_report_text",
        [](const py::object& y, const py::object& s, double threshold, int bins, int B,
           double level, std::uint64_t seed) {
          EvalOptions options;
          options.threshold = threshold;
          options.n_bins = bins;
          options.bootstrap_B = B;
          options.level = level;
          options.seed = seed;
          return write_eval_report(evaluate(to_labels(y), to_scores(s), options));
        },
        py::arg("labels"), py::arg("scores"), py::arg("threshold") = 0.5, py::arg("bins") = 10,
        py::arg("B") = 0, py::arg("level") = 0.95, py::arg("seed") = 0);

  py::class_<GridRaster>(m, "GridRaster")
      .def_static("from_array", &raster_from_array, py::arg("array"), py::arg("xllcorner") = 0.0,
                  py::arg("yllcorner") = 0.0, py::arg("cellsize") = 1.0,
                  py::arg("nodata") = -9999.0)
      .def("to_array", &raster_to_array)
      .def_readonly("ncols", &GridRaster::ncols)
      .def_readonly("nrows", &GridRaster::nrows)
      .def_readonly("xllcorner", &GridRaster::xllcorner)
      .def_readonly("yllcorner", &GridRaster::yllcorner)
      .def_readonly("cellsize", &GridRaster::cellsize)
      .def_readonly("nodata", &GridRaster::nodata_value);

  m.def("read_ascii_grid", &read_ascii_grid_file);
  m.def("write_ascii_grid",
        [](const GridRaster& g, const std::string& path) { write_ascii_grid_file(g, path); });
  m.def("grid_to_text", [](const GridRaster& g) { return write_ascii_grid(g); });
  m.def("grid_from_text", [](const std::string& text) { return read_ascii_grid(text); });

  m.def("predict_raster",
        [](const Forest& f, const std::map<std::string, GridRaster>& layers, int threads) {
          RasterStack stack;
          stack.schema = f.schema;
          for (const auto& feat : f.schema.features()) {
            const auto it = layers.find(feat.name);
            if (it == layers.end())
              throw std::invalid_argument("missing layer '" + feat.name + "'");
            stack.features.push_back(it->second);
          }
          return predict_raster(f, stack, threads);
        },
        py::arg("forest"), py::arg("layers"), py::arg("threads") = 1);
  m.def("classify_risk",
        [](const GridRaster& probability, double c1, double c2) {
          return classify_risk(probability, {c1, c2}).classes;
        },
        py::arg("probability"), py::arg("c1") = 1.0 / 3.0, py::arg("c2") = 2.0 / 3.0);
  m.def("quantile_cutoffs",
        [](const GridRaster& probability, double q1, double q2) {
          const auto [c1, c2] = quantile_cutoffs(probability, {q1, q2});
          return py::make_tuple(c1, c2);
        },
        py::arg("probability"), py::arg("q1") = 1.0 / 3.0, py::arg("q2") = 2.0 / 3.0);
  m.def("district_area_table",
        [](const GridRaster& classes, const GridRaster& districts) {
          RiskMap rm{classes, classes, {0.0, 1.0}};
          std::vector<py::tuple> rows;
          for (const auto& r : district_area_table(rm, districts))
            rows.push_back(py::make_tuple(r.district_id, r.risk_class, r.area_km2, r.fraction));
          return rows;
        },
        py::arg("classes"), py::arg("districts"));

  m.def("synth_landscape",
        [](int grid, int samples, int smooth_radius, int blocks, double shift, double intercept,
           std::uint64_t seed, const std::vector<double>& beta) {
          SynthParams params;
          params.ncols = grid;
          params.nrows = grid;
          params.n_samples = samples;
          params.smooth_radius = smooth_radius;
          params.region_blocks = blocks;
          params.region_shift = shift;
          params.intercept = intercept;
          params.seed = seed;
          params.beta = beta;
          SynthResult result = synth_landscape(params);
          py::dict layers;
          for (std::size_t j = 0; j < result.stack.features.size(); ++j)
            layers[params.schema.at(j).name.c_str()] = result.stack.features[j];
          py::dict out;
          out["samples"] = result.samples;
          out["truth"] = result.truth;
          out["layers"] = layers;
          out["districts"] = *result.stack.districts;
          out["strata"] = *result.stack.strata;
          return out;
        },
        py::arg("grid") = 64, py::arg("samples") = 4000, py::arg("smooth_radius") = 3,
        py::arg("blocks") = 2, py::arg("shift") = 0.0, py::arg("intercept") = 0.0,
        py::arg("seed") = 0, py::arg("beta") = std::vector<double>{});
  m.def("default_synth_beta", &default_synth_beta);
}
