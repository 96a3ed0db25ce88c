#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coda/intervals.hpp"
#include "coda/io.hpp"
#include "coda/pipeline.hpp"
#include "coda/tuning.hpp"
#include "coda/version.hpp"

namespace py = pybind11;
using namespace coda;

namespace {

DeathCountPanel make_panel(std::vector<int> years, std::vector<std::string> age_bands,
                           std::vector<std::string> causes, Eigen::MatrixXd counts,
                           std::string sex) {
  DeathCountPanel panel;
  panel.years = std::move(years);
  panel.age_bands = std::move(age_bands);
  panel.causes = std::move(causes);
  panel.counts = std::move(counts);
  panel.sex = std::move(sex);
  panel.validate();
  return panel;
}

PipelineConfig make_config(const std::string& transform, const std::string& zeros, int horizon,
                           bool global_factor, std::uint64_t seed) {
  RunManifest m;
  m.transform = transform;
  m.zeros = zeros;
  m.horizon = horizon;
  m.global_factor = global_factor;
  m.seed = seed;
  return m.pipeline_config();
}

}  // namespace

PYBIND11_MODULE(_coda, m) {
  m.doc() = "Compositional cause-of-death mortality forecasting";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "CodaError");

  py::class_<DeathCountPanel>(m, "DeathCountPanel")
      .def(py::init(&make_panel), py::arg("years"), py::arg("age_bands"), py::arg("causes"),
           py::arg("counts"), py::arg("sex") = "all")
      .def_readonly("years", &DeathCountPanel::years)
      .def_readonly("age_bands", &DeathCountPanel::age_bands)
      .def_readonly("causes", &DeathCountPanel::causes)
      .def_readonly("counts", &DeathCountPanel::counts)
      .def_readonly("sex", &DeathCountPanel::sex);

  py::class_<CompositionMatrix>(m, "CompositionMatrix")
      .def_readonly("values", &CompositionMatrix::values)
      .def_readonly("year_labels", &CompositionMatrix::year_labels)
      .def("part_name", &CompositionMatrix::part_name);

  py::class_<ForecastSet>(m, "ForecastSet")
      .def_readonly("years", &ForecastSet::years)
      .def_readonly("densities", &ForecastSet::densities)
      .def("part_name", &ForecastSet::part_name)
      .def_property_readonly("clamp_events", [](const ForecastSet& fs) {
        std::vector<std::pair<int, std::string>> events;
        for (const auto& e : fs.clamp_events) events.emplace_back(e.year, e.part_name);
        return events;
      });

  py::class_<IntervalForecast>(m, "IntervalForecast")
      .def_readonly("years", &IntervalForecast::years)
      .def_readonly("lower", &IntervalForecast::lower)
      .def_readonly("point", &IntervalForecast::point)
      .def_readonly("upper", &IntervalForecast::upper);

  py::class_<FoldPlan>(m, "FoldPlan")
      .def_readonly("test_years", &FoldPlan::test_years)
      .def_property_readonly("folds", [](const FoldPlan& plan) {
        std::vector<std::pair<std::vector<int>, std::vector<int>>> folds;
        for (const auto& f : plan.folds) folds.emplace_back(f.train_years, f.validation_years);
        return folds;
      });

  // simplex algebra
  m.def("closure", &closure, py::arg("v"));
  m.def("perturb", &perturb, py::arg("x"), py::arg("y"));
  m.def("inverse_perturb", &inverse_perturb, py::arg("x"), py::arg("y"));
  m.def("build_composition", &build_composition, py::arg("panel"));
  m.def("compute_geometric_mean", &compute_geometric_mean, py::arg("m"));

  // transforms
  m.def("helmert", [](int p) { return helmert(p); }, py::arg("p"));
  m.def("clr", &clr, py::arg("row"));
  m.def("clr_inverse", &clr_inverse, py::arg("w"));
  m.def("ilr", &ilr, py::arg("row"));
  m.def("ilr_inverse", &ilr_inverse, py::arg("z"));
  m.def("alpha_forward", &alpha_forward, py::arg("row"), py::arg("alpha"));
  m.def(
      "alpha_inverse",
      [](const Eigen::VectorXd& z, double alpha) {
        ClampReport rep;
        Eigen::VectorXd row = alpha_inverse(z, alpha, &rep);
        return std::make_pair(row, rep.clamped_parts);
      },
      py::arg("z"), py::arg("alpha"), "Returns (composition, clamped part indices).");

  // pipeline
  m.def(
      "run_point_forecast",
      [](const DeathCountPanel& panel, const std::string& transform, const std::string& zeros,
         int horizon, bool global_factor) {
        return run_point_forecast(panel, make_config(transform, zeros, horizon, global_factor, 0));
      },
      py::arg("panel"), py::arg("transform") = "clr", py::arg("zeros") = "none",
      py::arg("horizon") = 1, py::arg("global_factor") = false);

  // tuning
  m.def("make_fold_plan", &make_fold_plan, py::arg("years"), py::arg("n_test"),
        py::arg("n_folds"));
  m.def("score", &score, py::arg("observed"), py::arg("predicted"),
        "Returns (rmse, mae) on the x100 scale.");
  m.def(
      "tune_alpha",
      [](const DeathCountPanel& panel, const std::vector<double>& grid, int n_test, int n_folds,
         const std::string& criterion) {
        FoldPlan plan = make_fold_plan(panel.years, n_test, n_folds);
        auto result = tune_alpha(panel, grid, plan,
                                 criterion == "rmse" ? Criterion::RMSE : Criterion::MAE);
        py::dict table;
        for (size_t i = 0; i < result.rows.size(); ++i)
          table[py::float_(result.grid[i])] =
              py::make_tuple(result.rows[i].rmse_x100, result.rows[i].mae_x100);
        return py::make_tuple(result.chosen_alpha, table);
      },
      py::arg("panel"), py::arg("grid"), py::arg("n_test"), py::arg("n_folds"),
      py::arg("criterion") = "mae", "Returns (chosen_alpha, {alpha: (rmse, mae)}).");

  // intervals
  m.def(
      "bootstrap_intervals",
      [](const DeathCountPanel& panel, const std::string& transform, const std::string& zeros,
         int horizon, int n_boot, double coverage, std::uint64_t seed) {
        IntervalConfig icfg;
        icfg.n_boot = n_boot;
        icfg.coverage = coverage;
        icfg.seed = seed;
        return bootstrap_intervals(panel, make_config(transform, zeros, horizon, false, seed),
                                   icfg);
      },
      py::arg("panel"), py::arg("transform") = "clr", py::arg("zeros") = "none",
      py::arg("horizon") = 1, py::arg("n_boot") = 500, py::arg("coverage") = 0.9,
      py::arg("seed") = 0);

  // io
  m.def(
      "ingest",
      [](const std::string& path, const std::string& sex) { return ingest(path, sex); },
      py::arg("path"), py::arg("sex"));
}
