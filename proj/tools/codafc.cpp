#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coda/io.hpp"
#include "coda/version.hpp"

namespace fs = std::filesystem;

namespace {

// exit codes: 0 success, 2 parse/input, 3 configuration, 4 numeric/model
int exit_code_for(const coda::Error& e) {
  switch (e.code()) {
    case coda::ErrorCode::ParseError:
    case coda::ErrorCode::DuplicateCell:
    case coda::ErrorCode::MissingCell:
    case coda::ErrorCode::NegativeDeaths:
      return 2;
    case coda::ErrorCode::InvalidConfig:
    case coda::ErrorCode::AlphaOutOfRange:
    case coda::ErrorCode::InsufficientYears:
      return 3;
    default:
      return 4;
  }
}

struct Cli {
  coda::RunManifest manifest;
  double alpha = 0.0;             // set when --alpha given
  std::string alpha_grid_spec;    // comma-separated, for tune
  std::string transform = "clr";

  void add_common(CLI::App* cmd) {
    cmd->add_option("--input", manifest.input, "input panel CSV")->required();
    cmd->add_option("--sex", manifest.sex, "sex label to select")->required();
    cmd->add_option("--zeros", manifest.zeros, "none | omit | replace:<x>");
    cmd->add_option("--seed", manifest.seed, "random seed");
    cmd->add_option("--out-dir", manifest.out_dir, "output directory");
    cmd->add_option("--ordering", manifest.ordering_file, "label ordering sidecar file");
    cmd->add_flag("--global-factor", manifest.global_factor,
                  "single factor over all parts instead of one per cause");
  }

  void add_transform(CLI::App* cmd) {
    cmd->add_option("--transform", transform, "clr | ilr | alpha | rda");
    cmd->add_option("--alpha", alpha, "alpha value for --transform alpha");
  }

  void resolve_transform() {
    if (transform == "alpha") {
      manifest.transform = coda::TransformTag::alpha_t(alpha).label();
    } else {
      manifest.transform = coda::TransformTag::parse(transform).label();
    }
  }

  coda::DeathCountPanel load_panel() const {
    std::optional<coda::LabelOrdering> ordering;
    if (!manifest.ordering_file.empty())
      ordering = coda::read_ordering(manifest.ordering_file);
    coda::IngestReport report;
    auto panel = coda::ingest(manifest.input, manifest.sex, &report, ordering);
    if (!report.zero_cells.empty()) {
      std::cerr << "note: " << report.zero_cells.size() << " zero-count cells";
      size_t shown = 0;
      for (const auto& z : report.zero_cells) {
        if (shown++ == 8) {
          std::cerr << " ...";
          break;
        }
        std::cerr << (shown == 1 ? ": " : ", ") << "(" << z.year << "," << z.age_band << ","
                  << z.cause << ")";
      }
      std::cerr << "\n";
    }
    return panel;
  }

  fs::path out(const std::string& name) const {
    fs::create_directories(manifest.out_dir);
    return fs::path(manifest.out_dir) / name;
  }
};

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cause-specific mortality composition forecasting"};
  app.set_version_flag("--version", coda::kVersion);
  app.require_subcommand(1);

  Cli cli;

  auto* c_forecast = app.add_subcommand("forecast", "point forecast of death densities");
  cli.add_common(c_forecast);
  cli.add_transform(c_forecast);
  c_forecast->add_option("--horizon", cli.manifest.horizon, "forecast horizon in years");

  auto* c_tune = app.add_subcommand("tune", "cross-validated alpha selection");
  cli.add_common(c_tune);
  c_tune->add_option("--alpha-grid", cli.alpha_grid_spec,
                     "comma-separated alpha grid (default 0.1..1.0)");
  c_tune->add_option("--n-test", cli.manifest.n_test, "held-out test years");
  c_tune->add_option("--n-folds", cli.manifest.n_folds, "expanding-window folds");
  c_tune->add_option("--criterion", cli.manifest.criterion, "rmse | mae");

  auto* c_eval = app.add_subcommand("evaluate", "method comparison on the test window");
  cli.add_common(c_eval);
  c_eval->add_option("--alpha", cli.alpha, "alpha value for the alpha rows");
  c_eval->add_option("--alpha-grid", cli.alpha_grid_spec,
                     "alpha values to include as table rows");
  c_eval->add_option("--n-test", cli.manifest.n_test, "held-out test years");

  auto* c_intervals = app.add_subcommand("intervals", "bootstrap interval forecast");
  cli.add_common(c_intervals);
  cli.add_transform(c_intervals);
  c_intervals->add_option("--horizon", cli.manifest.horizon, "forecast horizon in years");
  c_intervals->add_option("--n-boot", cli.manifest.n_boot, "bootstrap replicates");
  c_intervals->add_option("--coverage", cli.manifest.coverage, "interval coverage, e.g. 0.9");
  c_intervals->add_flag("--reclose-bands", cli.manifest.reclose_bands,
                        "close the envelope rows (caveat: per-cell quantiles of "
                        "compositions do not form a composition)");

  auto* c_plot = app.add_subcommand("plotdata", "observed/fitted/forecast series by cause");
  cli.add_common(c_plot);
  cli.add_transform(c_plot);
  c_plot->add_option("--horizon", cli.manifest.horizon, "forecast horizon in years");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_forecast->parsed()) {
      cli.resolve_transform();
      auto panel = cli.load_panel();
      auto fset = coda::run_point_forecast(panel, cli.manifest.pipeline_config());
      coda::write_forecast_csv(cli.out("forecast.csv"), fset, cli.manifest);
      coda::write_clamps_csv(cli.out("clamps.csv"), fset, cli.manifest);
      coda::write_manifest_json(cli.out("manifest.json"), cli.manifest);
      std::cout << "wrote " << cli.out("forecast.csv").string() << " ("
                << fset.clamp_events.size() << " clamp events)\n";
    } else if (c_tune->parsed()) {
      if (cli.alpha_grid_spec.empty())
        cli.manifest.alpha_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
      else
        cli.manifest.alpha_grid = parse_grid(cli.alpha_grid_spec);
      auto panel = cli.load_panel();
      auto plan = coda::make_fold_plan(panel.years, cli.manifest.n_test, cli.manifest.n_folds);
      auto criterion =
          cli.manifest.criterion == "rmse" ? coda::Criterion::RMSE : coda::Criterion::MAE;
      auto cfg = cli.manifest.pipeline_config();  // transform still the default here
      auto result = coda::tune_alpha(panel, cli.manifest.alpha_grid, plan, criterion, cfg.zeros,
                                     cli.manifest.global_factor);
      // record the winner so the emitted manifest reruns as a forecast
      cli.manifest.transform = coda::TransformTag::alpha_t(result.chosen_alpha).label();
      coda::write_alpha_grid_csv(cli.out("alpha_grid.csv"), result, cli.manifest);
      std::ofstream chosen(cli.out("chosen_alpha"));
      chosen << result.chosen_alpha << "\n";
      coda::write_manifest_json(cli.out("manifest.json"), cli.manifest);
      std::cout << "chosen alpha: " << result.chosen_alpha << "\n";
    } else if (c_eval->parsed()) {
      auto panel = cli.load_panel();
      auto cfg = cli.manifest.pipeline_config();
      std::vector<coda::MethodSpec> methods;
      for (const char* t : {"clr", "ilr"}) {
        methods.push_back({coda::TransformTag::parse(t), coda::ZeroStrategy::omit()});
        methods.push_back({coda::TransformTag::parse(t), coda::ZeroStrategy::replace(0.25)});
        methods.push_back({coda::TransformTag::parse(t), coda::ZeroStrategy::replace(0.5)});
      }
      std::vector<double> alphas = cli.alpha_grid_spec.empty()
                                       ? std::vector<double>{0.5, 0.7, 0.9}
                                       : parse_grid(cli.alpha_grid_spec);
      if (cli.alpha > 0.0) alphas.insert(alphas.begin(), cli.alpha);
      for (double a : alphas)
        methods.push_back({coda::TransformTag::alpha_t(a), coda::ZeroStrategy::none()});
      methods.push_back({coda::TransformTag::rda(), coda::ZeroStrategy::none()});

      std::vector<int> test_years(panel.years.end() - cli.manifest.n_test, panel.years.end());
      auto table =
          coda::evaluate_methods(panel, methods, test_years, cli.manifest.global_factor);
      coda::write_methods_table_csv(cli.out("methods_table.csv"), table, cli.manifest);
      coda::write_manifest_json(cli.out("manifest.json"), cli.manifest);
      std::cout << "wrote " << cli.out("methods_table.csv").string() << "\n";
    } else if (c_intervals->parsed()) {
      cli.resolve_transform();
      auto panel = cli.load_panel();
      auto ivf = coda::bootstrap_intervals(panel, cli.manifest.pipeline_config(),
                                           cli.manifest.interval_config());
      coda::write_intervals_csv(cli.out("intervals.csv"), ivf, cli.manifest);
      coda::write_manifest_json(cli.out("manifest.json"), cli.manifest);
      std::cout << "wrote " << cli.out("intervals.csv").string() << "\n";
    } else if (c_plot->parsed()) {
      cli.resolve_transform();
      auto panel = cli.load_panel();
      coda::write_plotdata_csv(cli.out("plotdata.csv"), panel, cli.manifest.pipeline_config(),
                               cli.manifest);
      coda::write_manifest_json(cli.out("manifest.json"), cli.manifest);
      std::cout << "wrote " << cli.out("plotdata.csv").string() << "\n";
    }
  } catch (const coda::Error& e) {
    std::cerr << "error";
    if (!e.stage().empty()) std::cerr << " [" << e.stage() << "]";
    std::cerr << " (" << coda::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
