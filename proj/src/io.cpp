#include "coda/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "coda/version.hpp"
#include "json.hpp"

namespace coda {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void write_provenance(std::ofstream& out, const RunManifest& manifest) {
  out << "# coda version " << kVersion << "\n";
  std::istringstream json(manifest.to_json());
  std::string line;
  while (std::getline(json, line)) out << "# " << line << "\n";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::ParseError, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

LabelOrdering read_ordering(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open ordering file " + path.string());
  LabelOrdering ord;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw Error(ErrorCode::ParseError,
                  "ordering file line " + std::to_string(lineno) + ": expected kind,label");
    if (fields[0] == "age")
      ord.age_bands.push_back(trim(fields[1]));
    else if (fields[0] == "cause")
      ord.causes.push_back(trim(fields[1]));
    else
      throw Error(ErrorCode::ParseError,
                  "ordering file line " + std::to_string(lineno) + ": kind must be age or cause");
  }
  return ord;
}

DeathCountPanel ingest(const std::filesystem::path& path, const std::string& sex,
                       IngestReport* report, const std::optional<LabelOrdering>& ordering) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());

  struct Cell {
    int year;
    std::string age;
    std::string cause;
    double deaths;
  };
  std::vector<Cell> cells;
  std::vector<int> years;
  std::vector<std::string> ages, causes;
  auto index_of = [](std::vector<std::string>& labels, const std::string& s) {
    auto it = std::find(labels.begin(), labels.end(), s);
    if (it != labels.end()) return static_cast<int>(it - labels.begin());
    labels.push_back(s);
    return static_cast<int>(labels.size()) - 1;
  };

  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "year,age_band,cause,sex,deaths")
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(lineno) +
                        ": expected header year,age_band,cause,sex,deaths");
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 5 fields");
    if (trim(fields[3]) != sex) continue;
    Cell cell;
    try {
      cell.year = std::stoi(trim(fields[0]));
      cell.deaths = std::stod(trim(fields[4]));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad number");
    }
    if (cell.deaths < 0.0)
      throw Error(ErrorCode::NegativeDeaths,
                  "line " + std::to_string(lineno) + ": negative death count");
    cell.age = trim(fields[1]);
    cell.cause = trim(fields[2]);
    if (std::find(years.begin(), years.end(), cell.year) == years.end())
      years.push_back(cell.year);
    index_of(ages, cell.age);
    index_of(causes, cell.cause);
    cells.push_back(std::move(cell));
  }
  if (cells.empty())
    throw Error(ErrorCode::ParseError, "no rows for sex '" + sex + "' in " + path.string());

  std::sort(years.begin(), years.end());
  if (ordering) {
    for (const auto& a : ages)
      if (std::find(ordering->age_bands.begin(), ordering->age_bands.end(), a) ==
          ordering->age_bands.end())
        throw Error(ErrorCode::ParseError, "age band '" + a + "' missing from ordering file");
    for (const auto& c : causes)
      if (std::find(ordering->causes.begin(), ordering->causes.end(), c) ==
          ordering->causes.end())
        throw Error(ErrorCode::ParseError, "cause '" + c + "' missing from ordering file");
    ages = ordering->age_bands;
    causes = ordering->causes;
  }

  DeathCountPanel panel;
  panel.years = years;
  panel.age_bands = ages;
  panel.causes = causes;
  panel.sex = sex;
  const int T = panel.n_years();
  const int P = panel.n_parts();
  panel.counts.resize(T, P);
  Eigen::MatrixXd seen = Eigen::MatrixXd::Zero(T, P);
  for (const Cell& cell : cells) {
    const int t =
        static_cast<int>(std::find(years.begin(), years.end(), cell.year) - years.begin());
    const int u = static_cast<int>(std::find(ages.begin(), ages.end(), cell.age) - ages.begin());
    const int c =
        static_cast<int>(std::find(causes.begin(), causes.end(), cell.cause) - causes.begin());
    const int p = part_index(u, c, panel.n_causes());
    if (seen(t, p) != 0.0)
      throw Error(ErrorCode::DuplicateCell,
                  "duplicate cell (" + std::to_string(cell.year) + ", " + cell.age + ", " +
                      cell.cause + ", " + sex + ")");
    seen(t, p) = 1.0;
    panel.counts(t, p) = cell.deaths;
  }
  for (int t = 0; t < T; ++t)
    for (int p = 0; p < P; ++p)
      if (seen(t, p) == 0.0) {
        auto [u, c] = part_coords(p, panel.n_causes());
        throw Error(ErrorCode::MissingCell,
                    "missing cell (" + std::to_string(years[t]) + ", " + ages[u] + ", " +
                        causes[c] + ", " + sex + ")");
      }
  panel.validate();

  if (report) {
    for (int t = 0; t < T; ++t)
      for (int p = 0; p < P; ++p)
        if (panel.counts(t, p) == 0.0) {
          auto [u, c] = part_coords(p, panel.n_causes());
          report->zero_cells.push_back({years[t], ages[u], causes[c]});
        }
  }
  return panel;
}

void write_panel(const std::filesystem::path& path, const DeathCountPanel& panel) {
  auto out = open_out(path);
  out << "year,age_band,cause,sex,deaths\n";
  out.precision(17);
  for (int t = 0; t < panel.n_years(); ++t)
    for (int u = 0; u < panel.n_ages(); ++u)
      for (int c = 0; c < panel.n_causes(); ++c)
        out << panel.years[t] << ',' << panel.age_bands[u] << ',' << panel.causes[c] << ','
            << panel.sex << ',' << panel.at(t, u, c) << '\n';
}

PipelineConfig RunManifest::pipeline_config() const {
  PipelineConfig cfg;
  cfg.transform = TransformTag::parse(transform);
  if (zeros == "none")
    cfg.zeros = ZeroStrategy::none();
  else if (zeros == "omit")
    cfg.zeros = ZeroStrategy::omit();
  else if (zeros.rfind("replace:", 0) == 0)
    cfg.zeros = ZeroStrategy::replace(std::stod(zeros.substr(8)));
  else
    throw Error(ErrorCode::InvalidConfig, "unknown zero strategy '" + zeros + "'");
  cfg.horizon = horizon;
  cfg.global_factor = global_factor;
  cfg.seed = seed;
  return cfg;
}

IntervalConfig RunManifest::interval_config() const {
  IntervalConfig icfg;
  icfg.n_boot = n_boot;
  icfg.coverage = coverage;
  icfg.seed = seed;
  icfg.reclose_bands = reclose_bands;
  return icfg;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["input"] = input;
  j["sex"] = sex;
  j["transform"] = transform;
  j["alpha_grid"] = alpha_grid;
  j["zeros"] = zeros;
  j["horizon"] = horizon;
  j["n_test"] = n_test;
  j["n_folds"] = n_folds;
  j["criterion"] = criterion;
  j["n_boot"] = n_boot;
  j["coverage"] = coverage;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["global_factor"] = global_factor;
  j["reclose_bands"] = reclose_bands;
  j["ordering_file"] = ordering_file;
  return j.dump(2);
}

void write_forecast_csv(const std::filesystem::path& path, const ForecastSet& fs,
                        const RunManifest& manifest) {
  auto out = open_out(path);
  write_provenance(out, manifest);
  out << "year,age_band,cause,density\n";
  out.precision(17);
  for (size_t j = 0; j < fs.years.size(); ++j)
    for (int p = 0; p < fs.densities.cols(); ++p)
      out << fs.years[j] << ',' << fs.age_labels[fs.parts[p].age] << ','
          << fs.cause_labels[fs.parts[p].cause] << ',' << fs.densities(static_cast<int>(j), p)
          << '\n';
}

void write_clamps_csv(const std::filesystem::path& path, const ForecastSet& fs,
                      const RunManifest& manifest) {
  auto out = open_out(path);
  write_provenance(out, manifest);
  out << "year,part\n";
  for (const ClampEvent& e : fs.clamp_events) out << e.year << ',' << e.part_name << '\n';
}

void write_manifest_json(const std::filesystem::path& path, const RunManifest& manifest) {
  auto out = open_out(path);
  out << manifest.to_json() << '\n';
}

void write_alpha_grid_csv(const std::filesystem::path& path, const AlphaGridResult& result,
                          const RunManifest& manifest) {
  auto out = open_out(path);
  write_provenance(out, manifest);
  out << "method,alpha,rmse_x100,mae_x100";
  const size_t n_folds = result.rows.empty() ? 0 : result.rows.front().fold_rmse.size();
  for (size_t k = 1; k <= n_folds; ++k) out << ",fold" << k << "_rmse_x100";
  for (size_t k = 1; k <= n_folds; ++k) out << ",fold" << k << "_mae_x100";
  out << "\n";
  out.precision(10);
  for (size_t i = 0; i < result.rows.size(); ++i) {
    const EvalRow& row = result.rows[i];
    out << row.method.label() << ',' << result.grid[i] << ',' << row.rmse_x100 << ','
        << row.mae_x100;
    for (double v : row.fold_rmse) out << ',' << v;
    for (double v : row.fold_mae) out << ',' << v;
    out << '\n';
  }
}

void write_methods_table_csv(const std::filesystem::path& path, const std::vector<EvalRow>& table,
                             const RunManifest& manifest) {
  auto out = open_out(path);
  write_provenance(out, manifest);
  out << "method,alpha,rmse_x100,mae_x100\n";
  out.precision(10);
  for (const EvalRow& row : table) {
    out << row.method.label() << ',';
    if (row.method.transform.kind == TransformTag::Kind::Alpha ||
        row.method.transform.kind == TransformTag::Kind::RDA)
      out << row.method.transform.alpha;
    out << ',' << row.rmse_x100 << ',' << row.mae_x100 << '\n';
  }
}

void write_intervals_csv(const std::filesystem::path& path, const IntervalForecast& ivf,
                         const RunManifest& manifest) {
  auto out = open_out(path);
  write_provenance(out, manifest);
  out << "year,age_band,cause,lower,point,upper\n";
  out.precision(17);
  for (size_t j = 0; j < ivf.years.size(); ++j)
    for (int p = 0; p < ivf.point.cols(); ++p) {
      const int row = static_cast<int>(j);
      out << ivf.years[j] << ',' << ivf.age_labels[ivf.parts[p].age] << ','
          << ivf.cause_labels[ivf.parts[p].cause] << ',' << ivf.lower(row, p) << ','
          << ivf.point(row, p) << ',' << ivf.upper(row, p) << '\n';
    }
}

void write_plotdata_csv(const std::filesystem::path& path, const DeathCountPanel& panel,
                        const PipelineConfig& cfg, const RunManifest& manifest) {
  PipelineFit fit = fit_pipeline(panel, cfg);
  Eigen::MatrixXd fitted = fitted_densities(fit);
  ForecastSet fs = run_point_forecast(panel, cfg);
  CompositionMatrix observed = build_composition(panel);

  auto out = open_out(path);
  write_provenance(out, manifest);
  out << "series,year,cause,value\n";
  out.precision(17);

  // proportions aggregated over ages, one value per (year, cause)
  auto emit = [&](const char* series, int year, const Eigen::RowVectorXd& row,
                  const std::vector<Part>& parts, const std::vector<std::string>& cause_labels) {
    std::map<int, double> by_cause;
    for (size_t p = 0; p < parts.size(); ++p)
      by_cause[parts[p].cause] += row(static_cast<int>(p));
    for (const auto& [c, v] : by_cause)
      out << series << ',' << year << ',' << cause_labels[c] << ',' << v << '\n';
  };

  for (int t = 0; t < observed.n_rows(); ++t)
    emit("observed", observed.year_labels[t], observed.values.row(t), observed.parts,
         observed.cause_labels);
  for (int t = 0; t < fitted.rows(); ++t)
    emit("fitted", fit.lc.year_labels[t], fitted.row(t), fit.lc.parts, fit.lc.cause_labels);
  for (size_t j = 0; j < fs.years.size(); ++j)
    emit("forecast", fs.years[j], fs.densities.row(static_cast<int>(j)), fs.parts,
         fs.cause_labels);
}

}  // namespace coda
