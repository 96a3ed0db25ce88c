#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coda/intervals.hpp"
#include "coda/pipeline.hpp"
#include "coda/tuning.hpp"

namespace coda {

/// Cells with a zero count, reported at ingestion time.
struct IngestReport {
  struct ZeroCell {
    int year;
    std::string age_band;
    std::string cause;
  };
  std::vector<ZeroCell> zero_cells;
};

/// Explicit part ordering (part order defines the Helmert basis, so it
/// must be reproducible across runs and machines).
struct LabelOrdering {
  std::vector<std::string> age_bands;
  std::vector<std::string> causes;
};

/// Parses the ordering sidecar: lines `age,<label>` / `cause,<label>`.
LabelOrdering read_ordering(const std::filesystem::path& path);

/// Long-format CSV `year,age_band,cause,sex,deaths`. Labels are ordered
/// by first appearance unless an ordering is supplied. Lines starting
/// with '#' are skipped.
DeathCountPanel ingest(const std::filesystem::path& path, const std::string& sex,
                       IngestReport* report = nullptr,
                       const std::optional<LabelOrdering>& ordering = std::nullopt);

/// Writes a panel back out in the ingestion schema (round-trip safe).
void write_panel(const std::filesystem::path& path, const DeathCountPanel& panel);

// ---------------------------------------------------------------------------
// Run manifest

struct RunManifest {
  std::string input;
  std::string sex;
  std::string transform = "clr";
  std::vector<double> alpha_grid;        // for tune
  std::string zeros = "none";
  int horizon = 10;
  int n_test = 4;
  int n_folds = 4;
  std::string criterion = "mae";
  int n_boot = 500;
  double coverage = 0.9;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool global_factor = false;
  bool reclose_bands = false;
  std::string ordering_file;

  PipelineConfig pipeline_config() const;
  IntervalConfig interval_config() const;
  std::string to_json() const;
};

// ---------------------------------------------------------------------------
// Output writers (every file carries the manifest as '#' comment lines)

void write_forecast_csv(const std::filesystem::path& path, const ForecastSet& fs,
                        const RunManifest& manifest);
void write_clamps_csv(const std::filesystem::path& path, const ForecastSet& fs,
                      const RunManifest& manifest);
void write_manifest_json(const std::filesystem::path& path, const RunManifest& manifest);
void write_alpha_grid_csv(const std::filesystem::path& path, const AlphaGridResult& result,
                          const RunManifest& manifest);
void write_methods_table_csv(const std::filesystem::path& path, const std::vector<EvalRow>& table,
                             const RunManifest& manifest);
void write_intervals_csv(const std::filesystem::path& path, const IntervalForecast& ivf,
                         const RunManifest& manifest);

/// Tidy `series,year,cause,value` rows: observed, fitted, and forecast
/// proportions aggregated by cause over years.
void write_plotdata_csv(const std::filesystem::path& path, const DeathCountPanel& panel,
                        const PipelineConfig& cfg, const RunManifest& manifest);

}  // namespace coda
