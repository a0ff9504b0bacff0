#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "epihumat/scenario.hpp"
#include "epihumat/simulation.hpp"

namespace epihumat {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr int kManifestVersion = 1;

// Column order of every metrics CSV.
const std::vector<std::string>& csv_columns();

// One row per day. Throws std::logic_error if a row's state columns do not
// sum to `population`.
void write_metrics_csv(std::ostream& out, const std::vector<DailyMetrics>& series, std::size_t population);
void write_mean_csv(std::ostream& out, const std::vector<MeanMetrics>& series);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  // npos when absent
};

// Reads a metrics CSV, requiring exactly the csv_columns() header.
CsvTable parse_metrics_csv(std::istream& in, std::string_view source = "<csv>");
CsvTable read_metrics_csv(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const ScenarioConfig& config);  // "fnv1a64:<16 hex digits>"

struct RunFiles {
  std::vector<std::string> replicate_csvs;
  std::string mean_csv;
};

// JSON manifest identifying a run: tool and schema versions, config hash,
// seeds, output files and the full resolved config.
std::string manifest_json(const ScenarioConfig& config, const RunResult& result, const RunFiles& files);

// Config embedded in a manifest, with the manifest's seed and replicate count.
ScenarioConfig config_from_manifest(std::string_view text, std::string_view source = "<manifest>");
bool looks_like_manifest(std::string_view text);

struct PlotSpec {
  std::vector<std::string> series;  // CSV column names
  std::string title;
  int width = 900;
  int height = 520;
};

std::vector<std::string> default_plot_series();
std::string_view series_color(std::string_view column);  // empty for unknown columns

// Static SVG line chart with a legend. Throws ValidationError for an empty
// selection or a column missing from the table.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

}  // namespace epihumat
