#include "epihumat/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "epihumat/error.hpp"
#include "text_util.hpp"

namespace epihumat {

using nlohmann::json;

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{"day",          "susceptible", "exposed",   "infectious",
                                                "hospitalized", "icu",         "quarantine", "recovered",
                                                "dead",         "new_infections", "communications",
                                                "acceptance_level"};
  return columns;
}

namespace {

constexpr std::array<Phase, kPhaseCount> kCsvPhases{Phase::Susceptible, Phase::Exposed,    Phase::InfectiousCommunity,
                                                    Phase::Hospitalized, Phase::Icu,       Phase::Quarantine,
                                                    Phase::Recovered,    Phase::Dead};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<DailyMetrics>& series, std::size_t population) {
  write_header(out);
  for (const auto& m : series) {
    if (m.population() != population) {
      throw std::logic_error("metrics for day " + std::to_string(m.day) + " sum to " +
                             std::to_string(m.population()) + ", expected " + std::to_string(population));
    }
    out << m.day;
    for (const Phase p : kCsvPhases) out << ',' << m.counts[static_cast<std::size_t>(p)];
    out << ',' << m.new_infections << ',' << m.communications << ',' << fixed(m.acceptance_level, 6) << '\n';
  }
}

void write_mean_csv(std::ostream& out, const std::vector<MeanMetrics>& series) {
  write_header(out);
  for (const auto& m : series) {
    out << m.day;
    for (const Phase p : kCsvPhases) out << ',' << fixed(m.counts[static_cast<std::size_t>(p)], 4);
    out << ',' << fixed(m.new_infections, 4) << ',' << fixed(m.communications, 4) << ','
        << fixed(m.acceptance_level, 6) << '\n';
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? std::string::npos : static_cast<std::size_t>(it - columns.begin());
}

CsvTable parse_metrics_csv(std::istream& in, std::string_view source) {
  const std::string src(source);
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split(trimmed, ',');
    if (t.columns.empty()) {
      for (const auto f : fields) t.columns.emplace_back(detail::trim(f));
      if (t.columns != csv_columns()) throw ValidationError(src + ": header does not match the metrics CSV schema");
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw ParseError(src + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto f : fields) {
      const auto v = detail::parse_double(detail::trim(f));
      if (!v) throw ParseError(src + ":" + std::to_string(line_no) + ": malformed number '" + std::string(f) + "'");
      if (*v < 0.0) throw ValidationError(src + ":" + std::to_string(line_no) + ": negative value");
      row.push_back(*v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw ValidationError(src + ": empty file");
  return t;
}

CsvTable read_metrics_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_metrics_csv(in, path.string());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ScenarioConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize(config))));
  return std::string("fnv1a64:") + buf;
}

std::string manifest_json(const ScenarioConfig& config, const RunResult& result, const RunFiles& files) {
  json j;
  j["manifest_version"] = kManifestVersion;
  j["tool"] = "epihumat";
  j["tool_version"] = std::string(kVersion);
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["scenario_schema_version"] = kScenarioSchemaVersion;
  j["config_hash"] = config_hash(config);
  j["root_seed"] = config.rng_seed;
  j["replicates"] = result.replicates.size();
  j["seeds"] = result.seeds;
  j["files"] = {{"replicates", files.replicate_csvs}, {"mean", files.mean_csv}};
  j["config"] = json::parse(serialize(config));
  return j.dump(2) + "\n";
}

bool looks_like_manifest(std::string_view text) {
  try {
    const auto j = json::parse(text);
    return j.is_object() && j.contains("manifest_version") && j.contains("config");
  } catch (const json::exception&) {
    return false;
  }
}

ScenarioConfig config_from_manifest(std::string_view text, std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("config")) throw ValidationError(std::string(source) + ": not a run manifest");
  if (j.value("manifest_version", 0) != kManifestVersion) {
    throw ValidationError(std::string(source) + ": unsupported manifest_version");
  }
  // Paths inside are absolute, so the base directory is irrelevant.
  auto config = parse_scenario(j["config"].dump(), std::filesystem::current_path(), source);
  const auto hash = config_hash(config);
  if (j.value("config_hash", std::string()) != hash) {
    throw ValidationError(std::string(source) + ": config_hash does not match the embedded config");
  }
  return config;
}

std::vector<std::string> default_plot_series() {
  return {"susceptible", "exposed", "infectious", "hospitalized", "icu", "quarantine", "recovered", "dead"};
}

std::string_view series_color(std::string_view column) {
  static const std::pair<std::string_view, std::string_view> colors[] = {
      {"susceptible", "#2ca02c"},   {"exposed", "#e6c619"},        {"infectious", "#d62728"},
      {"hospitalized", "#7e3f9e"},  {"icu", "#8c564b"},            {"quarantine", "#e11ee1"},
      {"recovered", "#1f5fd6"},     {"dead", "#7f7f7f"},           {"new_infections", "#ff7f0e"},
      {"communications", "#17becf"}, {"acceptance_level", "#111111"}};
  for (const auto& [name, color] : colors) {
    if (name == column) return color;
  }
  return {};
}

namespace {

// Smallest 1/2/5 x 10^k step giving at most `ticks` intervals up to `max`.
double nice_step(double max, int ticks) {
  if (max <= 0.0) return 1.0;
  const double raw = max / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  if (std::abs(v - std::round(v)) < 1e-9) std::snprintf(buf, sizeof buf, "%.0f", v);
  else std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  if (spec.series.empty()) throw ValidationError("no series selected for plotting");
  std::vector<std::size_t> cols;
  std::vector<std::string> issues;
  for (const auto& s : spec.series) {
    const auto c = table.column(s);
    if (c == std::string::npos || s == "day") issues.push_back("unknown series '" + s + "'");
    else cols.push_back(c);
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  const auto day_col = table.column("day");
  if (day_col == std::string::npos) throw ValidationError("table has no day column");

  double max_x = 1.0;
  double max_y = 0.0;
  for (const auto& row : table.rows) {
    max_x = std::max(max_x, row[day_col]);
    for (const auto c : cols) max_y = std::max(max_y, row[c]);
  }
  const double y_step = nice_step(max_y, 5);
  const double y_top = std::max(y_step, std::ceil(max_y / y_step) * y_step);
  const double x_step = nice_step(max_x, 10);
  const double x_right = std::max(x_step, std::ceil(max_x / x_step) * x_step);

  const double left = 70, right = 170, top = 40, bottom = 50;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + pw * x / x_right; };
  auto py = [&](double y) { return top + ph * (1.0 - y / y_top); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n";
  }
  for (double y = 0.0; y <= y_top + 1e-9; y += y_step) {
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
        << num(py(y)) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << label(y)
        << "</text>\n";
  }
  for (double x = 0.0; x <= x_right + 1e-9; x += x_step) {
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
        << label(x) << "</text>\n";
  }
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(spec.height - 10.0)
      << "\" text-anchor=\"middle\">day</text>\n";
  svg << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">agents</text>\n";

  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto color = series_color(spec.series[k]);
    const std::string stroke = color.empty() ? "#000000" : std::string(color);
    svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      svg << (r ? " " : "") << num(px(table.rows[r][day_col])) << ',' << num(py(table.rows[r][cols[k]]));
    }
    svg << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    svg << "<line x1=\"" << num(left + pw + 14) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 38)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << stroke << "\" stroke-width=\"3\"/>\n";
    svg << "<text x=\"" << num(left + pw + 44) << "\" y=\"" << num(ly + 4) << "\">" << escape(spec.series[k])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace epihumat
