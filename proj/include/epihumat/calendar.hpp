#pragma once

#include <optional>
#include <string_view>

namespace epihumat {

enum class ScenarioKind { NoMeasures, Lockdown, PreventiveMeasures };

enum class Weekday { Monday, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

enum class DayKind { Working, NonWorking };

std::string_view to_string(ScenarioKind k);
std::string_view to_string(Weekday d);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s);
std::optional<Weekday> parse_weekday(std::string_view s);

struct Calendar {
  int horizon_days = 150;
  Weekday anchor_weekday = Weekday::Monday;  // weekday of day 0
  double leisure_probability = 0.25;

  bool operator==(const Calendar&) const = default;
};

Weekday weekday_of(const Calendar& c, int day_index);

// Monday..Friday are working days. Throws std::out_of_range outside
// [0, horizon_days).
DayKind day_kind(const Calendar& c, int day_index);

}  // namespace epihumat
