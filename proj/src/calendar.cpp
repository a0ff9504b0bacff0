#include "epihumat/calendar.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace epihumat {

namespace {
constexpr std::array<std::string_view, 3> kScenarioNames{"NoMeasures", "Lockdown", "PreventiveMeasures"};
constexpr std::array<std::string_view, 7> kWeekdayNames{"Monday", "Tuesday",  "Wednesday", "Thursday",
                                                        "Friday", "Saturday", "Sunday"};
}  // namespace

std::string_view to_string(ScenarioKind k) { return kScenarioNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Weekday d) { return kWeekdayNames[static_cast<std::size_t>(d)]; }

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
  for (std::size_t i = 0; i < kScenarioNames.size(); ++i) {
    if (kScenarioNames[i] == s) return static_cast<ScenarioKind>(i);
  }
  return std::nullopt;
}

std::optional<Weekday> parse_weekday(std::string_view s) {
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
    if (kWeekdayNames[i] == s) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

Weekday weekday_of(const Calendar& c, int day_index) {
  return static_cast<Weekday>((static_cast<int>(c.anchor_weekday) + day_index) % 7);
}

DayKind day_kind(const Calendar& c, int day_index) {
  if (day_index < 0 || day_index >= c.horizon_days) {
    throw std::out_of_range("day " + std::to_string(day_index) + " outside horizon of " +
                            std::to_string(c.horizon_days) + " days");
  }
  const auto wd = weekday_of(c, day_index);
  return wd == Weekday::Saturday || wd == Weekday::Sunday ? DayKind::NonWorking : DayKind::Working;
}

}  // namespace epihumat
