#include <gtest/gtest.h>

#include <algorithm>
#include <stdexcept>

#include "epihumat/calendar.hpp"
#include "epihumat/error.hpp"
#include "epihumat/scenario.hpp"
#include "support.hpp"

using namespace epihumat;
namespace ts = testing_support;

namespace {

bool mentions(const ValidationError& e, const std::string& needle) {
  return std::any_of(e.issues().begin(), e.issues().end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

ValidationError validation_error_of(const std::string& text) {
  try {
    parse_scenario(text, ts::mini_dir());
  } catch (const ValidationError& e) {
    return e;
  }
  throw std::runtime_error("no ValidationError");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos == std::string::npos) throw std::runtime_error("pattern not found: " + from);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Calendar, WorkingDays) {
  Calendar c;
  c.anchor_weekday = Weekday::Monday;
  EXPECT_EQ(day_kind(c, 0), DayKind::Working);
  EXPECT_EQ(day_kind(c, 4), DayKind::Working);
  EXPECT_EQ(day_kind(c, 5), DayKind::NonWorking);
  EXPECT_EQ(day_kind(c, 6), DayKind::NonWorking);
  EXPECT_EQ(day_kind(c, 7), DayKind::Working);
  c.anchor_weekday = Weekday::Saturday;
  EXPECT_EQ(day_kind(c, 0), DayKind::NonWorking);
  EXPECT_EQ(day_kind(c, 2), DayKind::Working);
  EXPECT_EQ(weekday_of(c, 2), Weekday::Monday);
}

TEST(Calendar, OutsideHorizonThrows) {
  Calendar c;
  c.horizon_days = 10;
  EXPECT_THROW(day_kind(c, 10), std::out_of_range);
  EXPECT_THROW(day_kind(c, -1), std::out_of_range);
}

TEST(Calendar, NamesRoundTrip) {
  for (auto k : {ScenarioKind::NoMeasures, ScenarioKind::Lockdown, ScenarioKind::PreventiveMeasures}) {
    EXPECT_EQ(parse_scenario_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_weekday("Sunday"), Weekday::Sunday);
  EXPECT_FALSE(parse_weekday("Funday"));
  EXPECT_FALSE(parse_scenario_kind("lockdown-ish"));
}

TEST(TransitionTable, ResidualBranches) {
  VirusParams v;
  const auto t = derive_transition_table(v);
  EXPECT_DOUBLE_EQ(t.infectious.recover, 0.925);
  EXPECT_DOUBLE_EQ(t.hospitalized.recover, 1.0 - (0.005 + 0.08));
  EXPECT_DOUBLE_EQ(t.icu.recover, 0.69);
  EXPECT_EQ(t.hospitalized.days_escalate, 3);
  v.p_hd = 0.0;
  v.p_hicu = 0.0;
  EXPECT_DOUBLE_EQ(derive_transition_table(v).hospitalized.recover, 1.0);
}

TEST(VirusParams, DefaultsMatchPublishedTable) {
  const VirusParams v;
  EXPECT_EQ(v.p_se, 0.07);
  EXPECT_EQ(v.p_id, 0.005);
  EXPECT_EQ(v.p_ih, 0.07);
  EXPECT_EQ(v.p_hd, 0.005);
  EXPECT_EQ(v.p_hicu, 0.08);
  EXPECT_EQ(v.p_icud, 0.31);
  EXPECT_EQ(v.incubation_mu, 1.621);
  EXPECT_EQ(v.incubation_sigma, 0.418);
  EXPECT_EQ(v.days_ih, 5);
  EXPECT_EQ(v.days_id, 10);
  EXPECT_EQ(v.days_ir, 10);
  EXPECT_EQ(v.days_hicu, 3);
  EXPECT_EQ(v.days_hd, 10);
  EXPECT_EQ(v.days_hr, 10);
  EXPECT_EQ(v.days_icud, 7);
  EXPECT_EQ(v.days_icur, 7);
  EXPECT_TRUE(validate(v).empty());
}

TEST(Presets, ScenarioOneAndTwo) {
  const auto s1 = load_scenario(ts::presets_dir() / "scenario1.json");
  EXPECT_EQ(s1.kind, ScenarioKind::NoMeasures);
  EXPECT_EQ(s1.virus.p_se, 0.07);
  EXPECT_EQ(s1.population.target_size, 11646u);
  EXPECT_EQ(s1.calendar.horizon_days, 150);
  const auto s2 = load_scenario(ts::presets_dir() / "scenario2.json");
  EXPECT_EQ(s2.kind, ScenarioKind::Lockdown);
  EXPECT_EQ(s2.virus.p_se, 0.05);
}

TEST(Presets, AllLoadAndPointAtExistingFiles) {
  for (const char* name : {"scenario1.json", "scenario2.json", "scenario3.json", "scenario3a.json", "scenario3b.json"}) {
    SCOPED_TRACE(name);
    const auto c = load_scenario(ts::presets_dir() / name);
    EXPECT_TRUE(std::filesystem::exists(c.population.survey));
    EXPECT_TRUE(std::filesystem::exists(c.population.tract_map));
    EXPECT_TRUE(c.population.survey.is_absolute());
  }
  const auto a = load_scenario(ts::presets_dir() / "scenario3a.json");
  ASSERT_EQ(a.communication_plans.size(), 1u);
  EXPECT_EQ(a.communication_plans[0].frequency_days, 5);
  EXPECT_EQ(a.communication_plans[0].orientation, Orientation::ProMeasures);
  const auto b = load_scenario(ts::presets_dir() / "scenario3b.json");
  ASSERT_EQ(b.communication_plans.size(), 2u);
  EXPECT_EQ(b.communication_plans[1].orientation, Orientation::AntiMeasures);
}

TEST(ScenarioParse, RoundTripThroughSerialize) {
  for (const char* name : {"scenario1.json", "scenario3b.json"}) {
    const auto c = load_scenario(ts::presets_dir() / name);
    const auto text = serialize(c);
    const auto back = parse_scenario(text, "/");
    EXPECT_EQ(back, c) << name;
    EXPECT_EQ(serialize(back), text);
  }
}

TEST(ScenarioParse, ProbabilityOutOfRangeNamesField) {
  const auto e = validation_error_of(replace(ts::mini_scenario_json(), R"("p_se": 0.07)", R"("p_se": 0.07, "p_id": 1.2)"));
  EXPECT_TRUE(mentions(e, "p_id out of [0,1]"));
  const auto e2 =
      validation_error_of(replace(ts::mini_scenario_json(), R"("p_se": 0.07)", R"("p_se": 0.07, "p_icud": 1.5)"));
  EXPECT_TRUE(mentions(e2, "p_icud out of [0,1]"));
}

TEST(ScenarioParse, MissingVirusSection) {
  const auto text = replace(ts::mini_scenario_json(), R"("network": {"meet_friend_probability": 0.5},
  "virus": {"p_se": 0.07, "days_rs": 180})",
                            R"("network": {"meet_friend_probability": 0.5})");
  EXPECT_TRUE(mentions(validation_error_of(text), "missing required section 'virus'"));
}

TEST(ScenarioParse, ReportsEveryProblem) {
  auto text = replace(ts::mini_scenario_json(), R"("p_se": 0.07)", R"("p_se": -1, "p_hd": 3)");
  text = replace(text, R"("horizon_days": 20)", R"("horizon_days": 20, "colour": "red")");
  const auto e = validation_error_of(text);
  EXPECT_TRUE(mentions(e, "unknown key 'calendar.colour'"));
  // type/shape problems are reported before range checks
  EXPECT_GE(e.issues().size(), 1u);
  const auto e2 = validation_error_of(replace(ts::mini_scenario_json(), R"("p_se": 0.07)", R"("p_se": -1, "p_hd": 3)"));
  EXPECT_TRUE(mentions(e2, "virus.p_se out of [0,1]"));
  EXPECT_TRUE(mentions(e2, "virus.p_hd out of [0,1]"));
}

TEST(ScenarioParse, KindSpecificRequiredFields) {
  auto lockdown = replace(ts::mini_scenario_json("Lockdown"), R"(, "p_se_quarantine_scenario": 0.05)", "");
  EXPECT_TRUE(mentions(validation_error_of(lockdown), "virus.p_se_quarantine_scenario"));
  auto prev = replace(ts::mini_scenario_json("PreventiveMeasures"), R"(, "quarantine_delay_days": 3,)", ",");
  EXPECT_TRUE(mentions(validation_error_of(prev), "virus.quarantine_delay_days"));
  EXPECT_NO_THROW(ts::mini_config("PreventiveMeasures"));
}

TEST(ScenarioParse, BadKindAndPlans) {
  EXPECT_TRUE(mentions(validation_error_of(replace(ts::mini_scenario_json(), "NoMeasures", "Curfew")),
                       "scenario_kind 'Curfew'"));
  const std::string plans = R"(, "critical_nodes": [{"id": "council", "network_size": 10}],
    "communication_plans": [{"node": "mayor", "orientation": "pro_measures", "start_day": 0, "end_day": 10,
                             "frequency_days": 0, "reach": 0.5}])";
  const auto e = validation_error_of(ts::mini_scenario_json("NoMeasures", 400, 20, plans));
  EXPECT_TRUE(mentions(e, "mayor"));
  EXPECT_TRUE(mentions(e, "frequency_days must be >= 1"));
}

TEST(ScenarioParse, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_scenario("{", "/"), ParseError);
  EXPECT_THROW(parse_scenario("[1,2]", "/"), ParseError);
}

TEST(ScenarioParse, SchemaVersionChecked) {
  const auto e = validation_error_of(replace(ts::mini_scenario_json(), R"("schema_version": 1)", R"("schema_version": 9)"));
  EXPECT_TRUE(mentions(e, "schema_version"));
}

TEST(ScenarioParse, RelativePathsResolveAgainstFile) {
  const auto c = load_scenario(ts::presets_dir() / "scenario1.json");
  EXPECT_EQ(c.population.census, (ts::source_dir() / "data/city/census.csv").lexically_normal());
}

TEST(ScenarioParse, MissingFileIsFileError) {
  EXPECT_THROW(load_scenario("/nonexistent/dir/x.json"), FileError);
}
