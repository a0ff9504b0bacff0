#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "epihumat/error.hpp"
#include "epihumat/population.hpp"
#include "support.hpp"

using namespace epihumat;
namespace ts = testing_support;

namespace {

const char* kHeader =
    "id,gender,age,family,rural_house,economic_activity,essential_worker,salary_band,census_tract,"
    "supports_measures,hedonic_importance,hedonic_sat_accept,hedonic_sat_reject,belonging_importance,"
    "belonging_sat_accept,belonging_sat_reject\n";

std::string row(const std::string& id, const std::string& gender, int age, const std::string& family,
                const std::string& activity, const std::string& supports, double imp = 0.7, double acc = 0.5,
                double rej = -0.2) {
  std::ostringstream s;
  s << id << "," << gender << "," << age << "," << family << ",no," << activity << ",no,1000_1500,T1,"
    << supports << "," << imp << "," << acc << "," << rej << ",0.5,0.1,-0.1\n";
  return s.str();
}

Survey survey_of(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_survey(in);
}

}  // namespace

TEST(Survey, RowCopiedFieldByField) {
  const auto s = survey_of(row("R1", "woman", 30, "couple_without_children", "employee", "accept"));
  ASSERT_EQ(s.records.size(), 1u);
  const auto& r = s.records[0];
  EXPECT_EQ(r.id, "R1");
  EXPECT_EQ(r.attributes.gender, Gender::Woman);
  EXPECT_EQ(r.attributes.age, 30);
  EXPECT_EQ(r.attributes.family, Family::CoupleWithoutChildren);
  EXPECT_EQ(r.attributes.economic_activity, EconomicActivity::Employee);
  EXPECT_EQ(r.attributes.census_tract, "T1");
  EXPECT_EQ(r.supports, Alternative::Accept);
  ASSERT_EQ(r.needs.size(), 2u);
  EXPECT_DOUBLE_EQ(r.needs.needs[0].importance, 0.7);
  EXPECT_DOUBLE_EQ(r.needs.needs[0].satisfaction_for(Alternative::Accept), 0.5);
  EXPECT_DOUBLE_EQ(r.needs.needs[0].satisfaction_for(Alternative::Reject), -0.2);
  EXPECT_EQ(s.schema.names, (std::vector<std::string>{"hedonic", "belonging"}));
  EXPECT_EQ(s.schema.hedonic, 0u);
  EXPECT_EQ(s.schema.belonging, 1u);
}

TEST(Survey, EmptyFileHasNoAgents) {
  std::istringstream empty("");
  try {
    parse_survey(empty);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no agents"), std::string::npos);
  }
  std::istringstream header_only(kHeader);
  EXPECT_THROW(parse_survey(header_only), ValidationError);
}

TEST(Survey, AgeBelowAdulthoodRejected) {
  EXPECT_THROW(survey_of(row("R1", "man", 17, "other", "employee", "accept")), ValidationError);
  EXPECT_THROW(survey_of(row("R1", "man", 101, "other", "employee", "accept")), ValidationError);
}

TEST(Survey, OutOfRangeNeedsRejected) {
  EXPECT_THROW(survey_of(row("R1", "man", 40, "other", "employee", "accept", 1.2)), ValidationError);
  EXPECT_THROW(survey_of(row("R1", "man", 40, "other", "employee", "accept", 0.5, 1.5)), ValidationError);
}

TEST(Survey, MalformedRowsAreParseErrors) {
  EXPECT_THROW(survey_of("R1,man,40\n"), ParseError);
  EXPECT_THROW(survey_of(row("R1", "robot", 40, "other", "employee", "accept")), ParseError);
  EXPECT_THROW(survey_of(row("R1", "man", 40, "other", "employee", "maybe")), ParseError);
}

TEST(Survey, ShippedCityLoads) {
  const auto s = ingest_real_agents(ts::source_dir() / "data/city/survey.csv");
  EXPECT_EQ(s.records.size(), 1274u);
  EXPECT_EQ(s.schema.names.size(), 4u);
}

TEST(Census, ParsesAndTotals) {
  std::istringstream in("tract,age_band,gender,count\nT1,30-39,woman,5\nT1,30-39,man,7\n");
  const auto c = parse_census(in);
  ASSERT_EQ(c.cells.size(), 2u);
  EXPECT_EQ(c.total(), 12u);
  EXPECT_EQ(c.cells[0].band, (AgeBand{30, 39}));
  EXPECT_EQ(c.cells[1].gender, Gender::Man);
}

TEST(Census, Rejections) {
  std::istringstream bad_header("tract,band,gender,count\n");
  EXPECT_THROW(parse_census(bad_header), ParseError);
  std::istringstream young("tract,age_band,gender,count\nT1,10-20,man,5\n");
  EXPECT_THROW(parse_census(young), ValidationError);
  std::istringstream dup("tract,age_band,gender,count\nT1,30-39,man,5\nT1,30-39,man,5\n");
  EXPECT_THROW(parse_census(dup), ValidationError);
  std::istringstream empty("tract,age_band,gender,count\n");
  EXPECT_THROW(parse_census(empty), ValidationError);
}

TEST(Apportion, LargestRemainder) {
  const std::vector<std::uint64_t> w{1, 1, 1};
  EXPECT_EQ(apportion(w, 10), (std::vector<std::uint64_t>{4, 3, 3}));
  const std::vector<std::uint64_t> w2{5, 3, 2};
  EXPECT_EQ(apportion(w2, 7), (std::vector<std::uint64_t>{4, 2, 1}));  // 3.5, 2.1, 1.4
  EXPECT_EQ(apportion(w2, 0), (std::vector<std::uint64_t>{0, 0, 0}));
}

TEST(Apportion, ExactSumAndWithinOneOfQuota) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> w(1 + rng.index(40));
    for (auto& x : w) x = rng.index(10000);
    w[0] += 1;
    const std::uint64_t total = rng.index(50000);
    const auto a = apportion(w, total);
    const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
    EXPECT_EQ(std::accumulate(a.begin(), a.end(), std::uint64_t{0}), total);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_LT(std::abs(static_cast<double>(a[i]) - static_cast<double>(w[i]) * total / sum_w), 1.0);
    }
  }
}

namespace {

// age < 24 ? (couple_without_children ? reject : young) : adult
const char* kThreeLeafTree = R"({
  "root": {"field": "age", "op": "lt", "value": 24,
    "yes": {"field": "family", "op": "eq", "value": "couple_without_children",
            "yes": {"leaf": "reject", "accept_fraction": 0.2},
            "no": {"leaf": "young", "accept_fraction": 0.7}},
    "no": {"leaf": "adult", "accept_fraction": 0.9}}
})";

}  // namespace

TEST(ProfileTree, YoungCoupleReachesRejectLeaf) {
  const auto tree = parse_profile_tree(kThreeLeafTree);
  AgentAttributes a;
  a.age = 22;
  a.family = Family::CoupleWithoutChildren;
  EXPECT_EQ(tree.classify_profile(a), "reject");
}

TEST(ProfileTree, SingleLeaf) {
  const auto tree = parse_profile_tree(R"({"root": {"leaf": "all", "accept_fraction": 0.5}})");
  AgentAttributes a;
  a.age = 77;
  EXPECT_EQ(tree.classify_profile(a), "all");
  EXPECT_EQ(tree.age_cluster_bounds(), std::vector<int>{kMinAge});
}

TEST(ProfileTree, MatchesManualDescent) {
  const auto tree = parse_profile_tree(kThreeLeafTree);
  struct Case {
    int age;
    Family family;
    const char* expected;
  };
  for (const auto& c : {Case{20, Family::CoupleWithoutChildren, "reject"}, Case{20, Family::OnePerson, "young"},
                        Case{24, Family::CoupleWithoutChildren, "adult"}}) {
    AgentAttributes a;
    a.age = c.age;
    a.family = c.family;
    const std::string manual = a.age < 24 ? (a.family == Family::CoupleWithoutChildren ? "reject" : "young") : "adult";
    EXPECT_EQ(manual, c.expected);
    EXPECT_EQ(tree.classify_profile(a), manual);
  }
  EXPECT_EQ(tree.age_cluster_bounds(), (std::vector<int>{18, 24}));
  EXPECT_EQ(tree.age_cluster(23), 0u);
  EXPECT_EQ(tree.age_cluster(24), 1u);
}

TEST(ProfileTree, InPredicateAndBooleans) {
  const auto tree = parse_profile_tree(R"({"root": {"field": "essential_worker", "op": "eq", "value": true,
    "yes": {"leaf": "ess", "accept_fraction": 1},
    "no": {"field": "economic_activity", "op": "in", "value": ["unemployed", "retired"],
           "yes": {"leaf": "idle", "accept_fraction": 0.5}, "no": {"leaf": "rest", "accept_fraction": 0.5}}}})");
  AgentAttributes a;
  a.essential_worker = true;
  EXPECT_EQ(tree.classify_profile(a), "ess");
  a.essential_worker = false;
  a.economic_activity = EconomicActivity::Retired;
  EXPECT_EQ(tree.classify_profile(a), "idle");
  a.economic_activity = EconomicActivity::Executive;
  EXPECT_EQ(tree.classify_profile(a), "rest");
}

TEST(ProfileTree, Rejections) {
  EXPECT_THROW(parse_profile_tree("{"), ParseError);
  EXPECT_THROW(parse_profile_tree(R"({"root": {"leaf": "a"}})"), ParseError);
  EXPECT_THROW(parse_profile_tree(R"({"root": {"leaf": "a", "accept_fraction": 2}})"), ValidationError);
  EXPECT_THROW(parse_profile_tree(R"({"root": {"field": "age", "op": "eq", "value": 3,
      "yes": {"leaf": "a", "accept_fraction": 0}, "no": {"leaf": "b", "accept_fraction": 0}}})"),
               ParseError);
  EXPECT_THROW(parse_profile_tree(R"({"root": {"field": "age", "op": "lt", "value": 30,
      "yes": {"leaf": "a", "accept_fraction": 0}, "no": {"leaf": "a", "accept_fraction": 0}}})"),
               ParseError);
}

TEST(ProfileTree, BindRequiresMembersInEveryLeaf) {
  auto tree = parse_profile_tree(kThreeLeafTree);
  const auto s = survey_of(row("R1", "man", 40, "other", "employee", "accept"));
  EXPECT_THROW(tree.bind_members(s), ValidationError);
}

TEST(Synthesis, SingleCellMarginal) {
  const auto s = survey_of(row("R1", "woman", 35, "other", "employee", "accept") +
                           row("R2", "man", 70, "other", "retired", "reject"));
  auto tree = parse_profile_tree(R"({"root": {"leaf": "all", "accept_fraction": 0.5}})");
  tree.bind_members(s);
  std::istringstream in("tract,age_band,gender,count\nT9,30-39,woman,400\n");
  const auto census = parse_census(in);
  Rng rng(1);
  SynthesisStats stats;
  const auto pop = synthesize_population(census, s, tree, 12, rng, &stats);
  ASSERT_EQ(pop.size(), 12u);
  EXPECT_EQ(stats.real, 2u);
  EXPECT_EQ(stats.simulated, 10u);
  for (const auto& a : pop.agents) {
    if (a.origin != Origin::Simulated) continue;
    EXPECT_EQ(a.attributes.gender, Gender::Woman);
    EXPECT_GE(a.attributes.age, 30);
    EXPECT_LE(a.attributes.age, 39);
    EXPECT_EQ(a.attributes.census_tract, "T9");
  }
}

TEST(Synthesis, RealAgentsCopiedVerbatim) {
  const auto s = survey_of(row("R1", "woman", 35, "other", "employee", "accept") +
                           row("R2", "man", 70, "other", "retired", "reject"));
  auto tree = parse_profile_tree(R"({"root": {"leaf": "all", "accept_fraction": 0.5}})");
  tree.bind_members(s);
  std::istringstream in("tract,age_band,gender,count\nT9,30-39,woman,400\n");
  Rng rng(1);
  const auto pop = synthesize_population(parse_census(in), s, tree, 5, rng);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(pop.agents[i].origin, Origin::Real);
    EXPECT_EQ(pop.agents[i].attributes, s.records[i].attributes);
    EXPECT_EQ(pop.agents[i].needs, s.records[i].needs);
    EXPECT_EQ(pop.agents[i].initial_behavior, s.records[i].supports);
  }
  Rng rng2(1);
  std::istringstream in2("tract,age_band,gender,count\nT9,30-39,woman,400\n");
  EXPECT_THROW(synthesize_population(parse_census(in2), s, tree, 1, rng2), ValidationError);
}

TEST(Synthesis, DonorSideFollowsLeafAcceptFraction) {
  // Two leaves; every simulated agent lands in "adult" (accept_fraction 0.8),
  // which has both accepting and rejecting members.
  std::string body;
  for (int i = 0; i < 10; ++i) {
    body += row("A" + std::to_string(i), i % 2 ? "man" : "woman", 40 + i, "other", "employee",
                i < 6 ? "accept" : "reject", 0.1 * i, 0.05 * i, -0.05 * i);
  }
  body += row("Y1", "woman", 20, "other", "college_student", "accept");
  const auto s = survey_of(body);
  auto tree = parse_profile_tree(R"({"root": {"field": "age", "op": "lt", "value": 25,
      "yes": {"leaf": "young", "accept_fraction": 0.5}, "no": {"leaf": "adult", "accept_fraction": 0.8}}})");
  tree.bind_members(s);
  std::istringstream in("tract,age_band,gender,count\nT1,40-60,woman,50\nT1,40-60,man,50\n");
  const auto census = parse_census(in);

  double total_accepting = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto pop = synthesize_population(census, s, tree, s.records.size() + 1000, rng);
    int accepting = 0;
    for (const auto& a : pop.agents) {
      if (a.origin != Origin::Simulated) continue;
      ASSERT_EQ(tree.leaves()[a.profile_leaf].profile_id, "adult");
      if (s.records[a.donor].supports == Alternative::Accept) ++accepting;
    }
    total_accepting += accepting;
  }
  EXPECT_NEAR(total_accepting / 30.0, 800.0, 40.0);
}

TEST(Synthesis, SimulatedNeedsComeFromDonorInSameLeaf) {
  const auto survey = ingest_real_agents(ts::mini_dir() / "survey.csv");
  auto tree = load_profile_tree(ts::mini_dir() / "profile_tree.json");
  tree.bind_members(survey);
  const auto census = load_census(ts::mini_dir() / "census.csv");
  Rng rng(99);
  const auto pop = synthesize_population(census, survey, tree, 1000, rng);
  ASSERT_EQ(pop.size(), 1000u);
  for (const auto& a : pop.agents) {
    if (a.origin != Origin::Simulated) continue;
    EXPECT_EQ(a.needs, survey.records[a.donor].needs);
    EXPECT_EQ(tree.classify(survey.records[a.donor].attributes), a.profile_leaf);
    EXPECT_EQ(tree.classify(a.attributes), a.profile_leaf);
  }
}

TEST(Synthesis, CityTargetSize) {
  const auto survey = ingest_real_agents(ts::source_dir() / "data/city/survey.csv");
  auto tree = load_profile_tree(ts::source_dir() / "data/city/profile_tree.json");
  tree.bind_members(survey);
  const auto census = load_census(ts::source_dir() / "data/city/census.csv");
  Rng rng(1);
  const auto pop = synthesize_population(census, survey, tree, 11646, rng);
  EXPECT_EQ(pop.size(), 11646u);
}
