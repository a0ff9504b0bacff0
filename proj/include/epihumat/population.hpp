#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epihumat/random.hpp"

namespace epihumat {

using AgentId = std::uint32_t;

enum class Gender : std::uint8_t { Man, Woman };

enum class Family : std::uint8_t {
  OnePerson,
  SingleParent,
  SingleParentExtended,
  CoupleWithChildren,
  CoupleWithChildrenExtended,
  CoupleWithoutChildren,
  Other,
};

enum class EconomicActivity : std::uint8_t {
  Employee,
  Unemployed,
  Autonomous,
  CivilServant,
  Executive,
  CollegeStudent,
  Retired,
};

enum class SalaryBand : std::uint8_t {
  NoIncome,
  Below1000,
  From1000To1500,
  From1501To3000,
  From3001To4500,
  From4501To6000,
  Above6000,
};

std::string_view to_string(Gender g);
std::string_view to_string(Family f);
std::string_view to_string(EconomicActivity a);
std::string_view to_string(SalaryBand s);

std::optional<Gender> parse_gender(std::string_view s);
std::optional<Family> parse_family(std::string_view s);
std::optional<EconomicActivity> parse_economic_activity(std::string_view s);
std::optional<SalaryBand> parse_salary_band(std::string_view s);

// Paid work outside the home (employee, autonomous, civil servant, executive).
bool is_worker(EconomicActivity a);

inline constexpr int kMinAge = 18;
inline constexpr int kMaxAge = 100;

struct AgentAttributes {
  Gender gender = Gender::Woman;
  int age = kMinAge;
  Family family = Family::OnePerson;
  bool rural_house = false;
  EconomicActivity economic_activity = EconomicActivity::Employee;
  bool essential_worker = false;
  SalaryBand salary_band = SalaryBand::NoIncome;
  std::string census_tract;

  bool operator==(const AgentAttributes&) const = default;
};

// The two behavioural alternatives an agent weighs.
enum class Alternative : std::uint8_t { Accept = 0, Reject = 1 };

constexpr Alternative opposite(Alternative a) {
  return a == Alternative::Accept ? Alternative::Reject : Alternative::Accept;
}

struct Need {
  double importance = 0.0;
  // Indexed by Alternative.
  std::array<double, 2> satisfaction{0.0, 0.0};

  double satisfaction_for(Alternative b) const { return satisfaction[static_cast<std::size_t>(b)]; }
  double& satisfaction_for(Alternative b) { return satisfaction[static_cast<std::size_t>(b)]; }

  bool operator==(const Need&) const = default;
};

// Per-need importance and per-alternative satisfaction. Need order and names
// are shared by the whole population (see NeedSchema).
struct NeedProfile {
  std::vector<Need> needs;
  std::size_t hedonic = 0;
  std::size_t belonging = 1;

  std::size_t size() const { return needs.size(); }
  bool operator==(const NeedProfile&) const = default;
};

// Throws ValidationError when importance/satisfaction ranges, need count or
// the hedonic/belonging indices are invalid.
void validate(const NeedProfile& profile);

struct NeedSchema {
  std::vector<std::string> names;
  std::size_t hedonic = 0;
  std::size_t belonging = 1;

  bool operator==(const NeedSchema&) const = default;
};

// One survey respondent.
struct SurveyRecord {
  std::string id;
  AgentAttributes attributes;
  Alternative supports = Alternative::Accept;
  NeedProfile needs;
};

struct Survey {
  NeedSchema schema;
  std::vector<SurveyRecord> records;
};

Survey parse_survey(std::istream& in, std::string_view source = "<survey>");
Survey ingest_real_agents(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Census marginals

struct AgeBand {
  int lo = kMinAge;
  int hi = kMaxAge;  // inclusive
  bool operator==(const AgeBand&) const = default;
};

struct CensusCell {
  std::string tract;
  AgeBand band;
  Gender gender = Gender::Woman;
  std::uint64_t count = 0;
};

struct CensusMarginals {
  std::vector<CensusCell> cells;
  std::uint64_t total() const;
};

CensusMarginals parse_census(std::istream& in, std::string_view source = "<census>");
CensusMarginals load_census(const std::filesystem::path& path);

// Largest-remainder apportionment of `total` across `weights`. Ties on the
// remainder go to the lower index. Result sums to `total` exactly.
std::vector<std::uint64_t> apportion(std::span<const std::uint64_t> weights, std::uint64_t total);

// ---------------------------------------------------------------------------
// Citizen-profile tree

enum class Field : std::uint8_t {
  Age,
  Gender,
  Family,
  RuralHouse,
  EconomicActivity,
  EssentialWorker,
  SalaryBand,
};

enum class Op : std::uint8_t { Lt, Le, Gt, Ge, Eq, In };

struct Predicate {
  Field field = Field::Age;
  Op op = Op::Lt;
  double number = 0.0;                  // Age comparisons
  std::vector<std::uint8_t> categories;  // Eq/In on enum or bool fields

  bool test(const AgentAttributes& a) const;
};

struct ProfileLeaf {
  std::string profile_id;
  double accept_fraction = 0.0;
  std::vector<std::size_t> members;  // indices into the survey records
};

class ProfileTree {
 public:
  struct Node {
    std::optional<Predicate> predicate;  // empty for leaves
    std::size_t yes = 0;
    std::size_t no = 0;
    std::size_t leaf = 0;  // valid when predicate is empty
  };

  ProfileTree() = default;
  ProfileTree(std::vector<Node> nodes, std::vector<ProfileLeaf> leaves);

  // Leaf index reached by predicate descent.
  std::size_t classify(const AgentAttributes& a) const;
  const std::string& classify_profile(const AgentAttributes& a) const {
    return leaves_[classify(a)].profile_id;
  }

  const std::vector<ProfileLeaf>& leaves() const { return leaves_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  // Lower bounds of the age clusters induced by the tree's age splits,
  // always starting with kMinAge.
  const std::vector<int>& age_cluster_bounds() const { return age_bounds_; }
  std::size_t age_cluster(int age) const;

  // Fills each leaf's member list by classifying the survey respondents.
  // Throws ValidationError when a leaf ends up with no member.
  void bind_members(const Survey& survey);

 private:
  std::vector<int> compute_age_bounds() const;

  std::vector<Node> nodes_;
  std::vector<ProfileLeaf> leaves_;
  std::vector<int> age_bounds_{kMinAge};
};

ProfileTree parse_profile_tree(std::string_view json_text, std::string_view source = "<tree>");
ProfileTree load_profile_tree(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Population

enum class Origin : std::uint8_t { Real, Simulated };

struct Agent {
  AgentAttributes attributes;
  NeedProfile needs;
  Alternative initial_behavior = Alternative::Accept;
  Origin origin = Origin::Real;
  std::size_t profile_leaf = 0;
  std::size_t donor = 0;  // survey record the needs were copied from
};

struct Population {
  NeedSchema schema;
  std::vector<Agent> agents;
  std::size_t size() const { return agents.size(); }
};

struct SynthesisStats {
  std::size_t real = 0;
  std::size_t simulated = 0;
  std::size_t conditional_fallbacks = 0;  // (gender, cluster) cell empty in the survey
  std::size_t donor_fallbacks = 0;        // leaf stratum empty, other stratum used
};

// Real agents are copied verbatim; (target_size - real) simulated agents are
// apportioned over the census cells, completed from the survey conditional on
// (gender, age cluster), and given the needs of a donor from their leaf.
Population synthesize_population(const CensusMarginals& census, const Survey& survey,
                                 const ProfileTree& tree, std::size_t target_size, Rng& rng,
                                 SynthesisStats* stats = nullptr);

}  // namespace epihumat
