#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "epihumat/calendar.hpp"
#include "epihumat/humat.hpp"
#include "epihumat/social_graph.hpp"

namespace epihumat {

inline constexpr int kScenarioSchemaVersion = 1;

struct VirusParams {
  double p_se = 0.07;
  double p_se_quarantine_scenario = 0.05;
  double p_se_accepting = 0.02;
  double p_se_non_essential = 0.04;
  double p_id = 0.005;
  double p_ih = 0.07;
  double p_hd = 0.005;
  double p_hicu = 0.08;
  double p_icud = 0.31;
  int days_ih = 5;
  int days_id = 10;
  int days_ir = 10;
  int days_hicu = 3;
  int days_hd = 10;
  int days_hr = 10;
  int days_icud = 7;
  int days_icur = 7;
  double incubation_mu = 1.621;
  double incubation_sigma = 0.418;
  int days_rs = 180;
  int quarantine_delay_days = 3;
  double asymptomatic_fraction = 0.4;

  bool operator==(const VirusParams&) const = default;
};

// One issue per violated invariant, each naming the field.
std::vector<std::string> validate(const VirusParams& v);

// Three-way branch out of a state: die, move one step deeper (hospital or
// ICU), or recover, each with the number of days until it happens.
struct Branch {
  double dead = 0.0;
  double escalate = 0.0;
  double recover = 1.0;
  int days_dead = 1;
  int days_escalate = 1;
  int days_recover = 1;
};

struct TransitionTable {
  Branch infectious;    // -> dead | hospitalized | recovered
  Branch hospitalized;  // -> dead | ICU | recovered
  Branch icu;           // -> dead | recovered
  double incubation_mu = 0.0;
  double incubation_sigma = 0.0;
  int days_rs = 1;
  int quarantine_delay_days = 0;
  double asymptomatic_fraction = 0.0;
};

TransitionTable derive_transition_table(const VirusParams& v);

struct PopulationSource {
  std::filesystem::path survey;
  std::filesystem::path census;
  std::filesystem::path profile_tree;
  std::filesystem::path tract_map;
  std::size_t target_size = 0;

  bool operator==(const PopulationSource&) const = default;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::NoMeasures;
  VirusParams virus;
  Calendar calendar;
  NetworkParams network;
  HumatParams humat;
  std::vector<CriticalNode> critical_nodes;
  std::vector<CriticalNodePlan> communication_plans;
  PopulationSource population;
  double initial_infected_fraction = 0.0;
  int replicates = 1;
  std::uint64_t rng_seed = 0;

  bool operator==(const ScenarioConfig&) const = default;
};

std::vector<std::string> validate(const ScenarioConfig& c);

// Relative population paths resolve against base_dir. Throws ParseError on
// malformed JSON and ValidationError listing every problem found.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir,
                              std::string_view source = "<scenario>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Canonical JSON with every field spelled out and absolute paths, so that
// parsing the result gives back an equal config.
std::string serialize(const ScenarioConfig& c);

}  // namespace epihumat
