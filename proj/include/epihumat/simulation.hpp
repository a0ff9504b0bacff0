#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "epihumat/geo.hpp"
#include "epihumat/humat.hpp"
#include "epihumat/population.hpp"
#include "epihumat/scenario.hpp"
#include "epihumat/seird.hpp"
#include "epihumat/social_graph.hpp"

namespace epihumat {

// Input files, parsed once and shared read-only by every replicate.
struct WorldInputs {
  Survey survey;
  CensusMarginals census;
  ProfileTree tree;
  TractGrid grid;
};

std::shared_ptr<const WorldInputs> load_inputs(const ScenarioConfig& config);

struct DailyMetrics {
  int day = 0;
  PhaseCounts counts{};
  std::size_t new_infections = 0;
  std::size_t communications = 0;
  double acceptance_level = 0.0;  // share of living agents choosing Accept

  std::size_t population() const;
  bool operator==(const DailyMetrics&) const = default;
};

struct World {
  ScenarioConfig config;
  TransitionTable table;
  std::shared_ptr<const WorldInputs> inputs;
  std::uint64_t seed = 0;
  int day = 0;

  Population population;
  SynthesisStats synthesis;
  std::vector<AgentPlacement> placements;
  SocialGraph graph;
  FriendStats friend_stats;
  std::vector<int> ages;
  std::vector<std::uint8_t> essential_worker;
  std::vector<std::uint8_t> alive;
  std::vector<NeedProfile> needs;
  std::vector<Alternative> behavior;
  std::vector<EpidemicState> states;
  std::vector<CriticalNodeState> critical_nodes;  // parallel to config.critical_nodes
  std::vector<AgentId> humat_order;

  Rng movement_rng{0};
  Rng humat_rng{0};
  Rng critical_rng{0};
  Rng epidemic_rng{0};
  Rng repair_rng{0};
  std::uint64_t contagion_seed = 0;
  std::size_t dead_recorded = 0;  // dead count of the last completed day

  std::size_t size() const { return states.size(); }
};

// Builds a world from one seed. Every random step draws from its own
// sub-stream of `seed` (see Stream).
World init_world(const ScenarioConfig& config, std::shared_ptr<const WorldInputs> inputs, std::uint64_t seed);

// Movement, HUMAT (critical broadcasts first), epidemic stepping, contagion,
// network repair; then advances the day. Throws std::logic_error if the
// state counts stop summing to the population or the dead count drops.
DailyMetrics run_day(World& world);

DailyMetrics snapshot(const World& world, std::size_t new_infections, std::size_t communications);

std::vector<DailyMetrics> run_replicate(const ScenarioConfig& config, std::shared_ptr<const WorldInputs> inputs,
                                        std::uint64_t seed);

struct MeanMetrics {
  int day = 0;
  std::array<double, kPhaseCount> counts{};
  double new_infections = 0.0;
  double communications = 0.0;
  double acceptance_level = 0.0;
};

struct RunResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<DailyMetrics>> replicates;
  std::vector<MeanMetrics> mean;
};

std::vector<MeanMetrics> mean_series(const std::vector<std::vector<DailyMetrics>>& replicates);

// Replicate i uses seed config.rng_seed + i. With threads > 1 replicates run
// concurrently; results do not depend on the thread count. A failing
// replicate aborts the run with a std::runtime_error naming its seed.
RunResult run_replicates(const ScenarioConfig& config, int n, unsigned threads = 1,
                         std::shared_ptr<const WorldInputs> inputs = nullptr);

// Summary figures of one series.
struct SeriesSummary {
  double peak_prevalence = 0.0;  // max over days of I + H + ICU + Q
  int peak_day = 0;
  double final_removed = 0.0;    // R + D on the last day
  double cumulative_infections = 0.0;
  double mean_acceptance = 0.0;
  double total_communications = 0.0;
};

SeriesSummary summarize(const std::vector<MeanMetrics>& series, double initial_infected = 0.0);
std::vector<MeanMetrics> as_mean(const std::vector<DailyMetrics>& series);

}  // namespace epihumat
