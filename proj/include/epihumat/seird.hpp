#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epihumat/calendar.hpp"
#include "epihumat/geo.hpp"
#include "epihumat/population.hpp"
#include "epihumat/random.hpp"
#include "epihumat/scenario.hpp"
#include "epihumat/social_graph.hpp"

namespace epihumat {

enum class Phase : std::uint8_t {
  Susceptible,
  Exposed,
  InfectiousCommunity,
  Hospitalized,
  Icu,
  Quarantine,
  Recovered,
  Dead,
};

inline constexpr std::size_t kPhaseCount = 8;

std::string_view to_string(Phase p);

// Still mixing with others (and so listed in rosters).
constexpr bool in_community(Phase p) {
  return p == Phase::Susceptible || p == Phase::Exposed || p == Phase::InfectiousCommunity ||
         p == Phase::Recovered;
}

struct ScheduledTransition {
  Phase next = Phase::Susceptible;
  int due_day = 0;
  bool operator==(const ScheduledTransition&) const = default;
};

struct EpidemicState {
  Phase phase = Phase::Susceptible;
  std::optional<ScheduledTransition> scheduled;
  bool asymptomatic = false;
  std::optional<int> infected_on;
  int infectious_since = -1;

  bool operator==(const EpidemicState&) const = default;
};

// Incubation in whole days: lognormal rounded to the nearest day, at least 1.
int sample_incubation(const TransitionTable& t, Rng& rng);

// Susceptible -> Exposed with the Exposed -> InfectiousCommunity transition
// scheduled after the incubation. Asymptomatic cases exist only under
// PreventiveMeasures. Throws std::logic_error if the agent is not Susceptible.
void expose(EpidemicState& s, int day, const TransitionTable& t, ScenarioKind scenario, Rng& rng);

// Puts the agent in `phase` on `day`, drawing the branch out of it where the
// diagram forks and scheduling the next transition.
void enter_phase(EpidemicState& s, Phase phase, int day, const TransitionTable& t, Rng& rng);

bool quarantine_entry_check(const EpidemicState& s, int day, const TransitionTable& t, ScenarioKind scenario,
                            bool accepts);

// Applies a due transition, then the quarantine rules (PreventiveMeasures
// only): enter when quarantine_entry_check holds, leave back to the
// community when the agent stops accepting. Quarantine keeps the outcome
// drawn on becoming infectious.
void step_epidemic(EpidemicState& s, int day, const TransitionTable& t, ScenarioKind scenario, bool accepts,
                   Rng& rng);

enum class Venue : std::uint8_t { Work, College, EssentialCommerce, NonEssentialCommerce, Friends };

Venue venue_of(LocationKind k);

// Per contact-day infection probability for a susceptible agent.
// Lockdown: only meetings between friends who both reject the measures
// transmit. PreventiveMeasures: a rejecting susceptible faces p_se, an
// accepting one p_se_accepting in essential businesses (essential commerce,
// or work for essential workers) and p_se_non_essential elsewhere.
double contact_probability(ScenarioKind scenario, const VirusParams& v, Venue venue, bool susceptible_accepts,
                           bool infectious_accepts, bool susceptible_essential_worker);

struct ContagionContext {
  ScenarioKind scenario = ScenarioKind::NoMeasures;
  const VirusParams* virus = nullptr;
  std::span<const std::vector<AgentId>> rosters;  // per location
  std::span<const Location> locations;
  const SocialGraph* graph = nullptr;
  std::span<const EpidemicState> states;
  std::span<const Alternative> behavior;
  std::span<const std::uint8_t> essential_worker;
  double meet_friend_probability = 1.0;
  std::uint64_t seed = 0;
};

// Every infectious community agent meets each susceptible roster-mate and
// each friend it sees today; every such pair gets one independent draw keyed
// on (seed, day, unordered pair, channel), so the result does not depend on
// iteration order. Returns newly exposed ids, ascending and unique.
std::vector<AgentId> contagion_step(const ContagionContext& ctx, int day);

using PhaseCounts = std::array<std::size_t, kPhaseCount>;
PhaseCounts count_phases(std::span<const EpidemicState> states);

}  // namespace epihumat
