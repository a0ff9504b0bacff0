#include "epihumat/seird.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace epihumat {

namespace {

constexpr std::array<std::string_view, kPhaseCount> kPhaseNames{
    "susceptible", "exposed", "infectious", "hospitalized", "icu", "quarantine", "recovered", "dead"};

// Contagion draw channels; locations use kLocationChannel + index.
constexpr std::uint64_t kFriendInfection = 0;
constexpr std::uint64_t kFriendMeeting = 1;
constexpr std::uint64_t kLocationChannel = 2;

void schedule_branch(EpidemicState& s, const Branch& b, Phase escalate_to, int day, Rng& rng) {
  const double u = rng.uniform();
  if (u < b.dead) {
    s.scheduled = ScheduledTransition{Phase::Dead, day + b.days_dead};
  } else if (u < b.dead + b.escalate) {
    s.scheduled = ScheduledTransition{escalate_to, day + b.days_escalate};
  } else {
    s.scheduled = ScheduledTransition{Phase::Recovered, day + b.days_recover};
  }
}

}  // namespace

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

int sample_incubation(const TransitionTable& t, Rng& rng) {
  const double days = rng.lognormal(t.incubation_mu, t.incubation_sigma);
  return std::max(1, static_cast<int>(std::lround(days)));
}

void expose(EpidemicState& s, int day, const TransitionTable& t, ScenarioKind scenario, Rng& rng) {
  if (s.phase != Phase::Susceptible) {
    throw std::logic_error("expose: agent is " + std::string(to_string(s.phase)) + ", not susceptible");
  }
  s.phase = Phase::Exposed;
  s.infected_on = day;
  s.infectious_since = -1;
  s.scheduled = ScheduledTransition{Phase::InfectiousCommunity, day + sample_incubation(t, rng)};
  s.asymptomatic = scenario == ScenarioKind::PreventiveMeasures && rng.bernoulli(t.asymptomatic_fraction);
}

void enter_phase(EpidemicState& s, Phase phase, int day, const TransitionTable& t, Rng& rng) {
  s.phase = phase;
  switch (phase) {
    case Phase::InfectiousCommunity:
      s.infectious_since = day;
      schedule_branch(s, t.infectious, Phase::Hospitalized, day, rng);
      break;
    case Phase::Hospitalized:
      schedule_branch(s, t.hospitalized, Phase::Icu, day, rng);
      break;
    case Phase::Icu:
      schedule_branch(s, t.icu, Phase::Dead, day, rng);
      break;
    case Phase::Recovered:
      s.scheduled = ScheduledTransition{Phase::Susceptible, day + t.days_rs};
      break;
    case Phase::Susceptible:
      s.scheduled.reset();
      s.asymptomatic = false;
      s.infected_on.reset();
      s.infectious_since = -1;
      break;
    case Phase::Dead:
      s.scheduled.reset();
      break;
    case Phase::Exposed:
    case Phase::Quarantine:
      break;
  }
}

bool quarantine_entry_check(const EpidemicState& s, int day, const TransitionTable& t, ScenarioKind scenario,
                            bool accepts) {
  return scenario == ScenarioKind::PreventiveMeasures && s.phase == Phase::InfectiousCommunity && !s.asymptomatic &&
         accepts && s.infectious_since >= 0 && day - s.infectious_since >= t.quarantine_delay_days;
}

void step_epidemic(EpidemicState& s, int day, const TransitionTable& t, ScenarioKind scenario, bool accepts,
                   Rng& rng) {
  if (s.phase == Phase::Dead) return;
  if (s.scheduled && s.scheduled->due_day <= day) enter_phase(s, s.scheduled->next, day, t, rng);
  if (scenario != ScenarioKind::PreventiveMeasures) return;
  if (s.phase == Phase::Quarantine && !accepts) {
    s.phase = Phase::InfectiousCommunity;
  } else if (quarantine_entry_check(s, day, t, scenario, accepts)) {
    s.phase = Phase::Quarantine;
  }
}

Venue venue_of(LocationKind k) {
  switch (k) {
    case LocationKind::Work:
      return Venue::Work;
    case LocationKind::College:
      return Venue::College;
    case LocationKind::EssentialCommerce:
      return Venue::EssentialCommerce;
    case LocationKind::NonEssentialCommerce:
      return Venue::NonEssentialCommerce;
  }
  return Venue::Work;
}

double contact_probability(ScenarioKind scenario, const VirusParams& v, Venue venue, bool susceptible_accepts,
                           bool infectious_accepts, bool susceptible_essential_worker) {
  switch (scenario) {
    case ScenarioKind::NoMeasures:
      return v.p_se;
    case ScenarioKind::Lockdown:
      if (venue == Venue::Friends && !susceptible_accepts && !infectious_accepts) return v.p_se_quarantine_scenario;
      return 0.0;
    case ScenarioKind::PreventiveMeasures:
      if (!susceptible_accepts) return v.p_se;
      if (venue == Venue::EssentialCommerce || (venue == Venue::Work && susceptible_essential_worker)) {
        return v.p_se_accepting;
      }
      return v.p_se_non_essential;
  }
  return v.p_se;
}

std::vector<AgentId> contagion_step(const ContagionContext& ctx, int day) {
  std::vector<AgentId> exposed;
  const auto& states = ctx.states;
  auto accepts = [&](AgentId a) { return ctx.behavior[a] == Alternative::Accept; };
  auto draw = [&](AgentId a, AgentId b, std::uint64_t channel) {
    return keyed_uniform({ctx.seed, static_cast<std::uint64_t>(day), std::min(a, b), std::max(a, b), channel});
  };

  std::vector<AgentId> infectious;
  std::vector<AgentId> susceptible;
  for (std::size_t loc = 0; loc < ctx.rosters.size(); ++loc) {
    infectious.clear();
    susceptible.clear();
    for (const AgentId a : ctx.rosters[loc]) {
      if (states[a].phase == Phase::InfectiousCommunity) infectious.push_back(a);
      else if (states[a].phase == Phase::Susceptible) susceptible.push_back(a);
    }
    if (infectious.empty() || susceptible.empty()) continue;
    const Venue venue = venue_of(ctx.locations[loc].kind);
    for (const AgentId s : susceptible) {
      for (const AgentId i : infectious) {
        const double p = contact_probability(ctx.scenario, *ctx.virus, venue, accepts(s), accepts(i),
                                             ctx.essential_worker[s] != 0);
        if (p > 0.0 && draw(i, s, kLocationChannel + loc) < p) {
          exposed.push_back(s);
          break;
        }
      }
    }
  }

  if (ctx.graph) {
    for (std::size_t idx = 0; idx < states.size(); ++idx) {
      const auto i = static_cast<AgentId>(idx);
      if (states[i].phase != Phase::InfectiousCommunity) continue;
      for (const auto& link : ctx.graph->links_from(i)) {
        if (link.kind != LinkKind::Friend) continue;
        const AgentId s = link.target;
        if (states[s].phase != Phase::Susceptible) continue;
        const double p =
            contact_probability(ctx.scenario, *ctx.virus, Venue::Friends, accepts(s), accepts(i), false);
        if (p <= 0.0) continue;
        if (ctx.meet_friend_probability < 1.0 && draw(i, s, kFriendMeeting) >= ctx.meet_friend_probability) {
          continue;
        }
        if (draw(i, s, kFriendInfection) < p) exposed.push_back(s);
      }
    }
  }

  std::sort(exposed.begin(), exposed.end());
  exposed.erase(std::unique(exposed.begin(), exposed.end()), exposed.end());
  return exposed;
}

PhaseCounts count_phases(std::span<const EpidemicState> states) {
  PhaseCounts c{};
  for (const auto& s : states) ++c[static_cast<std::size_t>(s.phase)];
  return c;
}

}  // namespace epihumat
