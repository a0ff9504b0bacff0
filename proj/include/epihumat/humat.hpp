#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epihumat/population.hpp"
#include "epihumat/random.hpp"
#include "epihumat/social_graph.hpp"

namespace epihumat {

struct HumatParams {
  double alpha = 0.4;                 // cap on an agent's persuasion, in [0, 0.5]
  double overall_threshold = 0.2;     // 10% of the [-1,1] satisfaction range
  double dissonance_threshold = 0.1;  // 10% of the [0,1] dissonance range
  double hedonic_threshold = 0.2;
  double dissonance_tolerance = 0.5;
  double random_chat_probability = 0.1;

  bool operator==(const HumatParams&) const = default;
};

// Evaluations of one behavioural alternative: E_n = S_n * I_n per need and
// their mean O.
struct AlternativeEvaluation {
  std::vector<double> per_need;
  double overall = 0.0;
  double positive_sum = 0.0;
  double negative_sum = 0.0;
};

AlternativeEvaluation evaluate(const NeedProfile& profile, Alternative b);
std::array<AlternativeEvaluation, 2> evaluate_alternatives(const NeedProfile& profile);

// d = min(|sum E+|, |sum E-|), c = max(...), level = 2d / (d + c), and 0 when
// both sums vanish.
struct DissonanceTerms {
  double d = 0.0;
  double c = 0.0;
  double level = 0.0;
};

DissonanceTerms dissonance(const AlternativeEvaluation& eval);

enum class DilemmaKind { Belongingness, NonBelongingness };

struct Dilemma {
  std::size_t need = 0;
  DilemmaKind kind = DilemmaKind::NonBelongingness;
  bool operator==(const Dilemma&) const = default;
};

// Needs whose evaluation has the opposite sign of every other need's
// evaluation. Zero evaluations are neutral and never opposite.
std::vector<Dilemma> dilemma_needs(const AlternativeEvaluation& eval, const NeedProfile& profile);

struct DissonanceReport {
  DissonanceTerms terms;
  std::vector<Dilemma> dilemmas;  // empty unless terms.level > tolerance
};

DissonanceReport dissonance_and_dilemmas(const AlternativeEvaluation& eval, const NeedProfile& profile,
                                         double tolerance);

enum class ChoiceReason { OverallSatisfaction, Dissonance, Hedonic, Random };

struct Choice {
  Alternative alternative = Alternative::Accept;
  ChoiceReason reason = ChoiceReason::Random;
};

// Higher overall satisfaction wins when the gap is at least
// overall_threshold; otherwise the lower dissonance when the dissonance gap
// exceeds dissonance_threshold; otherwise the better hedonic evaluation when
// that gap is at least hedonic_threshold; otherwise a fair coin.
Choice choose_alternative(const std::array<AlternativeEvaluation, 2>& evals, const NeedProfile& profile,
                          const HumatParams& params, Rng& rng);

// Alternative with the higher overall satisfaction (Accept on a tie).
Alternative preferred_alternative(const NeedProfile& profile);

// Similarity of one need between influenced (e) and influencer (o):
// 1 - |I_e - I_o| when both evaluations share a sign, else 0.
double need_similarity(double eval_influenced, double eval_influencer, double importance_influenced,
                       double importance_influencer);
inline double agent_persuasion(double alpha, double trust, double similarity) { return alpha * trust * similarity; }
inline double critical_node_persuasion(double trust) { return 0.2 * trust; }
inline double blend_satisfaction(double own, double other, double persuasion) {
  return (1.0 - persuasion) * own + persuasion * other;
}

// Moves the influenced agent's satisfactions for `alternative` toward the
// influencer's, need by need. `link` is the influenced agent's link to the
// influencer; its attempt counter always increases and its success counter
// increases when the influenced agent's preferred alternative flips.
// Returns whether it flipped.
bool apply_communication(NeedProfile& influenced, const NeedProfile& influencer, SocialLink& link,
                         Alternative alternative, double alpha);

enum class Action { Inquiring, Signaling };

// Mutable per-agent HUMAT state, one entry per agent.
struct HumatAgents {
  std::span<NeedProfile> needs;
  std::span<Alternative> behavior;
  std::span<const std::uint8_t> alive;
};

// Picks a living linked agent. Inquiring prefers agents with the same
// behaviour, Signaling agents with the opposite one; either falls back to
// every living link when the preferred pool is empty. Within the pool the
// weight is the agent's trust in the candidate times (1 + successes) /
// (1 + attempts) of past persuasion between them.
std::optional<AgentId> select_interlocutor(AgentId agent, Action action, const SocialGraph& graph,
                                           std::span<const Alternative> behavior,
                                           std::span<const std::uint8_t> alive, Rng& rng);

// Belongingness depends on the network: satisfaction for Accept becomes
// 2f - 1 where f is the fraction of living linked agents currently
// accepting, and 1 - 2f for Reject. Unchanged without living links.
void refresh_belonging(AgentId agent, NeedProfile& profile, const SocialGraph& graph,
                       std::span<const Alternative> behavior, std::span<const std::uint8_t> alive);

struct CycleReport {
  Choice choice;
  DissonanceTerms dissonance;
  bool signaled = false;
  bool inquired = false;
  bool chatted = false;
  std::size_t communications = 0;
  std::size_t missing_interlocutor = 0;
};

// evaluate -> choose -> act -> update for one living agent.
CycleReport humat_daily_cycle(AgentId agent, HumatAgents& agents, SocialGraph& graph, const HumatParams& params,
                              Rng& rng);

// ---------------------------------------------------------------------------
// Critical nodes

enum class Orientation { ProMeasures, AntiMeasures };

std::string_view to_string(Orientation o);
std::optional<Orientation> parse_orientation(std::string_view s);

struct CriticalNode {
  std::string id;
  std::size_t network_size = 0;
  bool operator==(const CriticalNode&) const = default;
};

struct CriticalNodePlan {
  std::string node_id;
  Orientation orientation = Orientation::ProMeasures;
  int start_day = 0;
  int end_day = 0;
  int frequency_days = 1;
  double reach = 0.0;  // fraction of the carrier's network reached per message
  std::optional<std::string> secondary_node_id;  // carrier when the node borrows another's network

  bool operator==(const CriticalNodePlan&) const = default;
};

bool broadcasts_on(const CriticalNodePlan& plan, int day);

// A node's random network and every citizen's trust in the node.
struct CriticalNodeState {
  std::vector<AgentId> network;  // ascending ids
  std::vector<double> trust;     // indexed by agent
};

CriticalNodeState make_critical_node(const CriticalNode& node, std::size_t population, Rng& rng);

// Sends one message: ceil(reach * network size) living members of the
// carrier's network, chosen uniformly, move every need toward +1 for the
// promoted alternative and -1 for the other with persuasion 0.2 * trust in
// the sending node. Returns the influenced ids, ascending.
std::vector<AgentId> critical_broadcast(const CriticalNodePlan& plan, const CriticalNodeState& sender,
                                        const CriticalNodeState& carrier, std::span<NeedProfile> needs,
                                        std::span<const std::uint8_t> alive, Rng& rng);

}  // namespace epihumat
