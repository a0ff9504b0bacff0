#include "epihumat/humat.hpp"

#include <algorithm>
#include <cmath>

namespace epihumat {

namespace {

// Absorbs the rounding in differences such as 0.3 - 0.1 when comparing
// against the 10%-of-range thresholds.
constexpr double kThresholdSlack = 1e-12;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

AlternativeEvaluation evaluate(const NeedProfile& profile, Alternative b) {
  AlternativeEvaluation e;
  e.per_need.reserve(profile.size());
  double sum = 0.0;
  for (const auto& need : profile.needs) {
    const double v = need.satisfaction_for(b) * need.importance;
    e.per_need.push_back(v);
    sum += v;
    if (v > 0.0) e.positive_sum += v;
    if (v < 0.0) e.negative_sum += v;
  }
  e.overall = profile.size() == 0 ? 0.0 : sum / static_cast<double>(profile.size());
  return e;
}

std::array<AlternativeEvaluation, 2> evaluate_alternatives(const NeedProfile& profile) {
  return {evaluate(profile, Alternative::Accept), evaluate(profile, Alternative::Reject)};
}

DissonanceTerms dissonance(const AlternativeEvaluation& eval) {
  const double pos = std::abs(eval.positive_sum);
  const double neg = std::abs(eval.negative_sum);
  DissonanceTerms t;
  t.d = std::min(pos, neg);
  t.c = std::max(pos, neg);
  t.level = (t.d + t.c) > 0.0 ? 2.0 * t.d / (t.d + t.c) : 0.0;
  return t;
}

std::vector<Dilemma> dilemma_needs(const AlternativeEvaluation& eval, const NeedProfile& profile) {
  std::vector<Dilemma> out;
  const auto& e = eval.per_need;
  for (std::size_t n = 0; n < e.size(); ++n) {
    const int s = sign(e[n]);
    if (s == 0) continue;
    bool opposite_to_all = e.size() > 1;
    for (std::size_t m = 0; m < e.size() && opposite_to_all; ++m) {
      if (m != n && sign(e[m]) != -s) opposite_to_all = false;
    }
    if (opposite_to_all) {
      out.push_back({n, n == profile.belonging ? DilemmaKind::Belongingness : DilemmaKind::NonBelongingness});
    }
  }
  return out;
}

DissonanceReport dissonance_and_dilemmas(const AlternativeEvaluation& eval, const NeedProfile& profile,
                                         double tolerance) {
  DissonanceReport r;
  r.terms = dissonance(eval);
  if (r.terms.level > tolerance) r.dilemmas = dilemma_needs(eval, profile);
  return r;
}

Choice choose_alternative(const std::array<AlternativeEvaluation, 2>& evals, const NeedProfile& profile,
                          const HumatParams& params, Rng& rng) {
  const auto& acc = evals[static_cast<std::size_t>(Alternative::Accept)];
  const auto& rej = evals[static_cast<std::size_t>(Alternative::Reject)];

  if (std::abs(acc.overall - rej.overall) >= params.overall_threshold - kThresholdSlack) {
    return {acc.overall > rej.overall ? Alternative::Accept : Alternative::Reject, ChoiceReason::OverallSatisfaction};
  }
  const double d_acc = dissonance(acc).level;
  const double d_rej = dissonance(rej).level;
  if (std::abs(d_acc - d_rej) > params.dissonance_threshold + kThresholdSlack) {
    return {d_acc < d_rej ? Alternative::Accept : Alternative::Reject, ChoiceReason::Dissonance};
  }
  const double h_acc = acc.per_need[profile.hedonic];
  const double h_rej = rej.per_need[profile.hedonic];
  if (std::abs(h_acc - h_rej) >= params.hedonic_threshold - kThresholdSlack) {
    return {h_acc > h_rej ? Alternative::Accept : Alternative::Reject, ChoiceReason::Hedonic};
  }
  return {rng.bernoulli(0.5) ? Alternative::Accept : Alternative::Reject, ChoiceReason::Random};
}

Alternative preferred_alternative(const NeedProfile& profile) {
  const auto acc = evaluate(profile, Alternative::Accept).overall;
  const auto rej = evaluate(profile, Alternative::Reject).overall;
  return acc >= rej ? Alternative::Accept : Alternative::Reject;
}

double need_similarity(double eval_influenced, double eval_influencer, double importance_influenced,
                       double importance_influencer) {
  if (sign(eval_influenced) != sign(eval_influencer)) return 0.0;
  return 1.0 - std::abs(importance_influenced - importance_influencer);
}

bool apply_communication(NeedProfile& influenced, const NeedProfile& influencer, SocialLink& link,
                         Alternative alternative, double alpha) {
  const Alternative before = preferred_alternative(influenced);
  const std::size_t n_needs = std::min(influenced.size(), influencer.size());
  for (std::size_t n = 0; n < n_needs; ++n) {
    auto& own = influenced.needs[n];
    const auto& other = influencer.needs[n];
    const double e_own = own.satisfaction_for(alternative) * own.importance;
    const double e_other = other.satisfaction_for(alternative) * other.importance;
    const double m = need_similarity(e_own, e_other, own.importance, other.importance);
    const double p = agent_persuasion(alpha, link.trust, m);
    own.satisfaction_for(alternative) = blend_satisfaction(own.satisfaction_for(alternative),
                                                           other.satisfaction_for(alternative), p);
  }
  ++link.persuasion_attempts;
  const bool flipped = preferred_alternative(influenced) != before;
  if (flipped) ++link.persuasion_successes;
  return flipped;
}

std::optional<AgentId> select_interlocutor(AgentId agent, Action action, const SocialGraph& graph,
                                           std::span<const Alternative> behavior,
                                           std::span<const std::uint8_t> alive, Rng& rng) {
  struct Candidate {
    AgentId id;
    double weight;
    bool preferred;
  };
  std::vector<Candidate> pool;
  const auto links = graph.links_from(agent);
  for (const auto& l : links) {
    if (!alive[l.target]) continue;
    // A friend who is also a neighbour is one candidate, weighted by the
    // neighbour link that comes first.
    if (l.kind == LinkKind::Friend && graph.has(agent, l.target, LinkKind::Neighbor)) continue;
    // Persuasion history lives on the influenced agent's link to the
    // influencer: the candidate's link back for Signaling, ours for Inquiring.
    const SocialLink* history = &l;
    if (action == Action::Signaling) {
      history = graph.find(l.target, agent, LinkKind::Friend);
      if (!history) history = graph.find(l.target, agent, LinkKind::Neighbor);
    }
    const double ratio =
        history ? (1.0 + history->persuasion_successes) / (1.0 + history->persuasion_attempts) : 1.0;
    const bool same = behavior[l.target] == behavior[agent];
    pool.push_back({l.target, l.trust * ratio, action == Action::Inquiring ? same : !same});
  }
  if (pool.empty()) return std::nullopt;

  const bool any_preferred = std::any_of(pool.begin(), pool.end(), [](const Candidate& c) { return c.preferred; });
  if (any_preferred) std::erase_if(pool, [](const Candidate& c) { return !c.preferred; });

  double total = 0.0;
  for (const auto& c : pool) total += c.weight;
  if (total <= 0.0) return pool[rng.index(pool.size())].id;
  double u = rng.uniform() * total;
  for (const auto& c : pool) {
    if (u < c.weight) return c.id;
    u -= c.weight;
  }
  // Rounding left u at the very top of the range.
  for (auto it = pool.rbegin(); it != pool.rend(); ++it) {
    if (it->weight > 0.0) return it->id;
  }
  return pool.back().id;
}

void refresh_belonging(AgentId agent, NeedProfile& profile, const SocialGraph& graph,
                       std::span<const Alternative> behavior, std::span<const std::uint8_t> alive) {
  std::size_t living = 0;
  std::size_t accepting = 0;
  for (const auto& l : graph.links_from(agent)) {
    if (!alive[l.target]) continue;
    ++living;
    if (behavior[l.target] == Alternative::Accept) ++accepting;
  }
  if (living == 0) return;
  const double f = static_cast<double>(accepting) / static_cast<double>(living);
  auto& need = profile.needs[profile.belonging];
  need.satisfaction_for(Alternative::Accept) = 2.0 * f - 1.0;
  need.satisfaction_for(Alternative::Reject) = 1.0 - 2.0 * f;
}

namespace {

// One communication. Signaling moves the partner toward the agent; Inquiring
// moves the agent toward the partner. The topic is the agent's current
// behaviour in both cases.
bool communicate(AgentId agent, Action action, HumatAgents& agents, SocialGraph& graph,
                 const HumatParams& params, Rng& rng) {
  const auto partner = select_interlocutor(agent, action, graph, agents.behavior, agents.alive, rng);
  if (!partner) return false;
  const AgentId influenced = action == Action::Signaling ? *partner : agent;
  const AgentId influencer = action == Action::Signaling ? agent : *partner;
  SocialLink* link = graph.find_any(influenced, influencer);
  if (!link) return false;
  apply_communication(agents.needs[influenced], agents.needs[influencer], *link, agents.behavior[agent],
                      params.alpha);
  return true;
}

}  // namespace

CycleReport humat_daily_cycle(AgentId agent, HumatAgents& agents, SocialGraph& graph, const HumatParams& params,
                              Rng& rng) {
  CycleReport report;
  if (!agents.alive[agent]) return report;

  auto& profile = agents.needs[agent];
  refresh_belonging(agent, profile, graph, agents.behavior, agents.alive);

  const auto evals = evaluate_alternatives(profile);
  report.choice = choose_alternative(evals, profile, params, rng);
  agents.behavior[agent] = report.choice.alternative;

  const auto chosen = dissonance_and_dilemmas(evals[static_cast<std::size_t>(report.choice.alternative)], profile,
                                              params.dissonance_tolerance);
  report.dissonance = chosen.terms;
  for (const auto& d : chosen.dilemmas) {
    if (d.kind == DilemmaKind::Belongingness) report.signaled = true;
    else report.inquired = true;
  }
  report.chatted = rng.bernoulli(params.random_chat_probability);

  auto act = [&](Action action) {
    if (communicate(agent, action, agents, graph, params, rng)) ++report.communications;
    else ++report.missing_interlocutor;
  };
  if (report.signaled) act(Action::Signaling);
  if (report.inquired) act(Action::Inquiring);
  if (report.chatted) act(Action::Signaling);
  return report;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Orientation o) { return o == Orientation::ProMeasures ? "pro_measures" : "anti_measures"; }

std::optional<Orientation> parse_orientation(std::string_view s) {
  if (s == "pro_measures") return Orientation::ProMeasures;
  if (s == "anti_measures") return Orientation::AntiMeasures;
  return std::nullopt;
}

bool broadcasts_on(const CriticalNodePlan& plan, int day) {
  return day >= plan.start_day && day <= plan.end_day && plan.frequency_days >= 1 &&
         (day - plan.start_day) % plan.frequency_days == 0;
}

CriticalNodeState make_critical_node(const CriticalNode& node, std::size_t population, Rng& rng) {
  CriticalNodeState s;
  std::vector<AgentId> ids(population);
  for (std::size_t i = 0; i < population; ++i) ids[i] = static_cast<AgentId>(i);
  const std::size_t k = std::min(node.network_size, population);
  for (std::size_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + rng.index(population - i)]);
  s.network.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(s.network.begin(), s.network.end());
  s.trust.resize(population);
  for (auto& t : s.trust) t = rng.uniform();
  return s;
}

std::vector<AgentId> critical_broadcast(const CriticalNodePlan& plan, const CriticalNodeState& sender,
                                        const CriticalNodeState& carrier, std::span<NeedProfile> needs,
                                        std::span<const std::uint8_t> alive, Rng& rng) {
  std::vector<AgentId> living;
  for (const AgentId a : carrier.network) {
    if (alive[a]) living.push_back(a);
  }
  const auto wanted = static_cast<std::size_t>(
      std::ceil(plan.reach * static_cast<double>(carrier.network.size()) - 1e-9));
  const std::size_t k = std::min(wanted, living.size());
  for (std::size_t i = 0; i < k; ++i) std::swap(living[i], living[i + rng.index(living.size() - i)]);
  living.resize(k);
  std::sort(living.begin(), living.end());

  const Alternative promoted =
      plan.orientation == Orientation::ProMeasures ? Alternative::Accept : Alternative::Reject;
  for (const AgentId a : living) {
    const double p = critical_node_persuasion(sender.trust[a]);
    for (auto& need : needs[a].needs) {
      need.satisfaction_for(promoted) = blend_satisfaction(need.satisfaction_for(promoted), 1.0, p);
      auto& other = need.satisfaction_for(opposite(promoted));
      other = blend_satisfaction(other, -1.0, p);
    }
  }
  return living;
}

}  // namespace epihumat
