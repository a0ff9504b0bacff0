#include "epihumat/social_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>

namespace epihumat {

std::size_t SocialGraph::link_count() const {
  std::size_t n = 0;
  for (const auto& links : out_) n += links.size();
  return n;
}

SocialLink* SocialGraph::find(AgentId source, AgentId target, LinkKind kind) {
  for (auto& l : out_[source]) {
    if (l.target == target && l.kind == kind) return &l;
  }
  return nullptr;
}

const SocialLink* SocialGraph::find(AgentId source, AgentId target, LinkKind kind) const {
  for (const auto& l : out_[source]) {
    if (l.target == target && l.kind == kind) return &l;
  }
  return nullptr;
}

SocialLink* SocialGraph::find_any(AgentId source, AgentId target) {
  if (auto* f = find(source, target, LinkKind::Friend)) return f;
  return find(source, target, LinkKind::Neighbor);
}

bool SocialGraph::add(AgentId source, AgentId target, LinkKind kind, double trust) {
  if (source == target || has(source, target, kind)) return false;
  out_[source].push_back({target, kind, trust, 0, 0});
  return true;
}

std::size_t SocialGraph::count(AgentId a, LinkKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(out_[a].begin(), out_[a].end(), [&](const SocialLink& l) { return l.kind == kind; }));
}

std::size_t SocialGraph::count_living(AgentId a, LinkKind kind, std::span<const std::uint8_t> alive) const {
  return static_cast<std::size_t>(std::count_if(out_[a].begin(), out_[a].end(), [&](const SocialLink& l) {
    return l.kind == kind && alive[l.target];
  }));
}

void SocialGraph::prune_dead(std::span<const std::uint8_t> alive) {
  for (std::size_t a = 0; a < out_.size(); ++a) {
    if (!alive[a]) {
      out_[a].clear();
      continue;
    }
    std::erase_if(out_[a], [&](const SocialLink& l) { return !alive[l.target]; });
  }
}

void build_neighbor_network(SocialGraph& graph, std::span<const Cell> homes, const NetworkParams& p, Rng& rng) {
  std::map<Cell, std::vector<AgentId>> by_cell;
  for (std::size_t i = 0; i < homes.size(); ++i) by_cell[homes[i]].push_back(static_cast<AgentId>(i));

  const int r = p.social_reach;
  for (std::size_t i = 0; i < homes.size(); ++i) {
    const auto a = static_cast<AgentId>(i);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const auto it = by_cell.find(Cell{homes[i].x + dx, homes[i].y + dy});
        if (it == by_cell.end()) continue;
        for (const AgentId b : it->second) {
          if (b != a) graph.append(a, {b, LinkKind::Neighbor, rng.uniform(), 0, 0});
        }
      }
    }
  }
}

namespace {

class FriendMaker {
 public:
  FriendMaker(SocialGraph& graph, std::span<const int> ages, std::span<const std::uint8_t> alive,
              const NetworkParams& p, Rng& rng)
      : graph_(graph), ages_(ages), alive_(alive), p_(p), rng_(rng) {
    for (std::size_t i = 0; i < ages.size(); ++i) {
      if (!is_alive(static_cast<AgentId>(i))) continue;
      const auto band = static_cast<std::size_t>(age_band(ages[i], p.age_band_width));
      if (bands_.size() <= band) bands_.resize(band + 1);
      bands_[band].push_back(static_cast<AgentId>(i));
      everyone_.push_back(static_cast<AgentId>(i));
    }
  }

  std::size_t top_up(AgentId a, FriendStats& stats) {
    std::size_t added = 0;
    while (living_friends(a) < static_cast<std::size_t>(p_.num_friends)) {
      std::optional<AgentId> target;
      if (rng_.bernoulli(p_.random_friend)) {
        target = pick(a, everyone_);
      } else {
        target = pick(a, bands_[static_cast<std::size_t>(age_band(ages_[a], p_.age_band_width))]);
        if (!target) {
          ++stats.band_fallbacks;
          target = pick(a, everyone_);
        }
      }
      if (!target) break;
      graph_.add(a, *target, LinkKind::Friend, rng_.uniform());
      graph_.add(*target, a, LinkKind::Friend, rng_.uniform());
      ++stats.ties;
      if (age_band(ages_[a], p_.age_band_width) != age_band(ages_[*target], p_.age_band_width)) {
        ++stats.cross_band_ties;
      }
      ++added;
    }
    return added;
  }

  bool is_alive(AgentId a) const { return alive_.empty() || alive_[a]; }

 private:
  std::size_t living_friends(AgentId a) const {
    if (alive_.empty()) return graph_.count(a, LinkKind::Friend);
    return graph_.count_living(a, LinkKind::Friend, alive_);
  }

  bool eligible(AgentId a, AgentId c) const {
    return c != a && is_alive(c) && !graph_.has(a, c, LinkKind::Friend);
  }

  // Uniform over the eligible members of `pool`: a few rejection draws, then
  // an exact scan when the pool is mostly exhausted.
  std::optional<AgentId> pick(AgentId a, const std::vector<AgentId>& pool) {
    if (pool.empty()) return std::nullopt;
    for (int attempt = 0; attempt < 32; ++attempt) {
      const AgentId c = pool[rng_.index(pool.size())];
      if (eligible(a, c)) return c;
    }
    std::vector<AgentId> candidates;
    for (const AgentId c : pool) {
      if (eligible(a, c)) candidates.push_back(c);
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[rng_.index(candidates.size())];
  }

  SocialGraph& graph_;
  std::span<const int> ages_;
  std::span<const std::uint8_t> alive_;
  const NetworkParams& p_;
  Rng& rng_;
  std::vector<std::vector<AgentId>> bands_;
  std::vector<AgentId> everyone_;
};

}  // namespace

FriendStats build_friend_network(SocialGraph& graph, std::span<const int> ages, const NetworkParams& p, Rng& rng,
                                 std::span<const std::uint8_t> alive) {
  FriendStats stats;
  FriendMaker maker(graph, ages, alive, p, rng);
  for (std::size_t i = 0; i < ages.size(); ++i) {
    const auto a = static_cast<AgentId>(i);
    if (maker.is_alive(a)) maker.top_up(a, stats);
  }
  return stats;
}

std::size_t repair_network(AgentId agent, SocialGraph& graph, std::span<const int> ages,
                           std::span<const std::uint8_t> alive, const NetworkParams& p, Rng& rng,
                           FriendStats* stats) {
  if (!alive[agent]) return 0;
  if (graph.count_living(agent, LinkKind::Friend, alive) >= static_cast<std::size_t>(p.num_friends)) return 0;
  FriendStats local;
  FriendMaker maker(graph, ages, alive, p, rng);
  const auto added = maker.top_up(agent, local);
  if (stats) {
    stats->ties += local.ties;
    stats->cross_band_ties += local.cross_band_ties;
    stats->band_fallbacks += local.band_fallbacks;
  }
  return added;
}

std::size_t repair_all(SocialGraph& graph, std::span<const int> ages, std::span<const std::uint8_t> alive,
                       const NetworkParams& p, Rng& rng, FriendStats* stats) {
  graph.prune_dead(alive);
  std::optional<FriendMaker> maker;
  FriendStats local;
  std::size_t added = 0;
  for (std::size_t i = 0; i < graph.agents(); ++i) {
    const auto a = static_cast<AgentId>(i);
    if (!alive[a] || graph.count(a, LinkKind::Friend) >= static_cast<std::size_t>(p.num_friends)) continue;
    if (!maker) maker.emplace(graph, ages, alive, p, rng);
    added += maker->top_up(a, local);
  }
  if (stats) {
    stats->ties += local.ties;
    stats->cross_band_ties += local.cross_band_ties;
    stats->band_fallbacks += local.band_fallbacks;
  }
  return added;
}

void dump_graph(std::ostream& out, const SocialGraph& graph) {
  out << "source\ttarget\tkind\ttrust\n";
  char buf[32];
  for (std::size_t a = 0; a < graph.agents(); ++a) {
    for (const auto& l : graph.links_from(static_cast<AgentId>(a))) {
      std::snprintf(buf, sizeof buf, "%.6f", l.trust);
      out << a << '\t' << l.target << '\t' << (l.kind == LinkKind::Friend ? "friend" : "neighbor") << '\t' << buf
          << '\n';
    }
  }
}

}  // namespace epihumat
