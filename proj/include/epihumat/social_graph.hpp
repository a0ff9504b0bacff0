#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "epihumat/geo.hpp"
#include "epihumat/population.hpp"
#include "epihumat/random.hpp"

namespace epihumat {

struct NetworkParams {
  int social_reach = 1;    // cells, Chebyshev radius of a social circle
  int num_friends = 5;     // minimum friend links per agent
  double random_friend = 0.05;
  int age_band_width = 10;  // homophily bands [18,28), [28,38), ...
  double meet_friend_probability = 1.0;

  bool operator==(const NetworkParams&) const = default;
};

enum class LinkKind : std::uint8_t { Neighbor, Friend };

// Directed edge; `trust` is the trust the source places in the target.
struct SocialLink {
  AgentId target = 0;
  LinkKind kind = LinkKind::Neighbor;
  double trust = 0.0;
  std::uint32_t persuasion_attempts = 0;
  std::uint32_t persuasion_successes = 0;

  bool operator==(const SocialLink&) const = default;
};

// Out-adjacency lists. A pair may be joined by both a neighbor and a friend
// link; each (source, target, kind) appears at most once.
class SocialGraph {
 public:
  SocialGraph() = default;
  explicit SocialGraph(std::size_t agents) : out_(agents) {}

  std::size_t agents() const { return out_.size(); }
  std::size_t link_count() const;

  std::span<const SocialLink> links_from(AgentId a) const { return out_[a]; }
  std::span<SocialLink> links_from(AgentId a) { return out_[a]; }

  SocialLink* find(AgentId source, AgentId target, LinkKind kind);
  const SocialLink* find(AgentId source, AgentId target, LinkKind kind) const;
  // Any link source->target, friend kind preferred.
  SocialLink* find_any(AgentId source, AgentId target);

  bool has(AgentId source, AgentId target, LinkKind kind) const { return find(source, target, kind) != nullptr; }

  // No-op (returns false) for self-links and duplicates.
  bool add(AgentId source, AgentId target, LinkKind kind, double trust);
  // Caller guarantees the link is new and not a self-link.
  void append(AgentId source, SocialLink link) { out_[source].push_back(link); }

  std::size_t count(AgentId a, LinkKind kind) const;
  std::size_t count_living(AgentId a, LinkKind kind, std::span<const std::uint8_t> alive) const;

  // Removes every link touching a dead agent.
  void prune_dead(std::span<const std::uint8_t> alive);

  bool operator==(const SocialGraph&) const = default;

 private:
  std::vector<std::vector<SocialLink>> out_;
};

inline int age_band(int age, int width) { return (age - kMinAge) / (width > 0 ? width : 1); }

// Links every pair of agents whose homes are within `social_reach` cells
// (Chebyshev). Both directions are created, each with its own uniform trust.
void build_neighbor_network(SocialGraph& graph, std::span<const Cell> homes, const NetworkParams& p, Rng& rng);

struct FriendStats {
  std::size_t ties = 0;             // undirected friend ties created
  std::size_t cross_band_ties = 0;  // ties joining different age bands
  std::size_t band_fallbacks = 0;   // own band exhausted, drew from any band
};

// Gives every living agent at least `num_friends` friend links. Each new tie
// is bidirectional with independent trusts; its target comes from the
// agent's age band with probability 1 - random_friend, else from the whole
// population.
FriendStats build_friend_network(SocialGraph& graph, std::span<const int> ages, const NetworkParams& p, Rng& rng,
                                 std::span<const std::uint8_t> alive = {});

// Tops up `agent`'s living friend links to num_friends using the same rule.
// Dead agents never receive links. Returns the number of ties added.
std::size_t repair_network(AgentId agent, SocialGraph& graph, std::span<const int> ages,
                           std::span<const std::uint8_t> alive, const NetworkParams& p, Rng& rng,
                           FriendStats* stats = nullptr);

// The daily repair phase: drops every link touching a dead agent, then tops
// up each living agent whose friend count fell below num_friends. New ties
// are added to `stats`.
std::size_t repair_all(SocialGraph& graph, std::span<const int> ages, std::span<const std::uint8_t> alive,
                       const NetworkParams& p, Rng& rng, FriendStats* stats = nullptr);

// Edge list: "source\ttarget\tkind\ttrust" with a header row.
void dump_graph(std::ostream& out, const SocialGraph& graph);

}  // namespace epihumat
