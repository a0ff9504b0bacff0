#include "epihumat/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace epihumat {

std::shared_ptr<const WorldInputs> load_inputs(const ScenarioConfig& config) {
  auto in = std::make_shared<WorldInputs>();
  in->survey = ingest_real_agents(config.population.survey);
  in->census = load_census(config.population.census);
  in->tree = load_profile_tree(config.population.profile_tree);
  in->tree.bind_members(in->survey);
  in->grid = load_tract_map(config.population.tract_map);
  return in;
}

std::size_t DailyMetrics::population() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

World init_world(const ScenarioConfig& config, std::shared_ptr<const WorldInputs> inputs, std::uint64_t seed) {
  World w;
  w.config = config;
  w.table = derive_transition_table(config.virus);
  w.inputs = std::move(inputs);
  w.seed = seed;

  auto pop_rng = make_stream(seed, Stream::Population);
  w.population = synthesize_population(w.inputs->census, w.inputs->survey, w.inputs->tree,
                                       config.population.target_size, pop_rng, &w.synthesis);
  const std::size_t n = w.population.size();

  auto place_rng = make_stream(seed, Stream::Placement);
  w.placements = assign_placements(w.population, w.inputs->grid, place_rng);

  w.ages.reserve(n);
  w.essential_worker.reserve(n);
  w.needs.reserve(n);
  w.behavior.reserve(n);
  for (const auto& a : w.population.agents) {
    w.ages.push_back(a.attributes.age);
    w.essential_worker.push_back(a.attributes.essential_worker ? 1 : 0);
    w.needs.push_back(a.needs);
    w.behavior.push_back(a.initial_behavior);
  }
  w.alive.assign(n, 1);
  w.states.assign(n, EpidemicState{});

  auto net_rng = make_stream(seed, Stream::Network);
  std::vector<Cell> homes;
  homes.reserve(n);
  for (const auto& p : w.placements) homes.push_back(p.home);
  w.graph = SocialGraph(n);
  build_neighbor_network(w.graph, homes, config.network, net_rng);
  w.friend_stats = build_friend_network(w.graph, w.ages, config.network, net_rng);

  auto node_rng = make_stream(seed, Stream::CriticalNodes);
  for (const auto& node : config.critical_nodes) w.critical_nodes.push_back(make_critical_node(node, n, node_rng));

  auto seed_rng = make_stream(seed, Stream::Seeding);
  const auto infected = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::llround(config.initial_infected_fraction * static_cast<double>(n))));
  std::vector<AgentId> ids(n);
  std::iota(ids.begin(), ids.end(), AgentId{0});
  for (std::size_t i = 0; i < infected; ++i) std::swap(ids[i], ids[i + seed_rng.index(n - i)]);
  std::sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(infected));
  for (std::size_t i = 0; i < infected; ++i) {
    auto& s = w.states[ids[i]];
    s.infected_on = 0;
    s.asymptomatic = config.kind == ScenarioKind::PreventiveMeasures &&
                     seed_rng.bernoulli(config.virus.asymptomatic_fraction);
    enter_phase(s, Phase::InfectiousCommunity, 0, w.table, seed_rng);
  }

  auto order_rng = make_stream(seed, Stream::HumatOrder);
  w.humat_order.resize(n);
  std::iota(w.humat_order.begin(), w.humat_order.end(), AgentId{0});
  order_rng.shuffle(std::span<AgentId>(w.humat_order));

  w.movement_rng = make_stream(seed, Stream::Movement);
  w.humat_rng = make_stream(seed, Stream::Humat);
  w.critical_rng = Rng(hash_keys({seed, static_cast<std::uint64_t>(Stream::CriticalNodes), 1}));
  w.epidemic_rng = make_stream(seed, Stream::Epidemic);
  w.repair_rng = make_stream(seed, Stream::Repair);
  w.contagion_seed = stream_seed(seed, Stream::Contagion);
  return w;
}

namespace {

std::vector<std::vector<AgentId>> movement_phase(World& w, DayKind kind) {
  const auto& grid = w.inputs->grid;
  std::vector<std::vector<AgentId>> rosters(grid.locations().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!in_community(w.states[i].phase)) continue;
    const auto d = daily_destination(w.population.agents[i].attributes, w.placements[i], grid, kind, w.config.kind,
                                     w.config.calendar.leisure_probability, w.movement_rng);
    if (d.location) rosters[*d.location].push_back(static_cast<AgentId>(i));
  }
  return rosters;
}

std::size_t humat_phase(World& w) {
  std::size_t communications = 0;
  for (std::size_t p = 0; p < w.config.communication_plans.size(); ++p) {
    const auto& plan = w.config.communication_plans[p];
    if (!broadcasts_on(plan, w.day)) continue;
    auto index_of = [&](const std::string& id) {
      const auto& nodes = w.config.critical_nodes;
      return static_cast<std::size_t>(
          std::find_if(nodes.begin(), nodes.end(), [&](const CriticalNode& c) { return c.id == id; }) -
          nodes.begin());
    };
    const auto sender = index_of(plan.node_id);
    const auto carrier = plan.secondary_node_id ? index_of(*plan.secondary_node_id) : sender;
    critical_broadcast(plan, w.critical_nodes[sender], w.critical_nodes[carrier], w.needs, w.alive, w.critical_rng);
  }

  HumatAgents agents{w.needs, w.behavior, w.alive};
  for (const AgentId a : w.humat_order) {
    if (!w.alive[a]) continue;
    communications += humat_daily_cycle(a, agents, w.graph, w.config.humat, w.humat_rng).communications;
  }
  return communications;
}

bool epidemic_phase(World& w) {
  bool died = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto& s = w.states[i];
    if (s.phase == Phase::Dead) continue;
    step_epidemic(s, w.day, w.table, w.config.kind, w.behavior[i] == Alternative::Accept, w.epidemic_rng);
    if (s.phase == Phase::Dead) {
      w.alive[i] = 0;
      died = true;
    }
  }
  return died;
}

std::size_t contagion_phase(World& w, const std::vector<std::vector<AgentId>>& rosters) {
  ContagionContext ctx;
  ctx.scenario = w.config.kind;
  ctx.virus = &w.config.virus;
  ctx.rosters = rosters;
  ctx.locations = w.inputs->grid.locations();
  ctx.graph = &w.graph;
  ctx.states = w.states;
  ctx.behavior = w.behavior;
  ctx.essential_worker = w.essential_worker;
  ctx.meet_friend_probability = w.config.network.meet_friend_probability;
  ctx.seed = w.contagion_seed;
  const auto exposed = contagion_step(ctx, w.day);
  for (const AgentId a : exposed) expose(w.states[a], w.day, w.table, w.config.kind, w.epidemic_rng);
  return exposed.size();
}

}  // namespace

DailyMetrics snapshot(const World& w, std::size_t new_infections, std::size_t communications) {
  DailyMetrics m;
  m.day = w.day;
  m.counts = count_phases(w.states);
  m.new_infections = new_infections;
  m.communications = communications;
  std::size_t living = 0;
  std::size_t accepting = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!w.alive[i]) continue;
    ++living;
    if (w.behavior[i] == Alternative::Accept) ++accepting;
  }
  m.acceptance_level = living ? static_cast<double>(accepting) / static_cast<double>(living) : 0.0;
  return m;
}

DailyMetrics run_day(World& w) {
  if (w.day >= w.config.calendar.horizon_days) throw std::logic_error("run_day: horizon already reached");

  const auto rosters = movement_phase(w, day_kind(w.config.calendar, w.day));
  const auto communications = humat_phase(w);
  const bool died = epidemic_phase(w);
  const auto new_infections = contagion_phase(w, rosters);
  if (died) repair_all(w.graph, w.ages, w.alive, w.config.network, w.repair_rng, &w.friend_stats);

  const auto m = snapshot(w, new_infections, communications);
  if (m.population() != w.size()) {
    throw std::logic_error("day " + std::to_string(w.day) + ": state counts sum to " +
                           std::to_string(m.population()) + ", population is " + std::to_string(w.size()));
  }
  const auto dead = m.counts[static_cast<std::size_t>(Phase::Dead)];
  if (dead < w.dead_recorded) throw std::logic_error("day " + std::to_string(w.day) + ": dead count decreased");
  w.dead_recorded = dead;
  ++w.day;
  return m;
}

std::vector<DailyMetrics> run_replicate(const ScenarioConfig& config, std::shared_ptr<const WorldInputs> inputs,
                                        std::uint64_t seed) {
  auto world = init_world(config, std::move(inputs), seed);
  std::vector<DailyMetrics> series;
  series.reserve(static_cast<std::size_t>(config.calendar.horizon_days));
  while (world.day < config.calendar.horizon_days) series.push_back(run_day(world));
  return series;
}

std::vector<MeanMetrics> mean_series(const std::vector<std::vector<DailyMetrics>>& replicates) {
  std::vector<MeanMetrics> mean;
  if (replicates.empty()) return mean;
  const std::size_t days = replicates.front().size();
  const auto n = static_cast<double>(replicates.size());
  mean.resize(days);
  for (std::size_t d = 0; d < days; ++d) {
    auto& m = mean[d];
    m.day = replicates.front()[d].day;
    // Sum in replicate order so the mean is reproducible bit for bit.
    for (const auto& r : replicates) {
      for (std::size_t k = 0; k < kPhaseCount; ++k) m.counts[k] += static_cast<double>(r[d].counts[k]);
      m.new_infections += static_cast<double>(r[d].new_infections);
      m.communications += static_cast<double>(r[d].communications);
      m.acceptance_level += r[d].acceptance_level;
    }
    for (auto& c : m.counts) c /= n;
    m.new_infections /= n;
    m.communications /= n;
    m.acceptance_level /= n;
  }
  return mean;
}

RunResult run_replicates(const ScenarioConfig& config, int n, unsigned threads,
                         std::shared_ptr<const WorldInputs> inputs) {
  if (n < 1) throw std::invalid_argument("replicate count must be >= 1");
  if (!inputs) inputs = load_inputs(config);

  RunResult result;
  for (int i = 0; i < n; ++i) result.seeds.push_back(config.rng_seed + static_cast<std::uint64_t>(i));
  result.replicates.resize(static_cast<std::size_t>(n));

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::uint64_t failed_seed = 0;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        result.replicates[static_cast<std::size_t>(i)] = run_replicate(config, inputs, result.seeds[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error || result.seeds[i] < failed_seed) {
          error = std::current_exception();
          failed_seed = result.seeds[i];
        }
        next = n;
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate with seed " + std::to_string(failed_seed) + " failed: " + e.what());
    }
  }
  result.mean = mean_series(result.replicates);
  return result;
}

std::vector<MeanMetrics> as_mean(const std::vector<DailyMetrics>& series) { return mean_series({series}); }

SeriesSummary summarize(const std::vector<MeanMetrics>& series, double initial_infected) {
  SeriesSummary s;
  s.cumulative_infections = initial_infected;
  for (const auto& m : series) {
    const double prevalence = m.counts[static_cast<std::size_t>(Phase::InfectiousCommunity)] +
                              m.counts[static_cast<std::size_t>(Phase::Hospitalized)] +
                              m.counts[static_cast<std::size_t>(Phase::Icu)] +
                              m.counts[static_cast<std::size_t>(Phase::Quarantine)];
    if (prevalence > s.peak_prevalence) {
      s.peak_prevalence = prevalence;
      s.peak_day = m.day;
    }
    s.cumulative_infections += m.new_infections;
    s.mean_acceptance += m.acceptance_level;
    s.total_communications += m.communications;
  }
  if (!series.empty()) {
    s.mean_acceptance /= static_cast<double>(series.size());
    const auto& last = series.back();
    s.final_removed = last.counts[static_cast<std::size_t>(Phase::Recovered)] +
                      last.counts[static_cast<std::size_t>(Phase::Dead)];
  }
  return s;
}

}  // namespace epihumat
