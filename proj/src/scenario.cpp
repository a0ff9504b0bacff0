#include "epihumat/scenario.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

#include "epihumat/error.hpp"
#include "text_util.hpp"

namespace epihumat {

using nlohmann::json;

namespace {

void check_probability(std::vector<std::string>& issues, const std::string& name, double p) {
  if (!(p >= 0.0 && p <= 1.0)) issues.push_back(name + " out of [0,1] (got " + std::to_string(p) + ")");
}

void check_at_least(std::vector<std::string>& issues, const std::string& name, double v, double lo) {
  if (!(v >= lo)) issues.push_back(name + " must be >= " + std::to_string(static_cast<long long>(lo)) + " (got " +
                                   std::to_string(v) + ")");
}

}  // namespace

std::vector<std::string> validate(const VirusParams& v) {
  std::vector<std::string> issues;
  const std::pair<const char*, double> probs[] = {
      {"p_se", v.p_se},     {"p_se_quarantine_scenario", v.p_se_quarantine_scenario},
      {"p_se_accepting", v.p_se_accepting}, {"p_se_non_essential", v.p_se_non_essential},
      {"p_id", v.p_id},     {"p_ih", v.p_ih},
      {"p_hd", v.p_hd},     {"p_hicu", v.p_hicu},
      {"p_icud", v.p_icud}, {"asymptomatic_fraction", v.asymptomatic_fraction}};
  for (const auto& [name, p] : probs) check_probability(issues, std::string("virus.") + name, p);
  if (v.p_id + v.p_ih > 1.0) issues.push_back("virus.p_id + virus.p_ih exceeds 1");
  if (v.p_hd + v.p_hicu > 1.0) issues.push_back("virus.p_hd + virus.p_hicu exceeds 1");

  const std::pair<const char*, int> days[] = {
      {"days_ih", v.days_ih},     {"days_id", v.days_id},     {"days_ir", v.days_ir},
      {"days_hicu", v.days_hicu}, {"days_hd", v.days_hd},     {"days_hr", v.days_hr},
      {"days_icud", v.days_icud}, {"days_icur", v.days_icur}, {"days_rs", v.days_rs}};
  for (const auto& [name, d] : days) check_at_least(issues, std::string("virus.") + name, d, 1);
  check_at_least(issues, "virus.quarantine_delay_days", v.quarantine_delay_days, 0);
  if (!(v.incubation_sigma > 0.0)) issues.push_back("virus.incubation_sigma must be > 0");
  if (!std::isfinite(v.incubation_mu)) issues.push_back("virus.incubation_mu must be finite");
  return issues;
}

TransitionTable derive_transition_table(const VirusParams& v) {
  TransitionTable t;
  t.infectious = {v.p_id, v.p_ih, 1.0 - (v.p_id + v.p_ih), v.days_id, v.days_ih, v.days_ir};
  t.hospitalized = {v.p_hd, v.p_hicu, 1.0 - (v.p_hd + v.p_hicu), v.days_hd, v.days_hicu, v.days_hr};
  t.icu = {v.p_icud, 0.0, 1.0 - v.p_icud, v.days_icud, 1, v.days_icur};
  t.incubation_mu = v.incubation_mu;
  t.incubation_sigma = v.incubation_sigma;
  t.days_rs = v.days_rs;
  t.quarantine_delay_days = v.quarantine_delay_days;
  t.asymptomatic_fraction = v.asymptomatic_fraction;
  return t;
}

std::vector<std::string> validate(const ScenarioConfig& c) {
  auto issues = validate(c.virus);
  if (c.calendar.horizon_days < 1) issues.push_back("calendar.horizon_days must be >= 1");
  check_probability(issues, "calendar.leisure_probability", c.calendar.leisure_probability);

  check_at_least(issues, "network.social_reach", c.network.social_reach, 0);
  check_at_least(issues, "network.num_friends", c.network.num_friends, 0);
  check_at_least(issues, "network.age_band_width", c.network.age_band_width, 1);
  check_probability(issues, "network.random_friend", c.network.random_friend);
  check_probability(issues, "network.meet_friend_probability", c.network.meet_friend_probability);

  if (!(c.humat.alpha >= 0.0 && c.humat.alpha <= 0.5)) issues.push_back("humat.alpha out of [0,0.5]");
  check_at_least(issues, "humat.overall_threshold", c.humat.overall_threshold, 0);
  check_at_least(issues, "humat.dissonance_threshold", c.humat.dissonance_threshold, 0);
  check_at_least(issues, "humat.hedonic_threshold", c.humat.hedonic_threshold, 0);
  check_probability(issues, "humat.dissonance_tolerance", c.humat.dissonance_tolerance);
  check_probability(issues, "humat.random_chat_probability", c.humat.random_chat_probability);

  if (c.population.target_size < 1) issues.push_back("population.target_size must be >= 1");
  check_probability(issues, "initial_infected_fraction", c.initial_infected_fraction);
  if (c.replicates < 1) issues.push_back("replicates must be >= 1");

  std::set<std::string> ids;
  for (const auto& n : c.critical_nodes) {
    if (n.id.empty()) issues.push_back("critical_nodes: empty id");
    if (!ids.insert(n.id).second) issues.push_back("critical_nodes: duplicate id '" + n.id + "'");
    if (n.network_size > c.population.target_size) {
      issues.push_back("critical_nodes." + n.id + ".network_size exceeds population.target_size");
    }
  }
  for (std::size_t i = 0; i < c.communication_plans.size(); ++i) {
    const auto& p = c.communication_plans[i];
    const auto where = "communication_plans[" + std::to_string(i) + "]";
    if (!ids.contains(p.node_id)) issues.push_back(where + ".node '" + p.node_id + "' is not a critical node");
    if (p.secondary_node_id && !ids.contains(*p.secondary_node_id)) {
      issues.push_back(where + ".via '" + *p.secondary_node_id + "' is not a critical node");
    }
    if (p.start_day < 0) issues.push_back(where + ".start_day must be >= 0");
    if (p.start_day > p.end_day) issues.push_back(where + ".start_day after end_day");
    if (p.frequency_days < 1) issues.push_back(where + ".frequency_days must be >= 1");
    check_probability(issues, where + ".reach", p.reach);
  }
  return issues;
}

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown. Type problems become issues, not exceptions.
class Section {
 public:
  Section(const json& obj, std::string prefix, std::vector<std::string>& issues)
      : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {}

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& out, bool required = false) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) issues_.push_back("missing required field '" + name(key) + "'");
      return;
    }
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) return type_error(key, "a number");
      out = it->get<double>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) return type_error(key, "an integer");
      const auto v = it->get<std::int64_t>();
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        return type_error(key, "a 32-bit integer");
      }
      out = static_cast<int>(v);
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned()) return type_error(key, "a non-negative integer");
      out = it->get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) return type_error(key, "a string");
      out = it->get<std::string>();
    }
  }

  const json* child(const std::string& key, bool required) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) issues_.push_back("missing required section '" + name(key) + "'");
      return nullptr;
    }
    return &*it;
  }

  void reject_unknown() {
    for (const auto& item : obj_.items()) {
      if (!seen_.contains(item.key())) issues_.push_back("unknown key '" + name(item.key()) + "'");
    }
  }

  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  void type_error(const std::string& key, const char* expected) {
    issues_.push_back(name(key) + " must be " + expected);
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
};

bool expect_object(const json* j, const std::string& name, std::vector<std::string>& issues) {
  if (!j) return false;
  if (!j->is_object()) {
    issues.push_back(name + " must be an object");
    return false;
  }
  return true;
}

void read_virus(const json& j, ScenarioKind kind, VirusParams& v, std::vector<std::string>& issues) {
  Section s(j, "virus", issues);
  const bool preventive = kind == ScenarioKind::PreventiveMeasures;
  s.read("p_se", v.p_se);
  s.read("p_se_quarantine_scenario", v.p_se_quarantine_scenario, kind == ScenarioKind::Lockdown);
  s.read("p_se_accepting", v.p_se_accepting, preventive);
  s.read("p_se_non_essential", v.p_se_non_essential, preventive);
  s.read("p_id", v.p_id);
  s.read("p_ih", v.p_ih);
  s.read("p_hd", v.p_hd);
  s.read("p_hicu", v.p_hicu);
  s.read("p_icud", v.p_icud);
  s.read("days_ih", v.days_ih);
  s.read("days_id", v.days_id);
  s.read("days_ir", v.days_ir);
  s.read("days_hicu", v.days_hicu);
  s.read("days_hd", v.days_hd);
  s.read("days_hr", v.days_hr);
  s.read("days_icud", v.days_icud);
  s.read("days_icur", v.days_icur);
  s.read("incubation_mu", v.incubation_mu);
  s.read("incubation_sigma", v.incubation_sigma);
  s.read("days_rs", v.days_rs);
  s.read("quarantine_delay_days", v.quarantine_delay_days, preventive);
  s.read("asymptomatic_fraction", v.asymptomatic_fraction, preventive);
  s.reject_unknown();
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return std::filesystem::absolute(path).lexically_normal();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir, std::string_view source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(std::string(source) + ": top level must be an object");

  std::vector<std::string> issues;
  ScenarioConfig c;
  Section top(root, "", issues);

  int version = 0;
  top.read("schema_version", version, true);
  if (top.has("schema_version") && version != kScenarioSchemaVersion) {
    issues.push_back("unsupported schema_version " + std::to_string(version) + " (expected " +
                     std::to_string(kScenarioSchemaVersion) + ")");
  }
  top.read("name", c.name);
  std::string kind;
  top.read("scenario_kind", kind, true);
  if (top.has("scenario_kind")) {
    if (const auto k = parse_scenario_kind(kind)) c.kind = *k;
    else if (!kind.empty()) issues.push_back("scenario_kind '" + kind + "' is not one of NoMeasures, Lockdown, PreventiveMeasures");
  }
  top.read("rng_seed", c.rng_seed);
  top.read("replicates", c.replicates);
  top.read("initial_infected_fraction", c.initial_infected_fraction, true);

  if (const auto* j = top.child("virus", true); expect_object(j, "virus", issues)) {
    read_virus(*j, c.kind, c.virus, issues);
  }

  if (const auto* j = top.child("population", true); expect_object(j, "population", issues)) {
    Section s(*j, "population", issues);
    std::string survey, census, tree, map;
    s.read("survey", survey, true);
    s.read("census", census, true);
    s.read("profile_tree", tree, true);
    s.read("tract_map", map, true);
    s.read("target_size", c.population.target_size, true);
    s.reject_unknown();
    if (!survey.empty()) c.population.survey = resolve(survey, base_dir);
    if (!census.empty()) c.population.census = resolve(census, base_dir);
    if (!tree.empty()) c.population.profile_tree = resolve(tree, base_dir);
    if (!map.empty()) c.population.tract_map = resolve(map, base_dir);
  }

  if (const auto* j = top.child("calendar", false); expect_object(j, "calendar", issues)) {
    Section s(*j, "calendar", issues);
    s.read("horizon_days", c.calendar.horizon_days);
    s.read("leisure_probability", c.calendar.leisure_probability);
    std::string anchor;
    s.read("anchor_weekday", anchor);
    if (!anchor.empty()) {
      if (const auto w = parse_weekday(anchor)) c.calendar.anchor_weekday = *w;
      else issues.push_back("calendar.anchor_weekday '" + anchor + "' is not a weekday name");
    }
    s.reject_unknown();
  }

  if (const auto* j = top.child("network", false); expect_object(j, "network", issues)) {
    Section s(*j, "network", issues);
    s.read("social_reach", c.network.social_reach);
    s.read("num_friends", c.network.num_friends);
    s.read("random_friend", c.network.random_friend);
    s.read("age_band_width", c.network.age_band_width);
    s.read("meet_friend_probability", c.network.meet_friend_probability);
    s.reject_unknown();
  }

  if (const auto* j = top.child("humat", false); expect_object(j, "humat", issues)) {
    Section s(*j, "humat", issues);
    s.read("alpha", c.humat.alpha);
    s.read("overall_threshold", c.humat.overall_threshold);
    s.read("dissonance_threshold", c.humat.dissonance_threshold);
    s.read("hedonic_threshold", c.humat.hedonic_threshold);
    s.read("dissonance_tolerance", c.humat.dissonance_tolerance);
    s.read("random_chat_probability", c.humat.random_chat_probability);
    s.reject_unknown();
  }

  if (const auto* j = top.child("critical_nodes", false)) {
    if (!j->is_array()) {
      issues.push_back("critical_nodes must be an array");
    } else {
      for (std::size_t i = 0; i < j->size(); ++i) {
        const auto where = "critical_nodes[" + std::to_string(i) + "]";
        if (!expect_object(&(*j)[i], where, issues)) continue;
        Section s((*j)[i], where, issues);
        CriticalNode n;
        s.read("id", n.id, true);
        s.read("network_size", n.network_size, true);
        s.reject_unknown();
        c.critical_nodes.push_back(std::move(n));
      }
    }
  }

  if (const auto* j = top.child("communication_plans", false)) {
    if (!j->is_array()) {
      issues.push_back("communication_plans must be an array");
    } else {
      for (std::size_t i = 0; i < j->size(); ++i) {
        const auto where = "communication_plans[" + std::to_string(i) + "]";
        if (!expect_object(&(*j)[i], where, issues)) continue;
        Section s((*j)[i], where, issues);
        CriticalNodePlan p;
        std::string orientation, via;
        s.read("node", p.node_id, true);
        s.read("orientation", orientation, true);
        s.read("start_day", p.start_day, true);
        s.read("end_day", p.end_day, true);
        s.read("frequency_days", p.frequency_days, true);
        s.read("reach", p.reach, true);
        s.read("via", via);
        s.reject_unknown();
        if (s.has("orientation")) {
          if (const auto o = parse_orientation(orientation)) p.orientation = *o;
          else issues.push_back(where + ".orientation must be pro_measures or anti_measures");
        }
        if (!via.empty()) p.secondary_node_id = via;
        c.communication_plans.push_back(std::move(p));
      }
    }
  }
  top.reject_unknown();

  if (issues.empty()) issues = validate(c);
  if (!issues.empty()) {
    for (auto& i : issues) i = std::string(source) + ": " + i;
    throw ValidationError(std::move(issues));
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_scenario(text, base, path.string());
}

std::string serialize(const ScenarioConfig& c) {
  const auto& v = c.virus;
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = c.name;
  j["scenario_kind"] = std::string(to_string(c.kind));
  j["rng_seed"] = c.rng_seed;
  j["replicates"] = c.replicates;
  j["initial_infected_fraction"] = c.initial_infected_fraction;
  j["population"] = {{"survey", c.population.survey.string()},
                     {"census", c.population.census.string()},
                     {"profile_tree", c.population.profile_tree.string()},
                     {"tract_map", c.population.tract_map.string()},
                     {"target_size", c.population.target_size}};
  j["calendar"] = {{"horizon_days", c.calendar.horizon_days},
                   {"anchor_weekday", std::string(to_string(c.calendar.anchor_weekday))},
                   {"leisure_probability", c.calendar.leisure_probability}};
  j["virus"] = {{"p_se", v.p_se},
                {"p_se_quarantine_scenario", v.p_se_quarantine_scenario},
                {"p_se_accepting", v.p_se_accepting},
                {"p_se_non_essential", v.p_se_non_essential},
                {"p_id", v.p_id},
                {"p_ih", v.p_ih},
                {"p_hd", v.p_hd},
                {"p_hicu", v.p_hicu},
                {"p_icud", v.p_icud},
                {"days_ih", v.days_ih},
                {"days_id", v.days_id},
                {"days_ir", v.days_ir},
                {"days_hicu", v.days_hicu},
                {"days_hd", v.days_hd},
                {"days_hr", v.days_hr},
                {"days_icud", v.days_icud},
                {"days_icur", v.days_icur},
                {"incubation_mu", v.incubation_mu},
                {"incubation_sigma", v.incubation_sigma},
                {"days_rs", v.days_rs},
                {"quarantine_delay_days", v.quarantine_delay_days},
                {"asymptomatic_fraction", v.asymptomatic_fraction}};
  j["network"] = {{"social_reach", c.network.social_reach},
                  {"num_friends", c.network.num_friends},
                  {"random_friend", c.network.random_friend},
                  {"age_band_width", c.network.age_band_width},
                  {"meet_friend_probability", c.network.meet_friend_probability}};
  j["humat"] = {{"alpha", c.humat.alpha},
                {"overall_threshold", c.humat.overall_threshold},
                {"dissonance_threshold", c.humat.dissonance_threshold},
                {"hedonic_threshold", c.humat.hedonic_threshold},
                {"dissonance_tolerance", c.humat.dissonance_tolerance},
                {"random_chat_probability", c.humat.random_chat_probability}};
  j["critical_nodes"] = json::array();
  for (const auto& n : c.critical_nodes) j["critical_nodes"].push_back({{"id", n.id}, {"network_size", n.network_size}});
  j["communication_plans"] = json::array();
  for (const auto& p : c.communication_plans) {
    json pj = {{"node", p.node_id},
               {"orientation", std::string(to_string(p.orientation))},
               {"start_day", p.start_day},
               {"end_day", p.end_day},
               {"frequency_days", p.frequency_days},
               {"reach", p.reach}};
    if (p.secondary_node_id) pj["via"] = *p.secondary_node_id;
    j["communication_plans"].push_back(std::move(pj));
  }
  return j.dump(2) + "\n";
}

}  // namespace epihumat
