#include "epihumat/population.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "epihumat/error.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace epihumat {

namespace {

constexpr std::array<std::string_view, 2> kGenderNames{"man", "woman"};
constexpr std::array<std::string_view, 7> kFamilyNames{
    "one_person",         "single_parent",         "single_parent_extended",
    "couple_with_children", "couple_with_children_extended", "couple_without_children",
    "other"};
constexpr std::array<std::string_view, 7> kActivityNames{
    "employee", "unemployed", "autonomous", "civil_servant", "executive", "college_student", "retired"};
constexpr std::array<std::string_view, 7> kSalaryNames{
    "no_income", "below_1000", "1000_1500", "1501_3000", "3001_4500", "4501_6000", "above_6000"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Gender g) { return kGenderNames[static_cast<std::size_t>(g)]; }
std::string_view to_string(Family f) { return kFamilyNames[static_cast<std::size_t>(f)]; }
std::string_view to_string(EconomicActivity a) { return kActivityNames[static_cast<std::size_t>(a)]; }
std::string_view to_string(SalaryBand s) { return kSalaryNames[static_cast<std::size_t>(s)]; }

std::optional<Gender> parse_gender(std::string_view s) { return lookup<Gender>(kGenderNames, s); }
std::optional<Family> parse_family(std::string_view s) { return lookup<Family>(kFamilyNames, s); }
std::optional<EconomicActivity> parse_economic_activity(std::string_view s) {
  return lookup<EconomicActivity>(kActivityNames, s);
}
std::optional<SalaryBand> parse_salary_band(std::string_view s) {
  return lookup<SalaryBand>(kSalaryNames, s);
}

bool is_worker(EconomicActivity a) {
  switch (a) {
    case EconomicActivity::Employee:
    case EconomicActivity::Autonomous:
    case EconomicActivity::CivilServant:
    case EconomicActivity::Executive:
      return true;
    default:
      return false;
  }
}

void validate(const NeedProfile& profile) {
  std::vector<std::string> issues;
  if (profile.size() < 2) issues.push_back("need profile has fewer than two needs");
  if (profile.hedonic >= profile.size()) issues.push_back("hedonic need index out of range");
  if (profile.belonging >= profile.size()) issues.push_back("belonging need index out of range");
  if (profile.hedonic == profile.belonging) issues.push_back("hedonic and belonging needs must differ");
  for (std::size_t n = 0; n < profile.size(); ++n) {
    const auto& need = profile.needs[n];
    if (!(need.importance >= 0.0 && need.importance <= 1.0)) {
      issues.push_back("need " + std::to_string(n) + " importance out of [0,1]");
    }
    for (double s : need.satisfaction) {
      if (!(s >= -1.0 && s <= 1.0)) {
        issues.push_back("need " + std::to_string(n) + " satisfaction out of [-1,1]");
        break;
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

// ---------------------------------------------------------------------------
// Survey

namespace {

constexpr std::array<std::string_view, 10> kSurveyFixedColumns{
    "id",         "gender",           "age",         "family",       "rural_house",
    "economic_activity", "essential_worker", "salary_band", "census_tract", "supports_measures"};

struct NeedColumns {
  std::size_t importance = 0;
  std::size_t sat_accept = 0;
  std::size_t sat_reject = 0;
};

}  // namespace

Survey parse_survey(std::istream& in, std::string_view source) {
  const std::string src(source);
  Survey survey;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<NeedColumns> need_columns;

  auto where = [&](std::size_t row) { return src + ":" + std::to_string(row); };

  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto cells = detail::split(trimmed, ',');

    if (header.empty()) {
      for (auto c : cells) header.emplace_back(c);
      if (header.size() < kSurveyFixedColumns.size()) {
        throw ParseError(where(line_no) + ": survey header is missing fixed columns");
      }
      for (std::size_t i = 0; i < kSurveyFixedColumns.size(); ++i) {
        if (header[i] != kSurveyFixedColumns[i]) {
          throw ParseError(where(line_no) + ": expected column '" + std::string(kSurveyFixedColumns[i]) +
                           "' at position " + std::to_string(i + 1) + ", found '" + header[i] + "'");
        }
      }
      const std::size_t extra = header.size() - kSurveyFixedColumns.size();
      if (extra == 0 || extra % 3 != 0) {
        throw ParseError(where(line_no) +
                         ": need columns must come in <need>_importance,<need>_sat_accept,<need>_sat_reject triples");
      }
      for (std::size_t i = kSurveyFixedColumns.size(); i < header.size(); i += 3) {
        const std::string& col = header[i];
        constexpr std::string_view suffix = "_importance";
        if (col.size() <= suffix.size() || col.compare(col.size() - suffix.size(), suffix.size(), suffix) != 0) {
          throw ParseError(where(line_no) + ": expected '<need>_importance', found '" + col + "'");
        }
        const std::string name = col.substr(0, col.size() - suffix.size());
        if (header[i + 1] != name + "_sat_accept" || header[i + 2] != name + "_sat_reject") {
          throw ParseError(where(line_no) + ": need '" + name + "' columns out of order");
        }
        survey.schema.names.push_back(name);
        need_columns.push_back({i, i + 1, i + 2});
      }
      const auto& names = survey.schema.names;
      const auto hedonic = std::find(names.begin(), names.end(), "hedonic");
      const auto belonging = std::find(names.begin(), names.end(), "belonging");
      if (hedonic == names.end() || belonging == names.end()) {
        throw ValidationError("survey must define both 'hedonic' and 'belonging' needs");
      }
      if (names.size() < 2) throw ValidationError("survey defines fewer than two needs");
      survey.schema.hedonic = static_cast<std::size_t>(hedonic - names.begin());
      survey.schema.belonging = static_cast<std::size_t>(belonging - names.begin());
      continue;
    }

    if (cells.size() != header.size()) {
      throw ParseError(where(line_no) + ": expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }

    SurveyRecord rec;
    rec.id = std::string(cells[0]);
    auto& a = rec.attributes;
    auto bad = [&](std::string_view field, std::string_view value) {
      return ParseError(where(line_no) + ": invalid " + std::string(field) + " '" + std::string(value) + "'");
    };

    if (auto g = parse_gender(cells[1])) a.gender = *g; else throw bad("gender", cells[1]);
    if (auto age = detail::parse_int(cells[2])) {
      if (*age < kMinAge || *age > kMaxAge) {
        throw ValidationError(where(line_no) + ": age " + std::to_string(*age) + " out of [18,100]");
      }
      a.age = static_cast<int>(*age);
    } else {
      throw bad("age", cells[2]);
    }
    if (auto f = parse_family(cells[3])) a.family = *f; else throw bad("family", cells[3]);
    if (auto r = detail::parse_yes_no(cells[4])) a.rural_house = *r; else throw bad("rural_house", cells[4]);
    if (auto e = parse_economic_activity(cells[5])) a.economic_activity = *e;
    else throw bad("economic_activity", cells[5]);
    if (auto e = detail::parse_yes_no(cells[6])) a.essential_worker = *e;
    else throw bad("essential_worker", cells[6]);
    if (auto s = parse_salary_band(cells[7])) a.salary_band = *s; else throw bad("salary_band", cells[7]);
    if (cells[8].empty()) throw bad("census_tract", cells[8]);
    a.census_tract = std::string(cells[8]);
    if (cells[9] == "accept") rec.supports = Alternative::Accept;
    else if (cells[9] == "reject") rec.supports = Alternative::Reject;
    else throw bad("supports_measures", cells[9]);

    rec.needs.hedonic = survey.schema.hedonic;
    rec.needs.belonging = survey.schema.belonging;
    for (std::size_t n = 0; n < need_columns.size(); ++n) {
      const auto& cols = need_columns[n];
      Need need;
      const auto imp = detail::parse_double(cells[cols.importance]);
      const auto acc = detail::parse_double(cells[cols.sat_accept]);
      const auto rej = detail::parse_double(cells[cols.sat_reject]);
      if (!imp || !acc || !rej) throw bad(survey.schema.names[n], "non-numeric need value");
      if (*imp < 0.0 || *imp > 1.0) {
        throw ValidationError(where(line_no) + ": " + header[cols.importance] + " out of [0,1]");
      }
      if (*acc < -1.0 || *acc > 1.0) {
        throw ValidationError(where(line_no) + ": " + header[cols.sat_accept] + " out of [-1,1]");
      }
      if (*rej < -1.0 || *rej > 1.0) {
        throw ValidationError(where(line_no) + ": " + header[cols.sat_reject] + " out of [-1,1]");
      }
      need.importance = *imp;
      need.satisfaction_for(Alternative::Accept) = *acc;
      need.satisfaction_for(Alternative::Reject) = *rej;
      rec.needs.needs.push_back(need);
    }
    survey.records.push_back(std::move(rec));
  }

  if (header.empty()) throw ValidationError(src + ": no agents (empty survey)");
  if (survey.records.empty()) throw ValidationError(src + ": no agents");
  return survey;
}

Survey ingest_real_agents(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_survey(in, path.string());
}

// ---------------------------------------------------------------------------
// Census

std::uint64_t CensusMarginals::total() const {
  std::uint64_t t = 0;
  for (const auto& c : cells) t += c.count;
  return t;
}

CensusMarginals parse_census(std::istream& in, std::string_view source) {
  const std::string src(source);
  CensusMarginals census;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::set<std::tuple<std::string, int, int, int>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto cells = detail::split(trimmed, ',');
    const auto where = src + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (cells.size() != 4 || cells[0] != "tract" || cells[1] != "age_band" || cells[2] != "gender" ||
          cells[3] != "count") {
        throw ParseError(where + ": census header must be 'tract,age_band,gender,count'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 4) throw ParseError(where + ": expected 4 fields");
    CensusCell cell;
    if (cells[0].empty()) throw ParseError(where + ": empty tract code");
    cell.tract = std::string(cells[0]);
    const auto dash = cells[1].find('-');
    if (dash == std::string_view::npos) throw ParseError(where + ": age band must look like 'lo-hi'");
    const auto lo = detail::parse_int(cells[1].substr(0, dash));
    const auto hi = detail::parse_int(cells[1].substr(dash + 1));
    if (!lo || !hi) throw ParseError(where + ": age band must look like 'lo-hi'");
    if (*lo < kMinAge || *hi > kMaxAge || *lo > *hi) {
      throw ValidationError(where + ": age band " + std::string(cells[1]) + " outside [18,100]");
    }
    cell.band = {static_cast<int>(*lo), static_cast<int>(*hi)};
    if (auto g = parse_gender(cells[2])) cell.gender = *g;
    else throw ParseError(where + ": invalid gender '" + std::string(cells[2]) + "'");
    const auto count = detail::parse_int(cells[3]);
    if (!count || *count < 0) throw ParseError(where + ": invalid count '" + std::string(cells[3]) + "'");
    cell.count = static_cast<std::uint64_t>(*count);
    if (!seen.emplace(cell.tract, cell.band.lo, cell.band.hi, static_cast<int>(cell.gender)).second) {
      throw ValidationError(where + ": duplicate census cell");
    }
    census.cells.push_back(std::move(cell));
  }
  if (census.cells.empty() || census.total() == 0) throw ValidationError(src + ": census marginals are empty");
  return census;
}

CensusMarginals load_census(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_census(in, path.string());
}

std::vector<std::uint64_t> apportion(std::span<const std::uint64_t> weights, std::uint64_t total) {
  std::vector<std::uint64_t> out(weights.size(), 0);
  unsigned __int128 sum = 0;
  for (auto w : weights) sum += w;
  if (sum == 0 || total == 0) return out;

  // Exact integer arithmetic: quota_i = w_i * total / sum, remainder kept as
  // the numerator modulo sum.
  std::vector<std::pair<unsigned __int128, std::size_t>> remainders;
  remainders.reserve(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const unsigned __int128 num = static_cast<unsigned __int128>(weights[i]) * total;
    out[i] = static_cast<std::uint64_t>(num / sum);
    assigned += out[i];
    remainders.emplace_back(num % sum, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::uint64_t k = 0; assigned < total; ++k, ++assigned) {
    ++out[remainders[k].second];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Profile tree

bool Predicate::test(const AgentAttributes& a) const {
  auto category = [&]() -> std::uint8_t {
    switch (field) {
      case Field::Gender: return static_cast<std::uint8_t>(a.gender);
      case Field::Family: return static_cast<std::uint8_t>(a.family);
      case Field::RuralHouse: return a.rural_house ? 1 : 0;
      case Field::EconomicActivity: return static_cast<std::uint8_t>(a.economic_activity);
      case Field::EssentialWorker: return a.essential_worker ? 1 : 0;
      case Field::SalaryBand: return static_cast<std::uint8_t>(a.salary_band);
      case Field::Age: break;
    }
    return 0;
  };
  switch (op) {
    case Op::Lt: return a.age < number;
    case Op::Le: return a.age <= number;
    case Op::Gt: return a.age > number;
    case Op::Ge: return a.age >= number;
    case Op::Eq:
    case Op::In: {
      const auto c = category();
      return std::find(categories.begin(), categories.end(), c) != categories.end();
    }
  }
  return false;
}

ProfileTree::ProfileTree(std::vector<Node> nodes, std::vector<ProfileLeaf> leaves)
    : nodes_(std::move(nodes)), leaves_(std::move(leaves)) {
  age_bounds_ = compute_age_bounds();
}

std::size_t ProfileTree::classify(const AgentAttributes& a) const {
  std::size_t i = 0;
  while (nodes_[i].predicate) {
    i = nodes_[i].predicate->test(a) ? nodes_[i].yes : nodes_[i].no;
  }
  return nodes_[i].leaf;
}

std::vector<int> ProfileTree::compute_age_bounds() const {
  std::set<int> bounds{kMinAge};
  for (const auto& node : nodes_) {
    if (!node.predicate || node.predicate->field != Field::Age) continue;
    const double v = node.predicate->number;
    int b = 0;
    switch (node.predicate->op) {
      case Op::Lt:
      case Op::Ge: b = static_cast<int>(std::ceil(v)); break;
      case Op::Le:
      case Op::Gt: b = static_cast<int>(std::floor(v)) + 1; break;
      default: continue;
    }
    if (b > kMinAge && b <= kMaxAge) bounds.insert(b);
  }
  return {bounds.begin(), bounds.end()};
}

std::size_t ProfileTree::age_cluster(int age) const {
  const auto it = std::upper_bound(age_bounds_.begin(), age_bounds_.end(), age);
  return static_cast<std::size_t>(it - age_bounds_.begin()) - 1;
}

void ProfileTree::bind_members(const Survey& survey) {
  for (auto& leaf : leaves_) leaf.members.clear();
  for (std::size_t i = 0; i < survey.records.size(); ++i) {
    leaves_[classify(survey.records[i].attributes)].members.push_back(i);
  }
  std::vector<std::string> issues;
  for (const auto& leaf : leaves_) {
    if (leaf.members.empty()) issues.push_back("profile leaf '" + leaf.profile_id + "' has no survey members");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

namespace {

using nlohmann::json;

struct TreeBuilder {
  std::string src;
  std::vector<ProfileTree::Node> nodes;
  std::vector<ProfileLeaf> leaves;
  std::set<std::string> leaf_ids;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(src + ": " + msg); }

  static std::optional<Field> field_from(std::string_view s) {
    if (s == "age") return Field::Age;
    if (s == "gender") return Field::Gender;
    if (s == "family") return Field::Family;
    if (s == "rural_house") return Field::RuralHouse;
    if (s == "economic_activity") return Field::EconomicActivity;
    if (s == "essential_worker") return Field::EssentialWorker;
    if (s == "salary_band") return Field::SalaryBand;
    return std::nullopt;
  }

  std::uint8_t category(Field field, const json& v) const {
    auto from_string = [&](auto parsed, std::string_view what) -> std::uint8_t {
      if (!parsed) fail("unknown " + std::string(what) + " value '" + v.get<std::string>() + "'");
      return static_cast<std::uint8_t>(*parsed);
    };
    switch (field) {
      case Field::RuralHouse:
      case Field::EssentialWorker:
        if (!v.is_boolean()) fail("boolean field predicate needs a true/false value");
        return v.get<bool>() ? 1 : 0;
      case Field::Gender:
      case Field::Family:
      case Field::EconomicActivity:
      case Field::SalaryBand: {
        if (!v.is_string()) fail("categorical predicate needs a string value");
        const auto s = v.get<std::string>();
        if (field == Field::Gender) return from_string(parse_gender(s), "gender");
        if (field == Field::Family) return from_string(parse_family(s), "family");
        if (field == Field::EconomicActivity) return from_string(parse_economic_activity(s), "economic_activity");
        return from_string(parse_salary_band(s), "salary_band");
      }
      case Field::Age: break;
    }
    fail("age predicates take numeric comparisons");
  }

  std::size_t build(const json& j) {
    if (!j.is_object()) fail("tree node must be an object");
    const std::size_t index = nodes.size();
    nodes.emplace_back();
    if (j.contains("leaf")) {
      for (const auto& [key, _] : j.items()) {
        if (key != "leaf" && key != "accept_fraction") fail("unknown leaf key '" + key + "'");
      }
      if (!j["leaf"].is_string()) fail("leaf id must be a string");
      if (!j.contains("accept_fraction") || !j["accept_fraction"].is_number()) {
        fail("leaf '" + j["leaf"].get<std::string>() + "' needs a numeric accept_fraction");
      }
      ProfileLeaf leaf;
      leaf.profile_id = j["leaf"].get<std::string>();
      leaf.accept_fraction = j["accept_fraction"].get<double>();
      if (!(leaf.accept_fraction >= 0.0 && leaf.accept_fraction <= 1.0)) {
        throw ValidationError(src + ": leaf '" + leaf.profile_id + "' accept_fraction out of [0,1]");
      }
      if (!leaf_ids.insert(leaf.profile_id).second) fail("duplicate leaf id '" + leaf.profile_id + "'");
      nodes[index].leaf = leaves.size();
      leaves.push_back(std::move(leaf));
      return index;
    }
    for (const auto& [key, _] : j.items()) {
      if (key != "field" && key != "op" && key != "value" && key != "yes" && key != "no") {
        fail("unknown node key '" + key + "'");
      }
    }
    for (const char* key : {"field", "op", "value", "yes", "no"}) {
      if (!j.contains(key)) fail(std::string("split node missing '") + key + "'");
    }
    Predicate p;
    const auto field = field_from(j["field"].get<std::string>());
    if (!field) fail("unknown field '" + j["field"].get<std::string>() + "'");
    p.field = *field;
    const auto op = j["op"].get<std::string>();
    if (p.field == Field::Age) {
      if (op == "lt") p.op = Op::Lt;
      else if (op == "le") p.op = Op::Le;
      else if (op == "gt") p.op = Op::Gt;
      else if (op == "ge") p.op = Op::Ge;
      else fail("age predicates use lt/le/gt/ge, found '" + op + "'");
      if (!j["value"].is_number()) fail("age predicate value must be numeric");
      p.number = j["value"].get<double>();
    } else if (op == "eq") {
      p.op = Op::Eq;
      p.categories.push_back(category(p.field, j["value"]));
    } else if (op == "in") {
      p.op = Op::In;
      if (!j["value"].is_array() || j["value"].empty()) fail("'in' predicate needs a non-empty array");
      for (const auto& v : j["value"]) p.categories.push_back(category(p.field, v));
    } else {
      fail("categorical predicates use eq/in, found '" + op + "'");
    }
    nodes[index].predicate = std::move(p);
    const auto yes = build(j["yes"]);
    const auto no = build(j["no"]);
    nodes[index].yes = yes;
    nodes[index].no = no;
    return index;
  }
};

}  // namespace

ProfileTree parse_profile_tree(std::string_view json_text, std::string_view source) {
  TreeBuilder b{std::string(source), {}, {}, {}};
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(b.src + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("root")) b.fail("profile tree needs a 'root' node");
  for (const auto& [key, _] : doc.items()) {
    if (key != "root" && key != "schema_version" && key != "description") b.fail("unknown key '" + key + "'");
  }
  if (doc.contains("schema_version") && doc["schema_version"] != 1) b.fail("unsupported schema_version");
  try {
    b.build(doc["root"]);
  } catch (const json::type_error& e) {
    b.fail(e.what());
  }
  return ProfileTree(std::move(b.nodes), std::move(b.leaves));
}

ProfileTree load_profile_tree(const std::filesystem::path& path) {
  return parse_profile_tree(detail::read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Synthesis

Population synthesize_population(const CensusMarginals& census, const Survey& survey,
                                 const ProfileTree& tree, std::size_t target_size, Rng& rng,
                                 SynthesisStats* stats) {
  if (census.cells.empty()) throw ValidationError("census marginals are empty");
  if (target_size < survey.records.size()) {
    throw ValidationError("target_size " + std::to_string(target_size) + " is below the " +
                          std::to_string(survey.records.size()) + " real agents");
  }
  for (const auto& leaf : tree.leaves()) {
    if (leaf.members.empty()) {
      throw ValidationError("profile leaf '" + leaf.profile_id + "' has no donors (bind the survey first)");
    }
  }

  SynthesisStats local;
  Population pop;
  pop.schema = survey.schema;
  pop.agents.reserve(target_size);

  for (std::size_t i = 0; i < survey.records.size(); ++i) {
    const auto& rec = survey.records[i];
    Agent agent;
    agent.attributes = rec.attributes;
    agent.needs = rec.needs;
    agent.initial_behavior = rec.supports;
    agent.origin = Origin::Real;
    agent.profile_leaf = tree.classify(rec.attributes);
    agent.donor = i;
    pop.agents.push_back(std::move(agent));
  }
  local.real = survey.records.size();

  // Survey respondents grouped by (gender, age cluster) and by gender alone.
  const std::size_t clusters = tree.age_cluster_bounds().size();
  std::vector<std::vector<std::size_t>> by_cell(2 * clusters);
  std::array<std::vector<std::size_t>, 2> by_gender;
  for (std::size_t i = 0; i < survey.records.size(); ++i) {
    const auto& a = survey.records[i].attributes;
    const auto g = static_cast<std::size_t>(a.gender);
    by_cell[g * clusters + tree.age_cluster(a.age)].push_back(i);
    by_gender[g].push_back(i);
  }

  // Donor strata per leaf.
  std::vector<std::array<std::vector<std::size_t>, 2>> strata(tree.leaves().size());
  for (std::size_t l = 0; l < tree.leaves().size(); ++l) {
    for (auto m : tree.leaves()[l].members) {
      strata[l][static_cast<std::size_t>(survey.records[m].supports)].push_back(m);
    }
  }

  std::vector<std::uint64_t> weights;
  weights.reserve(census.cells.size());
  for (const auto& c : census.cells) weights.push_back(c.count);
  const auto allocation = apportion(weights, target_size - survey.records.size());

  for (std::size_t c = 0; c < census.cells.size(); ++c) {
    const auto& cell = census.cells[c];
    for (std::uint64_t k = 0; k < allocation[c]; ++k) {
      Agent agent;
      agent.origin = Origin::Simulated;
      auto& a = agent.attributes;
      a.gender = cell.gender;
      a.age = cell.band.lo + static_cast<int>(rng.index(static_cast<std::size_t>(cell.band.hi - cell.band.lo + 1)));
      a.census_tract = cell.tract;

      const auto g = static_cast<std::size_t>(a.gender);
      const std::vector<std::size_t>* pool = &by_cell[g * clusters + tree.age_cluster(a.age)];
      if (pool->empty()) {
        ++local.conditional_fallbacks;
        pool = by_gender[g].empty() ? nullptr : &by_gender[g];
      }
      const std::size_t source = pool ? (*pool)[rng.index(pool->size())] : rng.index(survey.records.size());
      const auto& src = survey.records[source].attributes;
      a.family = src.family;
      a.rural_house = src.rural_house;
      a.economic_activity = src.economic_activity;
      a.essential_worker = src.essential_worker;
      a.salary_band = src.salary_band;

      agent.profile_leaf = tree.classify(a);
      const auto& leaf = tree.leaves()[agent.profile_leaf];
      const auto& leaf_strata = strata[agent.profile_leaf];
      auto side = rng.bernoulli(leaf.accept_fraction) ? Alternative::Accept : Alternative::Reject;
      if (leaf_strata[static_cast<std::size_t>(side)].empty()) {
        ++local.donor_fallbacks;
        side = opposite(side);
      }
      const auto& donors = leaf_strata[static_cast<std::size_t>(side)];
      agent.donor = donors[rng.index(donors.size())];
      agent.needs = survey.records[agent.donor].needs;
      agent.initial_behavior = survey.records[agent.donor].supports;
      pop.agents.push_back(std::move(agent));
      ++local.simulated;
    }
  }

  if (stats) *stats = local;
  return pop;
}

}  // namespace epihumat
