#include "epihumat/geo.hpp"

#include <array>
#include <set>
#include <string>

#include "epihumat/error.hpp"
#include "text_util.hpp"

namespace epihumat {

namespace {
constexpr std::array<std::string_view, 4> kLocationNames{"work", "college", "essential_commerce",
                                                         "non_essential_commerce"};
constexpr std::array<std::string_view, 5> kDestinationNames{"home", "work", "college", "essential_commerce",
                                                            "non_essential_commerce"};
}  // namespace

std::string_view to_string(LocationKind k) { return kLocationNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(DestinationKind k) { return kDestinationNames[static_cast<std::size_t>(k)]; }

std::optional<LocationKind> parse_location_kind(std::string_view s) {
  for (std::size_t i = 0; i < kLocationNames.size(); ++i) {
    if (kLocationNames[i] == s) return static_cast<LocationKind>(i);
  }
  return std::nullopt;
}

TractGrid::TractGrid(int width, int height)
    : width_(width), height_(height), cell_tract_(static_cast<std::size_t>(width) * height, -1) {}

bool TractGrid::assign_tract(Cell c, const std::string& code) {
  auto& slot = cell_tract_[static_cast<std::size_t>(c.y) * width_ + c.x];
  if (slot >= 0) return false;
  auto [it, inserted] = tract_lookup_.emplace(code, tract_codes_.size());
  if (inserted) {
    tract_codes_.push_back(code);
    tract_cells_.emplace_back();
  }
  slot = static_cast<int>(it->second);
  tract_cells_[it->second].push_back(c);
  return true;
}

std::size_t TractGrid::add_location(Location loc) {
  const auto index = locations_.size();
  by_kind_[static_cast<std::size_t>(loc.kind)].push_back(index);
  locations_.push_back(std::move(loc));
  return index;
}

std::optional<std::size_t> TractGrid::tract_index(std::string_view code) const {
  const auto it = tract_lookup_.find(std::string(code));
  if (it == tract_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TractGrid::tract_at(Cell c) const {
  if (!in_bounds(c)) return std::nullopt;
  const int t = cell_tract_[static_cast<std::size_t>(c.y) * width_ + c.x];
  if (t < 0) return std::nullopt;
  return static_cast<std::size_t>(t);
}

TractGrid parse_tract_map(std::istream& in, std::string_view source, std::optional<GridSize> expected) {
  const std::string src(source);
  std::optional<TractGrid> grid;
  std::set<std::string> location_ids;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto f = detail::split_ws(trimmed);
    const auto where = src + ":" + std::to_string(line_no);

    auto coord = [&](std::string_view xs, std::string_view ys) {
      const auto x = detail::parse_int(xs);
      const auto y = detail::parse_int(ys);
      if (!x || !y) throw ParseError(where + ": malformed coordinates");
      const Cell c{static_cast<int>(*x), static_cast<int>(*y)};
      if (!grid->in_bounds(c)) {
        throw ValidationError(where + ": cell (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                              ") outside [0," + std::to_string(grid->width()) + ")x[0," +
                              std::to_string(grid->height()) + ")");
      }
      return c;
    };

    if (f[0] == "grid") {
      if (grid) throw ParseError(where + ": duplicate grid header");
      if (f.size() != 3) throw ParseError(where + ": expected 'grid <width> <height>'");
      const auto w = detail::parse_int(f[1]);
      const auto h = detail::parse_int(f[2]);
      if (!w || !h || *w <= 0 || *h <= 0) throw ParseError(where + ": malformed grid dimensions");
      if (expected && (*w != expected->width || *h != expected->height)) {
        throw ValidationError(where + ": grid is " + std::to_string(*w) + "x" + std::to_string(*h) +
                              ", expected " + std::to_string(expected->width) + "x" +
                              std::to_string(expected->height));
      }
      grid.emplace(static_cast<int>(*w), static_cast<int>(*h));
      continue;
    }
    if (!grid) throw ParseError(where + ": 'grid' header must come first");

    if (f[0] == "cell") {
      if (f.size() != 4) throw ParseError(where + ": expected 'cell <x> <y> <tract>'");
      const auto c = coord(f[1], f[2]);
      if (!grid->assign_tract(c, std::string(f[3]))) {
        throw ValidationError(where + ": cell (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                              ") assigned twice");
      }
    } else if (f[0] == "location") {
      if (f.size() != 5) throw ParseError(where + ": expected 'location <kind> <x> <y> <id>'");
      const auto kind = parse_location_kind(f[1]);
      if (!kind) throw ParseError(where + ": unknown location kind '" + std::string(f[1]) + "'");
      const auto c = coord(f[2], f[3]);
      if (!grid->tract_at(c)) {
        throw ValidationError(where + ": location '" + std::string(f[4]) + "' sits in a cell with no tract");
      }
      if (!location_ids.insert(std::string(f[4])).second) {
        throw ValidationError(where + ": duplicate location id '" + std::string(f[4]) + "'");
      }
      grid->add_location({*kind, c, std::string(f[4])});
    } else {
      throw ParseError(where + ": unknown record '" + std::string(f[0]) + "'");
    }
  }
  if (!grid) throw ParseError(src + ": missing 'grid' header");
  if (grid->tract_codes().empty()) throw ValidationError(src + ": map assigns no cell to any tract");
  return std::move(*grid);
}

TractGrid load_tract_map(const std::filesystem::path& path, std::optional<GridSize> expected) {
  auto in = detail::open_input(path);
  return parse_tract_map(in, path.string(), expected);
}

std::vector<AgentPlacement> assign_placements(const Population& pop, const TractGrid& grid, Rng& rng) {
  const auto& work = grid.locations_of(LocationKind::Work);
  const auto& college = grid.locations_of(LocationKind::College);
  const auto& essential = grid.locations_of(LocationKind::EssentialCommerce);
  const auto& leisure = grid.locations_of(LocationKind::NonEssentialCommerce);

  std::vector<std::string> issues;
  if (essential.empty()) issues.push_back("tract map has no essential_commerce location");
  if (leisure.empty()) issues.push_back("tract map has no non_essential_commerce location");
  bool needs_work = false;
  bool needs_college = false;
  std::vector<std::size_t> tract_of(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& a = pop.agents[i].attributes;
    needs_work |= is_worker(a.economic_activity);
    needs_college |= a.economic_activity == EconomicActivity::CollegeStudent;
    const auto t = grid.tract_index(a.census_tract);
    if (!t || grid.cells_of(*t).empty()) {
      issues.push_back("tract '" + a.census_tract + "' of agent " + std::to_string(i) + " has no cells");
      break;
    }
    tract_of[i] = *t;
  }
  if (needs_work && work.empty()) issues.push_back("tract map has no work location");
  if (needs_college && college.empty()) issues.push_back("tract map has no college location");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  std::vector<AgentPlacement> out;
  out.reserve(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& a = pop.agents[i].attributes;
    AgentPlacement p;
    const auto& cells = grid.cells_of(tract_of[i]);
    p.home = cells[rng.index(cells.size())];
    if (is_worker(a.economic_activity)) {
      p.work_or_college = work[rng.index(work.size())];
    } else if (a.economic_activity == EconomicActivity::CollegeStudent) {
      p.work_or_college = college[rng.index(college.size())];
    }
    p.essential_commerce = essential[rng.index(essential.size())];
    p.leisure = leisure[rng.index(leisure.size())];
    out.push_back(p);
  }
  return out;
}

DailyDestination daily_destination(const AgentAttributes& agent, const AgentPlacement& placement,
                                   const TractGrid& grid, DayKind day, ScenarioKind scenario,
                                   double leisure_probability, Rng& rng) {
  auto at = [&](DestinationKind kind, std::size_t loc) {
    return DailyDestination{kind, loc, grid.locations()[loc].cell};
  };
  const DailyDestination home{DestinationKind::Home, std::nullopt, placement.home};
  auto occupation = [&]() {
    const auto loc = *placement.work_or_college;
    return at(grid.locations()[loc].kind == LocationKind::College ? DestinationKind::College
                                                                   : DestinationKind::Work,
              loc);
  };

  if (scenario == ScenarioKind::Lockdown) {
    if (day == DayKind::Working) {
      if (agent.essential_worker && placement.work_or_college &&
          grid.locations()[*placement.work_or_college].kind == LocationKind::Work) {
        return occupation();
      }
      return home;
    }
    // Non-essential commerce is closed: the leisure branch stays home.
    if (rng.bernoulli(leisure_probability)) return home;
    return at(DestinationKind::EssentialCommerce, placement.essential_commerce);
  }

  if (day == DayKind::Working) {
    if (placement.work_or_college) return occupation();
    return at(DestinationKind::EssentialCommerce, placement.essential_commerce);
  }
  if (rng.bernoulli(leisure_probability)) return at(DestinationKind::NonEssentialCommerce, placement.leisure);
  return at(DestinationKind::EssentialCommerce, placement.essential_commerce);
}

Rosters build_rosters(std::span<const std::optional<DailyDestination>> destinations, std::size_t num_locations) {
  Rosters r;
  r.at_location.resize(num_locations);
  for (std::size_t i = 0; i < destinations.size(); ++i) {
    const auto& d = destinations[i];
    if (!d) continue;
    if (d->location) {
      r.at_location[*d->location].push_back(static_cast<AgentId>(i));
    } else {
      r.at_home.push_back(static_cast<AgentId>(i));
    }
  }
  return r;
}

}  // namespace epihumat
