#pragma once

#include <compare>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "epihumat/calendar.hpp"
#include "epihumat/population.hpp"
#include "epihumat/random.hpp"

namespace epihumat {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

inline int chebyshev_distance(Cell a, Cell b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

enum class LocationKind : std::uint8_t { Work, College, EssentialCommerce, NonEssentialCommerce };

std::string_view to_string(LocationKind k);
std::optional<LocationKind> parse_location_kind(std::string_view s);

struct Location {
  LocationKind kind = LocationKind::Work;
  Cell cell;
  std::string id;
};

struct GridSize {
  int width = 50;
  int height = 50;
};

// Board of census-tract cells plus the activity locations placed on it.
// Cells that belong to no tract (sea, outside the municipality) hold no homes
// and no locations.
class TractGrid {
 public:
  TractGrid() : TractGrid(50, 50) {}
  TractGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  // Returns false if the cell already has a tract.
  bool assign_tract(Cell c, const std::string& code);
  std::size_t add_location(Location loc);

  const std::vector<std::string>& tract_codes() const { return tract_codes_; }
  std::optional<std::size_t> tract_index(std::string_view code) const;
  std::optional<std::size_t> tract_at(Cell c) const;
  const std::vector<Cell>& cells_of(std::size_t tract) const { return tract_cells_[tract]; }

  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<std::size_t>& locations_of(LocationKind k) const {
    return by_kind_[static_cast<std::size_t>(k)];
  }

 private:
  int width_;
  int height_;
  std::vector<int> cell_tract_;  // -1 when the cell belongs to no tract
  std::vector<std::string> tract_codes_;
  std::unordered_map<std::string, std::size_t> tract_lookup_;
  std::vector<std::vector<Cell>> tract_cells_;
  std::vector<Location> locations_;
  std::array<std::vector<std::size_t>, 4> by_kind_;
};

// Text format, one record per line, '#' comments:
//   grid <width> <height>
//   cell <x> <y> <tract>
//   location <work|college|essential_commerce|non_essential_commerce> <x> <y> <id>
// `expected` (default 50x50) rejects maps of any other size; pass nullopt to
// accept the declared size.
TractGrid parse_tract_map(std::istream& in, std::string_view source = "<tract map>",
                          std::optional<GridSize> expected = GridSize{});
TractGrid load_tract_map(const std::filesystem::path& path, std::optional<GridSize> expected = GridSize{});

struct AgentPlacement {
  Cell home;
  std::optional<std::size_t> work_or_college;  // index into TractGrid::locations()
  std::size_t essential_commerce = 0;
  std::size_t leisure = 0;  // a non-essential commerce location

  bool operator==(const AgentPlacement&) const = default;
};

// Homes are uniform over the agent's tract cells; workers get a uniform work
// location, college students a uniform college, everyone one essential and
// one non-essential commerce location.
std::vector<AgentPlacement> assign_placements(const Population& pop, const TractGrid& grid, Rng& rng);

enum class DestinationKind : std::uint8_t { Home, Work, College, EssentialCommerce, NonEssentialCommerce };

std::string_view to_string(DestinationKind k);

struct DailyDestination {
  DestinationKind kind = DestinationKind::Home;
  std::optional<std::size_t> location;  // empty at home
  Cell cell;

  bool operator==(const DailyDestination&) const = default;
};

// Where a community agent spends the day. Only non-working days draw from
// `rng` (the leisure coin), and only when the leisure branch is reachable.
DailyDestination daily_destination(const AgentAttributes& agent, const AgentPlacement& placement,
                                   const TractGrid& grid, DayKind day, ScenarioKind scenario,
                                   double leisure_probability, Rng& rng);

// Agents sharing each shared location today. Home is private: an agent at
// home forms a roster of one and is listed in `at_home` instead.
struct Rosters {
  std::vector<std::vector<AgentId>> at_location;  // indexed like TractGrid::locations()
  std::vector<AgentId> at_home;
};

Rosters build_rosters(std::span<const std::optional<DailyDestination>> destinations, std::size_t num_locations);

}  // namespace epihumat
