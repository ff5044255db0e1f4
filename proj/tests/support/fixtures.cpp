#include "fixtures.hpp"

#include <stdexcept>

namespace citygen::test {

Terrain flat_terrain(int width, int height, Coord seed, double elevation) {
  std::vector<Cell> cells(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                          Cell{CellKind::Land, elevation});
  return Terrain(width, height, std::move(cells), seed);
}

Terrain terrain_from_rows(const std::vector<std::string>& rows, Coord seed) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<Cell> cells;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != w) throw std::invalid_argument("ragged fixture");
    for (const char c : row) {
      if (c == '~') {
        cells.push_back({CellKind::Water, 0.0});
      } else if (c == '^') {
        cells.push_back({CellKind::Land, 1.0});
      } else if (c >= '0' && c <= '9') {
        cells.push_back({CellKind::Land, (c - '0') / 10.0});
      } else {
        cells.push_back({CellKind::Land, 0.5});
      }
    }
  }
  return Terrain(w, h, std::move(cells), seed);
}

SimParams no_agents(SimParams params) {
  params.n_extenders = 0;
  params.n_connectors = 0;
  params.n_commercial = 0;
  params.n_residential = 0;
  return params;
}

Fixture::Fixture(Terrain t, SimParams p)
    : terrain(std::move(t)),
      water(water_distance_field(terrain)),
      roads(terrain.width(), terrain.height(), terrain.seed()),
      influence(terrain.width(), terrain.height(), p.service_radius),
      landuse(terrain.width(), terrain.height()),
      params(terrain.width(), terrain.height(), p) {
  road({terrain.seed()});
}

WorldView Fixture::view() const { return WorldView{terrain, roads, influence, landuse, water, params}; }

void Fixture::road(const std::vector<Coord>& path) {
  std::vector<Coord> fresh;
  for (const Coord p : path) {
    if (!roads.is_road(p)) fresh.push_back(p);
  }
  if (fresh.empty()) return;
  commit_segment(roads, influence, RoadSegment{fresh, RoadOrigin::Extender});
  for (const Coord p : fresh) landuse.set_road(p);
}

void Fixture::road_line(Coord from, Coord to) { road(line(from, to)); }

void Fixture::build(Coord p, LandUse use, double density) { landuse.build(p, use, density, terrain.elevation(p)); }

std::vector<Coord> line(Coord from, Coord to) {
  std::vector<Coord> out{from};
  Coord p = from;
  while (!(p == to)) {
    if (p.x != to.x) p.x += p.x < to.x ? 1 : -1;
    else p.y += p.y < to.y ? 1 : -1;
    out.push_back(p);
  }
  return out;
}

}  // namespace citygen::test
