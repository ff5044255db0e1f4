#pragma once

#include <citygen/developers.hpp>
#include <citygen/engine.hpp>
#include <citygen/params.hpp>
#include <citygen/roadnet.hpp>
#include <citygen/terrain.hpp>

#include <string>
#include <vector>

namespace citygen::test {

/// All land at one elevation.
Terrain flat_terrain(int width, int height, Coord seed, double elevation = 0.5);

/// '.' land at 0.5, '~' water, '^' land at 1.0, '0'-'9' land at digit / 10.
Terrain terrain_from_rows(const std::vector<std::string>& rows, Coord seed);

/// Defaults with every agent count set to zero.
SimParams no_agents(SimParams params = {});

/// Stand-alone world pieces for driving agent and developer functions
/// without an engine.
struct Fixture {
  Fixture(Terrain terrain, SimParams params);

  WorldView view() const;
  /// Marks patches as road and restamps influence. No checks.
  void road(const std::vector<Coord>& path);
  void road_line(Coord from, Coord to);
  void build(Coord p, LandUse use, double density = 1.0);

  Terrain terrain;
  Grid<int> water;
  RoadNetwork roads;
  InfluenceField influence;
  LandUseGrid landuse;
  ParamResolver params;
};

/// Straight horizontal or vertical run of patches, inclusive.
std::vector<Coord> line(Coord from, Coord to);

}  // namespace citygen::test
