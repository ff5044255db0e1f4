#pragma once

#include <optional>

#include "citygen/landuse.hpp"
#include "citygen/params.hpp"
#include "citygen/roadnet.hpp"
#include "citygen/terrain.hpp"

namespace citygen {

/// Read-only view of the world that agent step functions evaluate against.
struct WorldView {
  const Terrain& terrain;
  const RoadNetwork& roads;
  const InfluenceField& influence;
  const LandUseGrid& landuse;
  const Grid<int>& water_distance;
  const ParamResolver& params;

  /// Hop distance to the nearest road if within the service radius at p.
  std::optional<int> service_distance(Coord p) const {
    const int d = influence.raw(p);
    if (d == InfluenceField::kUnserviced || d > params.at(p).service_radius) return std::nullopt;
    return d;
  }
  bool serviced(Coord p) const { return service_distance(p).has_value(); }
};

}  // namespace citygen
