#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "citygen/grid.hpp"
#include "citygen/params.hpp"
#include "citygen/terrain.hpp"

namespace citygen {

enum class RoadOrigin : std::uint8_t { Seed, Extender, Connector };

std::string_view to_string(RoadOrigin origin);

/// A run of patches laid down as road. Consecutive patches are 4-adjacent.
struct RoadSegment {
  std::vector<Coord> path;
  RoadOrigin origin = RoadOrigin::Seed;

  friend bool operator==(const RoadSegment&, const RoadSegment&) = default;
};

/// Patch-based road network. Segments are kept only as a provenance log.
class RoadNetwork {
 public:
  RoadNetwork(int width, int height, Coord seed);

  int width() const { return mask_.width(); }
  int height() const { return mask_.height(); }
  Coord seed() const { return seed_; }
  bool in_bounds(Coord p) const { return mask_.in_bounds(p); }
  bool is_road(Coord p) const { return mask_.in_bounds(p) && mask_[p] != 0; }
  int road_neighbor_count(Coord p) const;
  /// A junction is a road patch with three or more road neighbours.
  bool is_junction(Coord p) const { return is_road(p) && road_neighbor_count(p) >= 3; }
  std::size_t road_count() const { return road_count_; }

  const Grid<std::uint8_t>& mask() const { return mask_; }
  const std::vector<RoadSegment>& segments() const { return segments_; }

  /// Marks every path patch as road and logs the segment. No checks.
  void add(const RoadSegment& segment);
  /// Marks a single patch as road without logging (snapshot restore).
  void mark(Coord p);

 private:
  Grid<std::uint8_t> mask_;
  std::vector<RoadSegment> segments_;
  Coord seed_;
  std::size_t road_count_ = 0;
};

/// Per-patch 4-connected hop distance to the nearest road, capped at cap().
/// Propagation ignores terrain: water patches carry distances too.
class InfluenceField {
 public:
  static constexpr int kUnserviced = std::numeric_limits<int>::max();

  InfluenceField(int width, int height, int cap);

  int cap() const { return cap_; }
  /// Hop distance, or kUnserviced when it exceeds the cap.
  int raw(Coord p) const { return dist_[p]; }
  std::optional<int> distance(Coord p) const {
    const int d = dist_[p];
    return d == kUnserviced ? std::nullopt : std::optional<int>(d);
  }
  const Grid<int>& grid() const { return dist_; }

  /// Monotone min-update from new road patches, out to cap() hops.
  void stamp(std::span<const Coord> sources);
  /// Full recomputation from a road mask with a new cap.
  void recompute(const RoadNetwork& roads, int cap);

  friend bool operator==(const InfluenceField&, const InfluenceField&) = default;

 private:
  Grid<int> dist_;
  int cap_;
};

/// Fraction of in-bounds patches within Chebyshev radius of center that are road.
double road_density(const RoadNetwork& roads, Coord center, int radius);

/// BFS over road patches. std::nullopt when b is not reachable within hop_limit.
/// Throws NotARoadPatch if a or b is not a road patch.
std::optional<int> shortest_road_path_len(const RoadNetwork& roads, Coord a, Coord b, int hop_limit);

/// A segment offered by an agent, with the point the agent discovered it from.
struct Candidate {
  RoadSegment segment;
  Coord origin_point;
};

enum class RejectReason : std::uint8_t {
  Malformed,              ///< empty, gapped, repeated, off-grid, water or already road
  Detached,               ///< no endpoint touches the network
  Obstructed,             ///< crosses a built patch (checked by the engine)
  StaleConnectorRule,     ///< connector shortcut no longer needed at commit time
  RoadDensity,
  IntersectionProximity,
  StartDeviation,
  GridDeviation,
};

std::string_view to_string(RejectReason reason);

/// Existing road patches 4-adjacent to either endpoint of path, endpoint
/// front first, each in N, E, S, W order, without duplicates.
std::vector<Coord> attach_points(std::span<const Coord> path, const RoadNetwork& roads);

/// Whether p lies within the permitted deviation of the global road grid,
/// whose lines pass through anchor every `spacing` patches.
bool within_grid_deviation(Coord p, Coord anchor, const std::optional<int>& spacing,
                           const std::optional<int>& deviation);

/// Vets a candidate against the network. std::nullopt means Accept; otherwise
/// the first failing rule in the order density, intersection spacing, start
/// deviation, grid deviation (after the structural preconditions).
std::optional<RejectReason> check_segment(const Candidate& candidate, const Terrain& terrain,
                                          const RoadNetwork& roads, const SimParams& params);

/// Adds an accepted segment and restamps influence around it.
void commit_segment(RoadNetwork& roads, InfluenceField& influence, const RoadSegment& segment);

}  // namespace citygen
