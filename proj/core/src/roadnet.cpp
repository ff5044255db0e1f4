#include "citygen/roadnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "citygen/errors.hpp"

namespace citygen {

std::string_view to_string(RoadOrigin origin) {
  switch (origin) {
    case RoadOrigin::Seed: return "seed";
    case RoadOrigin::Extender: return "extender";
    case RoadOrigin::Connector: return "connector";
  }
  return "?";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::Malformed: return "malformed";
    case RejectReason::Detached: return "detached";
    case RejectReason::Obstructed: return "obstructed";
    case RejectReason::StaleConnectorRule: return "stale_connector_rule";
    case RejectReason::RoadDensity: return "road_density";
    case RejectReason::IntersectionProximity: return "intersection_proximity";
    case RejectReason::StartDeviation: return "start_deviation";
    case RejectReason::GridDeviation: return "grid_deviation";
  }
  return "?";
}

RoadNetwork::RoadNetwork(int width, int height, Coord seed) : mask_(width, height, 0), seed_(seed) {}

int RoadNetwork::road_neighbor_count(Coord p) const {
  int n = 0;
  for (const Coord d : kNeighbors4) n += is_road(p + d) ? 1 : 0;
  return n;
}

void RoadNetwork::mark(Coord p) {
  if (mask_[p] == 0) {
    mask_[p] = 1;
    ++road_count_;
  }
}

void RoadNetwork::add(const RoadSegment& segment) {
  for (const Coord p : segment.path) mark(p);
  segments_.push_back(segment);
}

InfluenceField::InfluenceField(int width, int height, int cap) : dist_(width, height, kUnserviced), cap_(cap) {}

void InfluenceField::stamp(std::span<const Coord> sources) {
  std::deque<Coord> queue;
  for (const Coord s : sources) {
    if (dist_[s] != 0) {
      dist_[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const Coord p = queue.front();
    queue.pop_front();
    const int next = dist_[p] + 1;
    if (next > cap_) continue;
    for (const Coord d : kNeighbors4) {
      const Coord q = p + d;
      if (!dist_.in_bounds(q) || dist_[q] <= next) continue;
      dist_[q] = next;
      queue.push_back(q);
    }
  }
}

void InfluenceField::recompute(const RoadNetwork& roads, int cap) {
  cap_ = cap;
  dist_.fill(kUnserviced);
  std::vector<Coord> sources;
  for (std::size_t i = 0; i < roads.mask().size(); ++i) {
    if (roads.mask().data()[i] != 0) sources.push_back(roads.mask().coord(i));
  }
  stamp(sources);
}

double road_density(const RoadNetwork& roads, Coord center, int radius) {
  int total = 0;
  int hits = 0;
  for_each_in_window(roads.mask(), center, radius, [&](Coord q) {
    ++total;
    hits += roads.mask()[q] != 0 ? 1 : 0;
  });
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::optional<int> shortest_road_path_len(const RoadNetwork& roads, Coord a, Coord b, int hop_limit) {
  if (!roads.is_road(a) || !roads.is_road(b)) throw NotARoadPatch("shortest_road_path_len needs road endpoints");
  if (a == b) return 0;
  Grid<int> seen(roads.width(), roads.height(), -1);
  std::deque<Coord> queue{a};
  seen[a] = 0;
  while (!queue.empty()) {
    const Coord p = queue.front();
    queue.pop_front();
    if (seen[p] >= hop_limit) continue;
    for (const Coord d : kNeighbors4) {
      const Coord q = p + d;
      if (!roads.is_road(q) || seen[q] >= 0) continue;
      seen[q] = seen[p] + 1;
      if (q == b) return seen[q];
      queue.push_back(q);
    }
  }
  return std::nullopt;
}

std::vector<Coord> attach_points(std::span<const Coord> path, const RoadNetwork& roads) {
  std::vector<Coord> out;
  if (path.empty()) return out;
  for (const Coord end : {path.front(), path.back()}) {
    for (const Coord d : kNeighbors4) {
      const Coord q = end + d;
      if (roads.is_road(q) && std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
    }
  }
  return out;
}

bool within_grid_deviation(Coord p, Coord anchor, const std::optional<int>& spacing,
                           const std::optional<int>& deviation) {
  if (!deviation) return true;
  auto line_offset = [&](int v, int a) {
    const int diff = std::abs(v - a);
    if (!spacing) return diff;
    const int r = diff % *spacing;
    return std::min(r, *spacing - r);
  };
  return std::min(line_offset(p.x, anchor.x), line_offset(p.y, anchor.y)) <= *deviation;
}

namespace {

bool near_junction(const RoadNetwork& roads, Coord start, int spacing) {
  if (spacing <= 0) return false;
  // Every road patch strictly closer than `spacing` hops along the network.
  Grid<int> seen(roads.width(), roads.height(), -1);
  std::deque<Coord> queue{start};
  seen[start] = 0;
  while (!queue.empty()) {
    const Coord p = queue.front();
    queue.pop_front();
    if (roads.is_junction(p)) return true;
    if (seen[p] + 1 >= spacing) continue;
    for (const Coord d : kNeighbors4) {
      const Coord q = p + d;
      if (!roads.is_road(q) || seen[q] >= 0) continue;
      seen[q] = seen[p] + 1;
      queue.push_back(q);
    }
  }
  return false;
}

bool well_formed(const std::vector<Coord>& path, const Terrain& terrain, const RoadNetwork& roads) {
  if (path.empty()) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Coord p = path[i];
    if (!terrain.in_bounds(p) || !terrain.is_land(p) || roads.is_road(p)) return false;
    if (i > 0 && manhattan(path[i - 1], p) != 1) return false;
    if (std::find(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i), p) !=
        path.begin() + static_cast<std::ptrdiff_t>(i)) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<RejectReason> check_segment(const Candidate& candidate, const Terrain& terrain,
                                          const RoadNetwork& roads, const SimParams& params) {
  const auto& path = candidate.segment.path;
  if (!well_formed(path, terrain, roads)) return RejectReason::Malformed;
  const auto attach = attach_points(path, roads);
  if (attach.empty()) return RejectReason::Detached;

  for (const Coord p : path) {
    if (road_density(roads, p, params.density_radius) > params.max_road_density) return RejectReason::RoadDensity;
  }

  for (const Coord j : attach) {
    if (near_junction(roads, j, params.min_intersection_spacing)) return RejectReason::IntersectionProximity;
  }

  auto euclid = [&](Coord p) {
    const double dx = p.x - candidate.origin_point.x;
    const double dy = p.y - candidate.origin_point.y;
    return std::sqrt(dx * dx + dy * dy);
  };
  const double far = std::max(euclid(path.front()), euclid(path.back()));
  if (far > params.effective_max_start_deviation()) return RejectReason::StartDeviation;

  for (const Coord p : path) {
    if (!within_grid_deviation(p, roads.seed(), params.grid_spacing, params.grid_deviation_max)) {
      return RejectReason::GridDeviation;
    }
  }
  return std::nullopt;
}

void commit_segment(RoadNetwork& roads, InfluenceField& influence, const RoadSegment& segment) {
  roads.add(segment);
  influence.stamp(segment.path);
}

}  // namespace citygen
