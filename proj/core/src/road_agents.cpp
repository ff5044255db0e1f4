#include "citygen/road_agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace citygen {

bool extender_may_stand(const WorldView& view, Coord p) {
  if (!view.terrain.in_bounds(p) || !view.terrain.is_land(p)) return false;
  const int leash = view.params.at(p).effective_max_roam_from_developed();
  bool found = false;
  for_each_in_window(view.landuse.uses(), p, leash,
                     [&](Coord q) { found = found || view.landuse.use(q) != LandUse::Empty; });
  return found;
}

std::optional<std::vector<Coord>> trace_to_network(const WorldView& view, Coord start, double elevation_weight) {
  std::vector<Coord> path{start};
  Grid<std::uint8_t> visited(view.terrain.width(), view.terrain.height(), 0);
  visited[start] = 1;
  Coord cur = start;
  const std::size_t max_steps = visited.size();
  while (path.size() <= max_steps) {
    std::optional<Coord> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const Coord d : kNeighbors4) {
      const Coord q = cur + d;
      if (!view.terrain.in_bounds(q) || visited[q] != 0 || !view.terrain.is_land(q)) continue;
      if (is_built(view.landuse.use(q))) continue;
      const auto dist = view.service_distance(q);
      if (!dist) continue;
      const double cost =
          *dist + elevation_weight * std::abs(view.terrain.elevation(q) - view.terrain.elevation(cur));
      if (cost < best_cost) {
        best_cost = cost;
        best = q;
      }
    }
    if (!best) return std::nullopt;
    if (view.roads.is_road(*best)) return path;
    visited[*best] = 1;
    path.push_back(*best);
    cur = *best;
  }
  return std::nullopt;
}

std::vector<Coord> l_route(Coord from, Coord to, const RoadNetwork& roads) {
  std::vector<Coord> out;
  Coord cur = from;
  auto advance = [&](Coord step) {
    cur = cur + step;
    if (roads.is_road(cur)) return false;
    out.push_back(cur);
    return true;
  };
  const Coord sx{to.x > from.x ? 1 : -1, 0};
  while (cur.x != to.x) {
    if (!advance(sx)) return out;
  }
  const Coord sy{0, to.y > from.y ? 1 : -1};
  while (cur.y != to.y) {
    if (!advance(sy)) return out;
  }
  return out;
}

bool connector_rule_holds(std::optional<int> hops, double k_connect, int manhattan_distance) {
  return !hops || static_cast<double>(*hops) > k_connect * static_cast<double>(manhattan_distance);
}

namespace {

Coord wander(const WorldView& view, Coord from, RngStream& rng) {
  Coord options[4];
  std::uint32_t n = 0;
  for (const Coord d : kNeighbors4) {
    const Coord q = from + d;
    if (extender_may_stand(view, q)) options[n++] = q;
  }
  return n == 0 ? from : options[rng.below(n)];
}

}  // namespace

RoadAction extender_step(const Agent& agent, const WorldView& view, RngStream& rng) {
  const Coord p = agent.position;
  if (view.terrain.is_land(p) && !view.serviced(p) && view.landuse.use(p) == LandUse::Empty) {
    const auto& params = view.params.at(p);
    if (auto path = trace_to_network(view, p, params.route_elevation_weight)) {
      std::reverse(path->begin(), path->end());
      const Coord fallback = wander(view, p, rng);
      return {p, Candidate{RoadSegment{std::move(*path), RoadOrigin::Extender}, p}, std::nullopt, fallback};
    }
  }
  return {wander(view, p, rng), std::nullopt, std::nullopt};
}

RoadAction connector_step(const Agent& agent, const WorldView& view, RngStream& rng) {
  Coord p = agent.position;
  {
    Coord options[4];
    std::uint32_t n = 0;
    for (const Coord d : kNeighbors4) {
      if (view.roads.is_road(p + d)) options[n++] = p + d;
    }
    if (n > 0) p = options[rng.below(n)];
  }

  const auto& params = view.params.at(p);
  std::vector<Coord> targets;
  for_each_in_window(view.roads.mask(), p, params.sample_radius, [&](Coord q) {
    if (view.roads.mask()[q] != 0 && !(q == p)) targets.push_back(q);
  });
  if (targets.empty()) return {p, std::nullopt, std::nullopt};

  const Coord target = targets[rng.below(static_cast<std::uint32_t>(targets.size()))];
  ConnectorProbe probe;
  probe.from = p;
  probe.target = target;
  probe.manhattan = manhattan(p, target);
  probe.k_connect = params.k_connect;
  probe.hop_limit = params.effective_connector_bfs_limit();
  probe.network_hops = shortest_road_path_len(view.roads, p, target, probe.hop_limit);
  if (!connector_rule_holds(probe.network_hops, probe.k_connect, probe.manhattan)) {
    return {p, std::nullopt, std::nullopt};
  }

  auto route = l_route(p, target, view.roads);
  if (route.empty()) return {p, std::nullopt, std::nullopt};
  for (const Coord q : route) {
    if (!view.terrain.is_land(q) || is_built(view.landuse.use(q))) return {p, std::nullopt, std::nullopt};
  }
  return {p, Candidate{RoadSegment{std::move(route), RoadOrigin::Connector}, p}, probe, p};
}

}  // namespace citygen
