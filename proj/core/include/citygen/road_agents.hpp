#pragma once

#include <optional>
#include <vector>

#include "citygen/agents.hpp"
#include "citygen/rng.hpp"
#include "citygen/view.hpp"

namespace citygen {

/// What a connector saw when it decided to propose a shortcut.
struct ConnectorProbe {
  Coord from;
  Coord target;
  int manhattan = 0;
  std::optional<int> network_hops;  ///< nullopt: unreachable within hop_limit
  double k_connect = 1.0;
  int hop_limit = 0;
};

/// Outcome of one road-agent step. The agent always ends at new_position;
/// a proposal is present only when it offers a segment.
struct RoadAction {
  Coord new_position;
  std::optional<Candidate> proposal;
  std::optional<ConnectorProbe> probe;
  /// Where the agent goes instead if the proposal is rejected.
  Coord fallback = new_position;
};

/// Whether an extender may stand at p: Land within max_roam_from_developed
/// (Chebyshev) of a road or built patch.
bool extender_may_stand(const WorldView& view, Coord p);

/// Greedy descent from `start` along the influence field to the network,
/// minimising distance + route_elevation_weight * |delta elevation| with
/// N, E, S, W tie-breaking. Returns patches from start up to (not including)
/// the first road patch, or nullopt when the walk gets stuck.
std::optional<std::vector<Coord>> trace_to_network(const WorldView& view, Coord start, double elevation_weight);

/// L-shaped route from `from` towards `to`: x-leg first, then y-leg,
/// excluding `from` and truncated before the first road patch.
std::vector<Coord> l_route(Coord from, Coord to, const RoadNetwork& roads);

/// True when the shortcut rule calls for a new road: hops unknown or hops > k * m.
bool connector_rule_holds(std::optional<int> hops, double k_connect, int manhattan_distance);

RoadAction extender_step(const Agent& agent, const WorldView& view, RngStream& rng);
RoadAction connector_step(const Agent& agent, const WorldView& view, RngStream& rng);

}  // namespace citygen
