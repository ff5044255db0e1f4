#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "citygen/grid.hpp"

namespace citygen {

/// Road network contracted to a multigraph: nodes are junctions (3+ road
/// neighbours), dead ends (1 road neighbour) and the seed; edges are maximal
/// road paths between them, measured in hops.
struct RoadGraph {
  struct Node {
    int id;
    Coord p;
  };
  struct Edge {
    int a;
    int b;
    int len;
  };
  std::vector<Node> nodes;  ///< ids assigned in row-major order
  std::vector<Edge> edges;  ///< a <= b, sorted by (a, b, len)
};

RoadGraph export_road_graph(const Grid<std::uint8_t>& roads, Coord seed);

/// {"nodes":[{id,x,y}], "edges":[{a,b,len}]}
nlohmann::json to_json(const RoadGraph& graph);

int connected_components(const RoadGraph& graph);
/// E - V + C: the number of independent loops.
int cycle_rank(const RoadGraph& graph);
/// Nodes with exactly one incident edge end.
int dead_end_count(const RoadGraph& graph);

}  // namespace citygen
