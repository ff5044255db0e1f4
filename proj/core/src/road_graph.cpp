#include "citygen/road_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

namespace citygen {

namespace {

bool is_road(const Grid<std::uint8_t>& roads, Coord p) { return roads.in_bounds(p) && roads[p] != 0; }

int degree(const Grid<std::uint8_t>& roads, Coord p) {
  int n = 0;
  for (const Coord d : kNeighbors4) n += is_road(roads, p + d) ? 1 : 0;
  return n;
}

int direction_to(Coord from, Coord to) {
  for (int i = 0; i < 4; ++i) {
    if (from + kNeighbors4[static_cast<std::size_t>(i)] == to) return i;
  }
  return -1;
}

}  // namespace

RoadGraph export_road_graph(const Grid<std::uint8_t>& roads, Coord seed) {
  RoadGraph g;
  Grid<int> node_id(roads.width(), roads.height(), -1);
  for (std::size_t i = 0; i < roads.size(); ++i) {
    const Coord p = roads.coord(i);
    if (!is_road(roads, p)) continue;
    const int deg = degree(roads, p);
    if (deg == 1 || deg >= 3 || p == seed) {
      node_id[p] = static_cast<int>(g.nodes.size());
      g.nodes.push_back({node_id[p], p});
    }
  }

  // Each edge is found once from each end; key it by its two half-edges.
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::tuple<int, int, int, std::size_t>> edges;
  for (const auto& node : g.nodes) {
    for (int dir = 0; dir < 4; ++dir) {
      Coord prev = node.p;
      Coord cur = node.p + kNeighbors4[static_cast<std::size_t>(dir)];
      if (!is_road(roads, cur)) continue;
      int len = 1;
      while (node_id[cur] < 0) {
        Coord next = cur;
        for (const Coord d : kNeighbors4) {
          const Coord q = cur + d;
          if (is_road(roads, q) && !(q == prev)) {
            next = q;
            break;
          }
        }
        prev = cur;
        cur = next;
        ++len;
      }
      const std::size_t start = roads.index(node.p) * 4 + static_cast<std::size_t>(dir);
      const std::size_t end = roads.index(cur) * 4 + static_cast<std::size_t>(direction_to(cur, prev));
      const auto key = std::minmax(start, end);
      if (!seen.insert(key).second) continue;
      const int a = std::min(node.id, node_id[cur]);
      const int b = std::max(node.id, node_id[cur]);
      edges.emplace_back(a, b, len, key.first);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b, len, _] : edges) g.edges.push_back({a, b, len});
  return g;
}

nlohmann::json to_json(const RoadGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : graph.nodes) nodes.push_back({{"id", n.id}, {"x", n.p.x}, {"y", n.p.y}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"len", e.len}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

int connected_components(const RoadGraph& graph) {
  std::vector<int> parent(graph.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = static_cast<int>(graph.nodes.size());
  for (const auto& e : graph.edges) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components;
}

int cycle_rank(const RoadGraph& graph) {
  return static_cast<int>(graph.edges.size()) - static_cast<int>(graph.nodes.size()) + connected_components(graph);
}

int dead_end_count(const RoadGraph& graph) {
  std::vector<int> deg(graph.nodes.size(), 0);
  for (const auto& e : graph.edges) {
    ++deg[static_cast<std::size_t>(e.a)];
    ++deg[static_cast<std::size_t>(e.b)];
  }
  return static_cast<int>(std::count(deg.begin(), deg.end(), 1));
}

}  // namespace citygen
