#include <citygen/road_agents.hpp>
#include <citygen/rng.hpp>

#include <gtest/gtest.h>

#include <climits>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace citygen;
using test::Fixture;
using test::line;

namespace {

SimParams with_radius(int sr) {
  SimParams p = test::no_agents();
  p.service_radius = sr;
  p.grid_deviation_max = std::nullopt;
  return p;
}

// Greedy descent written against the brute-force distance field.
std::vector<Coord> reference_descent(const Fixture& f, Coord start, int sr, double weight) {
  const Grid<int> dist = oracle::capped_distance(f.roads.mask(), sr);
  std::vector<Coord> path{start};
  Coord cur = start;
  const Coord order[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  for (int guard = 0; guard < 1000; ++guard) {
    Coord best{-1, -1};
    double best_cost = 1e300;
    for (const Coord d : order) {
      const Coord q{cur.x + d.x, cur.y + d.y};
      if (!f.terrain.in_bounds(q) || !f.terrain.is_land(q) || dist[q] == INT_MAX) continue;
      if (std::find(path.begin(), path.end(), q) != path.end()) continue;
      const double cost = dist[q] + weight * std::abs(f.terrain.elevation(q) - f.terrain.elevation(cur));
      if (cost < best_cost) {
        best_cost = cost;
        best = q;
      }
    }
    if (best.x < 0) return {};
    if (f.roads.is_road(best)) break;
    path.push_back(best);
    cur = best;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TEST(Extender, ServicedPatchMovesToANeighbor) {
  Fixture f(test::flat_terrain(15, 15, {7, 7}), with_radius(4));
  std::set<std::pair<int, int>> seen;
  for (std::uint64_t s = 0; s < 64; ++s) {
    RngStream rng(s);
    const RoadAction a = extender_step({0, AgentKind::Extender, {7, 9}}, f.view(), rng);
    EXPECT_FALSE(a.proposal.has_value());
    EXPECT_EQ(manhattan(a.new_position, {7, 9}), 1);
    EXPECT_TRUE(extender_may_stand(f.view(), a.new_position));
    seen.insert({a.new_position.x, a.new_position.y});
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Extender, StraightDescentFromDistanceFour) {
  Fixture f(test::flat_terrain(15, 15, {7, 5}), with_radius(3));
  f.road_line({2, 5}, {12, 5});
  RngStream rng(1);
  const RoadAction a = extender_step({0, AgentKind::Extender, {7, 9}}, f.view(), rng);
  ASSERT_TRUE(a.proposal.has_value());
  const auto& path = a.proposal->segment.path;
  EXPECT_EQ(path, (std::vector<Coord>{{7, 6}, {7, 7}, {7, 8}, {7, 9}}));
  EXPECT_EQ(a.proposal->origin_point, (Coord{7, 9}));
  EXPECT_EQ(a.proposal->segment.origin, RoadOrigin::Extender);
  // Distances along the walk from the discovery point: 4, 3, 2, 1.
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_EQ(manhattan(path[path.size() - 1 - i], {7, 5}), 4 - static_cast<int>(i));
  }
  EXPECT_EQ(path, reference_descent(f, {7, 9}, 3, 4.0));
  EXPECT_EQ(a.new_position, (Coord{7, 9}));
  EXPECT_EQ(manhattan(a.fallback, {7, 9}), 1);
}

TEST(Extender, TieBreakFollowsNeighborOrder) {
  Fixture f(test::flat_terrain(12, 12, {5, 5}), with_radius(3));
  RngStream rng(1);
  const RoadAction a = extender_step({0, AgentKind::Extender, {7, 7}}, f.view(), rng);
  ASSERT_TRUE(a.proposal.has_value());
  EXPECT_EQ(a.proposal->segment.path, (std::vector<Coord>{{6, 5}, {7, 5}, {7, 6}, {7, 7}}));
  EXPECT_EQ(a.proposal->segment.path, reference_descent(f, {7, 7}, 3, 4.0));
}

TEST(Extender, AvoidsRidge) {
  const std::vector<std::string> rows = {
      "...........", "...........", "...........", ".....^.....",
      ".....^.....", "...........", "...........", "...........",
  };
  auto proposal = [&](double weight) {
    SimParams p = with_radius(3);
    p.route_elevation_weight = weight;
    Fixture f(test::terrain_from_rows(rows, {5, 2}), p);
    f.road_line({0, 2}, {10, 2});
    RngStream rng(3);
    const RoadAction a = extender_step({0, AgentKind::Extender, {5, 6}}, f.view(), rng);
    EXPECT_TRUE(a.proposal.has_value());
    EXPECT_EQ(a.proposal->segment.path, reference_descent(f, {5, 6}, 3, weight));
    return a.proposal->segment.path;
  };
  auto climb = [&](const std::vector<Coord>& path) {
    const Terrain t = test::terrain_from_rows(rows, {5, 2});
    double total = std::abs(t.elevation(path.front()) - t.elevation({path.front().x, 2}));
    for (std::size_t i = 1; i < path.size(); ++i) total += std::abs(t.elevation(path[i]) - t.elevation(path[i - 1]));
    return total;
  };
  const auto careful = proposal(4.0);
  for (const Coord p : careful) EXPECT_FALSE(p.x == 5 && (p.y == 3 || p.y == 4));
  EXPECT_EQ(climb(careful), 0.0);
  const auto careless = proposal(0.0);
  EXPECT_GT(climb(careless), 0.0);
  EXPECT_LE(careful.size(), careless.size() + 2);
}

TEST(Extender, IsolatedPocketMoves) {
  // The agent's pocket is walled off by water, so no neighbour is serviced.
  const std::vector<std::string> rows = {"..........", "..........", "......~~~~", "......~...", "......~..."};
  Fixture f(test::terrain_from_rows(rows, {1, 1}), with_radius(2));
  f.build({2, 1}, LandUse::Residential);
  RngStream rng(4);
  const RoadAction a = extender_step({0, AgentKind::Extender, {8, 4}}, f.view(), rng);
  EXPECT_FALSE(a.proposal.has_value());
}

TEST(Connector, AdjacentTargetNoProposal) {
  Fixture f(test::flat_terrain(10, 10, {5, 5}), with_radius(4));
  f.road({{6, 5}});
  for (std::uint64_t s = 0; s < 16; ++s) {
    RngStream rng(s);
    const RoadAction a = connector_step({0, AgentKind::Connector, {5, 5}}, f.view(), rng);
    EXPECT_EQ(a.new_position, (Coord{6, 5}));
    ASSERT_FALSE(a.proposal.has_value());
  }
}

TEST(Connector, RuleInequality) {
  EXPECT_TRUE(connector_rule_holds(9, 2.0, 4));
  EXPECT_FALSE(connector_rule_holds(8, 2.0, 4));
  EXPECT_FALSE(connector_rule_holds(1, 1.0, 1));
  EXPECT_TRUE(connector_rule_holds(std::nullopt, 100.0, 1));
}

TEST(Connector, UShapeRung) {
  SimParams p = with_radius(4);
  p.k_connect = 3.0;
  p.sample_radius = 2;
  Fixture f(test::flat_terrain(10, 10, {3, 2}), p);
  f.road_line({3, 2}, {3, 5});
  f.road_line({3, 5}, {5, 5});
  f.road_line({5, 5}, {5, 2});
  ASSERT_EQ(oracle::road_hops(f.roads.mask(), {3, 2}, {5, 2}), 8);
  f.road_line({3, 1}, {3, 2});
  f.road_line({5, 1}, {5, 2});
  // Tips now sit one patch above the old ones; 10 hops apart, Manhattan 2.
  ASSERT_EQ(oracle::road_hops(f.roads.mask(), {3, 1}, {5, 1}), 10);

  int hits = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    RngStream rng(s);
    const RoadAction a = connector_step({0, AgentKind::Connector, {3, 2}}, f.view(), rng);
    ASSERT_TRUE(a.probe.has_value() || !a.proposal.has_value());
    if (!(a.new_position == Coord{3, 1}) || !a.probe || !(a.probe->target == Coord{5, 1})) continue;
    ++hits;
    ASSERT_TRUE(a.proposal.has_value());
    EXPECT_EQ(a.proposal->segment.path, (std::vector<Coord>{{4, 1}}));
    EXPECT_EQ(a.proposal->segment.origin, RoadOrigin::Connector);
    EXPECT_EQ(a.probe->network_hops, 10);
    EXPECT_EQ(a.probe->manhattan, 2);

    ASSERT_EQ(check_segment(*a.proposal, f.terrain, f.roads, f.params.at({3, 1})), std::nullopt);
    Fixture g = f;
    commit_segment(g.roads, g.influence, a.proposal->segment);
    EXPECT_EQ(shortest_road_path_len(g.roads, {3, 1}, {5, 1}, 100), 2);
    EXPECT_EQ(oracle::road_hops(g.roads.mask(), {3, 1}, {5, 1}), 2);
    break;
  }
  EXPECT_EQ(hits, 1);
}

TEST(Connector, ProposalsOnlyWhenOracleRuleHolds) {
  SimParams p = with_radius(4);
  p.k_connect = 1.5;
  p.sample_radius = 4;
  Fixture f(test::flat_terrain(16, 16, {8, 8}), p);
  f.road_line({2, 8}, {13, 8});
  f.road_line({4, 8}, {4, 13});
  f.road_line({4, 13}, {11, 13});
  f.road_line({11, 13}, {11, 10});
  f.road_line({8, 2}, {8, 7});
  std::vector<Coord> road;
  for (std::size_t i = 0; i < f.roads.mask().size(); ++i) {
    if (f.roads.mask().data()[i]) road.push_back(f.roads.mask().coord(i));
  }
  int proposals = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    RngStream pick(s, 1);
    const Coord at = road[pick.below(static_cast<std::uint32_t>(road.size()))];
    RngStream rng(s);
    const RoadAction a = connector_step({0, AgentKind::Connector, at}, f.view(), rng);
    ASSERT_TRUE(f.roads.is_road(a.new_position));
    EXPECT_LE(manhattan(a.new_position, at), 1);
    if (!a.proposal) continue;
    ++proposals;
    ASSERT_TRUE(a.probe.has_value());
    EXPECT_TRUE(oracle::connector_rule(f.roads.mask(), a.probe->from, a.probe->target, 1.5,
                                       p.effective_connector_bfs_limit()));
    EXPECT_EQ(a.proposal->segment.path, l_route(a.probe->from, a.probe->target, f.roads));
  }
  EXPECT_GT(proposals, 0);
}

TEST(Connector, WaterOnRouteMoves) {
  const std::vector<std::string> rows = {"........", "........", "...~....", "........", "........"};
  SimParams p = with_radius(3);
  p.k_connect = 1.0;
  Fixture f(test::terrain_from_rows(rows, {1, 2}), p);
  f.road_line({1, 2}, {1, 4});
  f.road_line({1, 4}, {5, 4});
  f.road_line({5, 4}, {5, 2});
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream rng(s);
    const RoadAction a = connector_step({0, AgentKind::Connector, {1, 3}}, f.view(), rng);
    if (!a.proposal) continue;
    for (const Coord q : a.proposal->segment.path) EXPECT_TRUE(f.terrain.is_land(q));
  }
}

TEST(LRoute, XLegFirstAndTruncatedAtRoad) {
  RoadNetwork roads(8, 8, {0, 0});
  EXPECT_EQ(l_route({0, 0}, {3, 2}, roads), (std::vector<Coord>{{1, 0}, {2, 0}, {3, 0}, {3, 1}, {3, 2}}));
  EXPECT_EQ(l_route({3, 2}, {0, 0}, roads), (std::vector<Coord>{{2, 2}, {1, 2}, {0, 2}, {0, 1}, {0, 0}}));
  roads.mark({2, 0});
  EXPECT_EQ(l_route({0, 0}, {3, 2}, roads), (std::vector<Coord>{{1, 0}}));
  roads.mark({3, 2});
  EXPECT_EQ(l_route({3, 0}, {3, 2}, roads), (std::vector<Coord>{{3, 1}}));
}

TEST(RoadAgents, StepsArePureGivenRng) {
  SimParams p = with_radius(3);
  Fixture f(test::flat_terrain(16, 16, {8, 8}), p);
  f.road_line({4, 8}, {12, 8});
  for (std::uint64_t s = 0; s < 20; ++s) {
    RngStream a(s, 3, 1);
    RngStream b(s, 3, 1);
    const auto x = extender_step({1, AgentKind::Extender, {8, 13}}, f.view(), a);
    const auto y = extender_step({1, AgentKind::Extender, {8, 13}}, f.view(), b);
    EXPECT_EQ(x.new_position, y.new_position);
    EXPECT_EQ(x.proposal.has_value(), y.proposal.has_value());
    if (x.proposal) EXPECT_EQ(x.proposal->segment, y.proposal->segment);
  }
}
