#include <citygen/engine.hpp>
#include <citygen/errors.hpp>
#include <citygen/island.hpp>
#include <citygen/snapshot.hpp>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace citygen;
using nlohmann::json;

TEST(Snapshot, TickZeroTwiceIdenticalBytes) {
  const Terrain t = generate_island(32, 32, 1);
  const WorldState w(t, SimParams{}, 3);
  EXPECT_EQ(to_canonical_json(w.snapshot()), to_canonical_json(w.snapshot()));
  EXPECT_EQ(to_canonical_json(WorldState(t, SimParams{}, 3).snapshot()), to_canonical_json(w.snapshot()));
}

TEST(Snapshot, Layout) {
  const Terrain t = test::flat_terrain(5, 3, {1, 1});
  const WorldState w(t, test::no_agents(), 3);
  const json j = to_json(w.snapshot());
  EXPECT_EQ(j.at("roads").size(), 3u);
  EXPECT_EQ(j.at("roads")[0].size(), 5u);
  EXPECT_EQ(j.at("roads")[1][1], true);
  EXPECT_EQ(j.at("use")[1][1], 1);
  EXPECT_EQ(j.at("terrain_sha256"), terrain_sha256(t));
  EXPECT_EQ(j.at("rng_seed"), 3);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  const std::string bytes = to_canonical_json(w.snapshot());
  EXPECT_EQ(bytes.find('\n'), std::string::npos);
}

TEST(Snapshot, RestoreRoundTripBytes) {
  const Terrain t = generate_island(40, 40, 2);
  WorldState w(t, SimParams{}, 8);
  w.run(60);
  w.set_params(Rect{3, 3, 10, 12}, {{"w_cluster", 1.2}, {"service_radius", 5}});
  w.run(60);
  const std::string bytes = to_canonical_json(w.snapshot());
  const Snapshot parsed = snapshot_from_json(json::parse(bytes));
  EXPECT_EQ(parsed, w.snapshot());
  const WorldState back = WorldState::restore(t, parsed);
  EXPECT_EQ(to_canonical_json(back.snapshot()), bytes);
  EXPECT_TRUE(validate_world(back).empty());
}

TEST(Snapshot, RestoredWorldContinuesIdentically) {
  const Terrain t = generate_island(40, 40, 3);
  WorldState w(t, SimParams{}, 21);
  w.run(100);
  WorldState r = WorldState::restore(t, snapshot_from_json(to_json(w.snapshot())));
  w.run(100);
  r.run(100);
  EXPECT_EQ(r.snapshot(), w.snapshot());
}

TEST(Snapshot, IdenticallySeededRunsMatchAtEveryCheckpoint) {
  const Terrain t = generate_island(40, 40, 4);
  WorldState a(t, SimParams{}, 2);
  WorldState b(t, SimParams{}, 2);
  for (int i = 0; i < 5; ++i) {
    a.run(40);
    b.run(40);
    ASSERT_EQ(to_canonical_json(a.snapshot()), to_canonical_json(b.snapshot()));
  }
}

TEST(Snapshot, RestoreRejectsForeignTerrain) {
  const WorldState w(generate_island(20, 20, 1), SimParams{}, 1);
  EXPECT_THROW(WorldState::restore(generate_island(20, 20, 2), w.snapshot()), ValidationError);
}

TEST(Snapshot, MalformedDocuments) {
  const WorldState w(generate_island(12, 12, 1), SimParams{}, 1);
  const json good = to_json(w.snapshot());
  EXPECT_NO_THROW(snapshot_from_json(good));
  EXPECT_THROW(snapshot_from_json(json::array()), ParseError);
  for (const char* key : {"tick", "roads", "use", "density", "agents", "params", "overrides", "rng_seed"}) {
    json bad = good;
    bad.erase(key);
    EXPECT_THROW(snapshot_from_json(bad), ParseError) << key;
  }
  json ragged = good;
  ragged["use"][2].erase(0);
  EXPECT_THROW(snapshot_from_json(ragged), ParseError);
  json bad_use = good;
  bad_use["use"][0][0] = 9;
  EXPECT_THROW(snapshot_from_json(bad_use), ParseError);
  json bad_agent = good;
  bad_agent["agents"][0]["kind"] = "mayor";
  EXPECT_THROW(snapshot_from_json(bad_agent), ParseError);
  json bad_params = good;
  bad_params["params"]["k_connect"] = 0.0;
  EXPECT_THROW(snapshot_from_json(bad_params), ParseError);
}

TEST(Snapshot, AgentJson) {
  const Agent a{7, AgentKind::Residential, {3, 4}};
  EXPECT_EQ(agent_from_json(agent_to_json(a)), a);
  EXPECT_THROW(agent_from_json({{"id", 1}}), ParseError);
}

TEST(Snapshot, PatchDiffsReconstruct) {
  const Terrain t = generate_island(40, 40, 5);
  WorldState w(t, SimParams{}, 4);
  Snapshot mirror = w.snapshot();
  for (int i = 0; i < 30; ++i) {
    const Snapshot before = w.snapshot();
    w.run(7);
    const Snapshot after = w.snapshot();
    const auto changes = diff_patches(before, after);
    json patches = json::array();
    for (const auto& c : changes) patches.push_back(to_json(c));
    apply_patch_changes(mirror, patches);
    mirror.tick = after.tick;
    mirror.agents = after.agents;
    ASSERT_EQ(mirror, after);
  }
  EXPECT_THROW(apply_patch_changes(mirror, json::array({{{"x", 999}, {"y", 0}}})), ParseError);
}

TEST(Snapshot, DiffListsOnlyChangedPatchesRowMajor) {
  const WorldState w(test::flat_terrain(6, 6, {2, 2}), test::no_agents(), 1);
  Snapshot a = w.snapshot();
  Snapshot b = a;
  b.use[{4, 1}] = LandUse::Commercial;
  b.density[{4, 1}] = 2.0;
  b.use[{1, 3}] = LandUse::Residential;
  b.density[{1, 3}] = 1.0;
  const auto d = diff_patches(a, b);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].p, (Coord{4, 1}));
  EXPECT_EQ(d[1].p, (Coord{1, 3}));
  EXPECT_EQ(d[0].use, LandUse::Commercial);
  EXPECT_EQ(d[0].density, 2.0);
  EXPECT_FALSE(d[0].road);
  EXPECT_TRUE(diff_patches(a, a).empty());
}
