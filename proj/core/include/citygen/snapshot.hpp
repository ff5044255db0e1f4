#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citygen/agents.hpp"
#include "citygen/grid.hpp"
#include "citygen/landuse.hpp"
#include "citygen/params.hpp"

namespace citygen {

/// Canonical, order-normalized view of a world. Agents are sorted by id.
struct Snapshot {
  std::uint64_t tick = 0;
  std::string terrain_sha256;
  Grid<std::uint8_t> roads;
  Grid<LandUse> use;
  Grid<double> density;
  std::vector<Agent> agents;
  SimParams params;
  std::vector<RegionOverride> overrides;
  std::uint64_t rng_seed = 0;

  int width() const { return roads.width(); }
  int height() const { return roads.height(); }

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Grids are emitted as arrays of rows (row 0 first); keys are sorted and
/// reals use the shortest representation that round-trips.
nlohmann::json to_json(const Snapshot& snapshot);
std::string to_canonical_json(const Snapshot& snapshot);
/// Throws ParseError on schema violations.
Snapshot snapshot_from_json(const nlohmann::json& doc);

nlohmann::json agent_to_json(const Agent& agent);
/// Throws ParseError.
Agent agent_from_json(const nlohmann::json& j);

/// A patch whose state differs between two snapshots of the same world.
struct PatchChange {
  Coord p;
  LandUse use;
  double density;
  bool road;
};

/// Row-major list of patches that differ between `from` and `to`.
std::vector<PatchChange> diff_patches(const Snapshot& from, const Snapshot& to);
nlohmann::json to_json(const PatchChange& change);
/// Applies patch changes in place. Throws ParseError on malformed entries.
void apply_patch_changes(Snapshot& snapshot, const nlohmann::json& patches);

}  // namespace citygen
