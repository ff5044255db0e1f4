#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "citygen/agents.hpp"
#include "citygen/developers.hpp"
#include "citygen/landuse.hpp"
#include "citygen/params.hpp"
#include "citygen/road_agents.hpp"
#include "citygen/roadnet.hpp"
#include "citygen/snapshot.hpp"
#include "citygen/terrain.hpp"
#include "citygen/view.hpp"

namespace citygen {

enum class EventKind : std::uint8_t {
  RoadCommitted,
  RoadRejected,
  Built,
  BuildRejected,
  Densified,
  ParamsChanged,
  AgentMoved,
};

std::string_view to_string(EventKind kind);

/// One entry of the append-only event log. The payload carries everything
/// needed to replay or audit the event; agent_id is -1 for operator events.
struct Event {
  std::uint64_t tick = 0;
  EventKind kind = EventKind::RoadCommitted;
  int agent_id = -1;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const Event&, const Event&) = default;
};

/// {"tick":..,"kind":..,"agent":..} merged with the payload fields.
nlohmann::json to_json(const Event& event);
Event event_from_json(const nlohmann::json& line);

/// The single mutable simulation object.
class WorldState {
 public:
  /// Places the seed road, stamps its influence and spawns the agents at the
  /// seed point. tick starts at 0.
  WorldState(Terrain terrain, SimParams params, std::uint64_t rng_seed);

  /// Rebuilds a world from a snapshot of it. Throws ValidationError if the
  /// snapshot does not belong to this terrain.
  static WorldState restore(Terrain terrain, const Snapshot& snapshot);

  const Terrain& terrain() const { return *terrain_; }
  const RoadNetwork& roads() const { return roads_; }
  const InfluenceField& influence() const { return influence_; }
  const LandUseGrid& landuse() const { return landuse_; }
  const Grid<int>& water_distance() const { return *water_distance_; }
  const std::vector<Agent>& agents() const { return agents_; }
  std::uint64_t tick() const { return tick_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  const SimParams& base_params() const { return params_.base(); }
  const std::vector<RegionOverride>& overrides() const { return params_.overrides(); }
  const std::vector<Event>& events() const { return events_; }
  const std::string& terrain_hash() const { return *terrain_hash_; }

  WorldView view() const;
  const SimParams& params_at(Coord p) const { return params_.at(p); }

  /// One tick: every agent proposes against the tick-start state, then the
  /// proposals are re-validated and committed one by one in agent-id order.
  void step();
  void run(std::uint64_t n_ticks);

  /// Global update when region is empty, else a rectangular override. Takes
  /// effect from the next tick. Throws InvalidParam.
  void set_params(const std::optional<Rect>& region, const nlohmann::json& partial);

  /// Moves an agent (operator/test hook). Throws ValidationError if the
  /// position is illegal for the agent's kind.
  void relocate_agent(int id, Coord p);

  /// AgentMoved events are suppressed unless enabled.
  void set_log_moves(bool enabled) { log_moves_ = enabled; }

  /// Re-applies a committed event (road, build, densify, params) without
  /// re-checking it. Other kinds are ignored. Used for log replay.
  void apply_event(const Event& event);

  Snapshot snapshot() const;

 private:
  void reconcile_agents();
  void sync_influence_cap();
  bool commit_road(const Agent& agent, const RoadAction& action);
  void commit_build(const Agent& agent, const DevBuild& build);
  void commit_densify(const Agent& agent, const DevDensify& densify);
  void log(EventKind kind, int agent_id, nlohmann::json payload);

  std::shared_ptr<const Terrain> terrain_;
  std::shared_ptr<const Grid<int>> water_distance_;
  std::shared_ptr<const std::string> terrain_hash_;
  RoadNetwork roads_;
  InfluenceField influence_;
  LandUseGrid landuse_;
  ParamResolver params_;
  std::vector<Agent> agents_;
  std::uint64_t tick_ = 0;
  std::uint64_t rng_seed_ = 0;
  std::vector<Event> events_;
  bool log_moves_ = false;
};

inline WorldState init_world(Terrain terrain, SimParams params, std::uint64_t rng_seed) {
  return WorldState(std::move(terrain), std::move(params), rng_seed);
}

/// Joint invariant check: roads on land and connected to the seed, land use
/// consistent with roads, influence equal to a fresh capped BFS, built
/// patches on land with positive density, agents on legal patches.
/// Returns one message per violation.
std::vector<std::string> validate_world(const WorldState& world);

nlohmann::json coord_to_json(Coord p);
Coord coord_from_json(const nlohmann::json& j);

}  // namespace citygen
