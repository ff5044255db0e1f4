#include "citygen/engine.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <variant>

#include "citygen/errors.hpp"
#include "citygen/rng.hpp"

namespace citygen {

namespace {

using nlohmann::json;

json path_to_json(const std::vector<Coord>& path) {
  json out = json::array();
  for (const Coord p : path) out.push_back(coord_to_json(p));
  return out;
}

std::vector<Coord> path_from_json(const json& j) {
  std::vector<Coord> out;
  for (const auto& p : j) out.push_back(coord_from_json(p));
  return out;
}

constexpr std::array<AgentKind, 4> kSpawnOrder{AgentKind::Extender, AgentKind::Connector, AgentKind::Commercial,
                                                AgentKind::Residential};

int target_count(const SimParams& p, AgentKind kind) {
  switch (kind) {
    case AgentKind::Extender: return p.n_extenders;
    case AgentKind::Connector: return p.n_connectors;
    case AgentKind::Commercial: return p.n_commercial;
    case AgentKind::Residential: return p.n_residential;
  }
  return 0;
}

DeveloperKind developer_kind(AgentKind kind) {
  return kind == AgentKind::Commercial ? DeveloperKind::Commercial : DeveloperKind::Residential;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::RoadCommitted: return "road_committed";
    case EventKind::RoadRejected: return "road_rejected";
    case EventKind::Built: return "built";
    case EventKind::BuildRejected: return "build_rejected";
    case EventKind::Densified: return "densified";
    case EventKind::ParamsChanged: return "params_changed";
    case EventKind::AgentMoved: return "agent_moved";
  }
  return "?";
}

json coord_to_json(Coord p) { return json::array({p.x, p.y}); }

Coord coord_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("coordinate must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

json to_json(const Event& event) {
  json out = event.payload;
  out["tick"] = event.tick;
  out["kind"] = to_string(event.kind);
  out["agent"] = event.agent_id;
  return out;
}

Event event_from_json(const json& line) {
  try {
    Event e;
    e.tick = line.at("tick").get<std::uint64_t>();
    e.agent_id = line.at("agent").get<int>();
    const auto kind = line.at("kind").get<std::string>();
    bool known = false;
    for (const auto k : {EventKind::RoadCommitted, EventKind::RoadRejected, EventKind::Built,
                         EventKind::BuildRejected, EventKind::Densified, EventKind::ParamsChanged,
                         EventKind::AgentMoved}) {
      if (kind == to_string(k)) {
        e.kind = k;
        known = true;
      }
    }
    if (!known) throw ParseError("unknown event kind '" + kind + "'");
    e.payload = line;
    e.payload.erase("tick");
    e.payload.erase("kind");
    e.payload.erase("agent");
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("event: ") + ex.what());
  }
}

WorldState::WorldState(Terrain terrain, SimParams params, std::uint64_t rng_seed)
    : terrain_(std::make_shared<const Terrain>(std::move(terrain))),
      water_distance_(std::make_shared<const Grid<int>>(water_distance_field(*terrain_))),
      terrain_hash_(std::make_shared<const std::string>(terrain_sha256(*terrain_))),
      roads_(terrain_->width(), terrain_->height(), terrain_->seed()),
      influence_(terrain_->width(), terrain_->height(), params.service_radius),
      landuse_(terrain_->width(), terrain_->height()),
      params_(terrain_->width(), terrain_->height(), std::move(params)),
      rng_seed_(rng_seed) {
  const Coord seed = terrain_->seed();
  if (!terrain_->is_land(seed)) throw ValidationError("seed on water");
  commit_segment(roads_, influence_, RoadSegment{{seed}, RoadOrigin::Seed});
  landuse_.set_road(seed);
  reconcile_agents();
}

WorldView WorldState::view() const {
  return WorldView{*terrain_, roads_, influence_, landuse_, *water_distance_, params_};
}

void WorldState::reconcile_agents() {
  const SimParams& base = params_.base();
  for (const AgentKind kind : kSpawnOrder) {
    const int want = target_count(base, kind);
    int have = static_cast<int>(
        std::count_if(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.kind == kind; }));
    while (have > want) {
      auto it = std::find_if(agents_.rbegin(), agents_.rend(), [&](const Agent& a) { return a.kind == kind; });
      agents_.erase(std::next(it).base());
      --have;
    }
    while (have < want) {
      const int id = agents_.empty() ? 0 : agents_.back().id + 1;
      agents_.push_back({id, kind, terrain_->seed()});
      ++have;
    }
  }
}

void WorldState::sync_influence_cap() {
  const int cap = params_.max_service_radius();
  if (cap != influence_.cap()) influence_.recompute(roads_, cap);
}

void WorldState::log(EventKind kind, int agent_id, json payload) {
  events_.push_back({tick_, kind, agent_id, std::move(payload)});
}

void WorldState::step() {
  reconcile_agents();

  using Action = std::variant<RoadAction, DeveloperAction>;
  std::vector<Action> actions;
  actions.reserve(agents_.size());
  {
    const WorldView v = view();
    for (const Agent& agent : agents_) {
      RngStream rng(rng_seed_, tick_, static_cast<std::uint64_t>(agent.id));
      switch (agent.kind) {
        case AgentKind::Extender: actions.emplace_back(extender_step(agent, v, rng)); break;
        case AgentKind::Connector: actions.emplace_back(connector_step(agent, v, rng)); break;
        default: actions.emplace_back(developer_step(agent, v, rng)); break;
      }
    }
  }

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& agent = agents_[i];
    const Coord before = agent.position;
    if (const auto* road = std::get_if<RoadAction>(&actions[i])) {
      agent.position = road->new_position;
      if (road->proposal && !commit_road(agent, *road)) agent.position = road->fallback;
    } else {
      const auto& dev = std::get<DeveloperAction>(actions[i]);
      if (const auto* moved = std::get_if<DevMoved>(&dev)) {
        agent.position = moved->position;
      } else if (const auto* build = std::get_if<DevBuild>(&dev)) {
        commit_build(agent, *build);
      } else {
        commit_densify(agent, std::get<DevDensify>(dev));
      }
    }
    if (log_moves_ && !(agent.position == before)) {
      log(EventKind::AgentMoved, agent.id, {{"to", coord_to_json(agent.position)}});
    }
  }
  ++tick_;
}

void WorldState::run(std::uint64_t n_ticks) {
  for (std::uint64_t i = 0; i < n_ticks; ++i) step();
}

bool WorldState::commit_road(const Agent& agent, const RoadAction& action) {
  const Candidate& c = *action.proposal;
  const auto& path = c.segment.path;
  json payload = {{"origin", to_string(c.segment.origin)}, {"path", path_to_json(path)}};

  auto reject = [&](RejectReason reason) {
    payload["reason"] = to_string(reason);
    log(EventKind::RoadRejected, agent.id, std::move(payload));
    return false;
  };

  if (path.empty() || !terrain_->in_bounds(path.front())) return reject(RejectReason::Malformed);
  for (const Coord p : path) {
    if (terrain_->in_bounds(p) && is_built(landuse_.use(p))) return reject(RejectReason::Obstructed);
  }
  if (action.probe) {
    const ConnectorProbe& probe = *action.probe;
    const auto hops = shortest_road_path_len(roads_, probe.from, probe.target, probe.hop_limit);
    payload["from"] = coord_to_json(probe.from);
    payload["target"] = coord_to_json(probe.target);
    payload["m"] = probe.manhattan;
    payload["d"] = hops ? json(*hops) : json(nullptr);
    payload["k"] = probe.k_connect;
    payload["hop_limit"] = probe.hop_limit;
    if (!connector_rule_holds(hops, probe.k_connect, probe.manhattan)) {
      return reject(RejectReason::StaleConnectorRule);
    }
  }

  const auto attach = attach_points(path, roads_);
  const Coord junction = attach.empty() ? path.front() : attach.front();
  if (const auto verdict = check_segment(c, *terrain_, roads_, params_at(junction))) return reject(*verdict);

  commit_segment(roads_, influence_, c.segment);
  for (const Coord p : path) landuse_.set_road(p);
  payload["junction"] = coord_to_json(junction);
  log(EventKind::RoadCommitted, agent.id, std::move(payload));
  return true;
}

void WorldState::commit_build(const Agent& agent, const DevBuild& build) {
  const WorldView v = view();
  json payload = {{"use", to_string(land_use_of(build.kind))}, {"plot", path_to_json(build.plot)}};

  const char* reason = nullptr;
  for (const Coord p : build.plot) {
    if (!terrain_->in_bounds(p) || !terrain_->is_land(p)) {
      reason = "water";
    } else if (landuse_.use(p) != LandUse::Empty) {
      reason = "occupied";
    } else if (!v.serviced(p)) {
      reason = "unserviced";
    } else if (!buildable(v, p)) {
      reason = "access_reserved";
    }
    if (reason) break;
  }
  if (!reason && !fronts_road(v, build.plot)) reason = "no_frontage";
  ValueChange change;
  if (!reason) {
    change = evaluate_build(v, build.plot, build.kind, build.density);
    if (!change.improves()) reason = "no_gain";
  }
  if (reason) {
    payload["action"] = "build";
    payload["reason"] = reason;
    log(EventKind::BuildRejected, agent.id, std::move(payload));
    return;
  }

  for (const Coord p : build.plot) landuse_.build(p, land_use_of(build.kind), build.density, terrain_->elevation(p));
  payload["density"] = build.density;
  payload["v_before"] = change.before;
  payload["v_after"] = change.after;
  log(EventKind::Built, agent.id, std::move(payload));
}

void WorldState::commit_densify(const Agent& agent, const DevDensify& densify) {
  const Coord p = densify.position;
  const SimParams& params = params_at(p);
  const double from = landuse_.density(p);
  const double to = from + params.density_step;
  json payload = {{"at", coord_to_json(p)}, {"use", to_string(land_use_of(developer_kind(agent.kind)))}};

  const char* reason = nullptr;
  ValueChange change;
  if (landuse_.use(p) != land_use_of(developer_kind(agent.kind))) {
    reason = "occupied";
  } else if (to > params.max_density) {
    reason = "max_density";
  } else {
    change = evaluate_densify(view(), p, to);
    if (!change.improves()) reason = "no_gain";
  }
  if (reason) {
    payload["action"] = "densify";
    payload["reason"] = reason;
    log(EventKind::BuildRejected, agent.id, std::move(payload));
    return;
  }

  landuse_.set_density(p, to);
  payload["from"] = from;
  payload["to"] = to;
  payload["v_before"] = change.before;
  payload["v_after"] = change.after;
  log(EventKind::Densified, agent.id, std::move(payload));
}

void WorldState::set_params(const std::optional<Rect>& region, const json& partial) {
  if (region) {
    params_.set_region(*region, partial);
  } else {
    params_.set_global(partial);
  }
  sync_influence_cap();
  log(EventKind::ParamsChanged, -1,
      {{"region", region ? rect_to_json(*region) : json(nullptr)}, {"params", partial}});
}

void WorldState::relocate_agent(int id, Coord p) {
  auto it = std::find_if(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.id == id; });
  if (it == agents_.end()) throw ValidationError("no agent with id " + std::to_string(id));
  if (!terrain_->in_bounds(p)) throw ValidationError("position out of bounds");
  const WorldView v = view();
  bool ok = false;
  switch (it->kind) {
    case AgentKind::Extender: ok = extender_may_stand(v, p); break;
    case AgentKind::Connector: ok = roads_.is_road(p); break;
    default: ok = developer_may_stand(v, p); break;
  }
  if (!ok) throw ValidationError("illegal position for " + std::string(to_string(it->kind)));
  it->position = p;
}

void WorldState::apply_event(const Event& event) {
  const json& pl = event.payload;
  switch (event.kind) {
    case EventKind::RoadCommitted: {
      RoadSegment seg{path_from_json(pl.at("path")),
                      pl.at("origin") == "connector" ? RoadOrigin::Connector : RoadOrigin::Extender};
      commit_segment(roads_, influence_, seg);
      for (const Coord p : seg.path) landuse_.set_road(p);
      break;
    }
    case EventKind::Built: {
      const auto use = land_use_from_string(pl.at("use").get<std::string>()).value_or(LandUse::Commercial);
      const double density = pl.at("density").get<double>();
      for (const Coord p : path_from_json(pl.at("plot"))) landuse_.build(p, use, density, terrain_->elevation(p));
      break;
    }
    case EventKind::Densified:
      landuse_.set_density(coord_from_json(pl.at("at")), pl.at("to").get<double>());
      break;
    case EventKind::ParamsChanged:
      if (pl.at("region").is_null()) {
        params_.set_global(pl.at("params"));
      } else {
        params_.set_region(rect_from_json(pl.at("region")), pl.at("params"));
      }
      sync_influence_cap();
      break;
    default: break;
  }
}

Snapshot WorldState::snapshot() const {
  Snapshot s;
  s.tick = tick_;
  s.terrain_sha256 = *terrain_hash_;
  s.roads = roads_.mask();
  s.use = landuse_.uses();
  s.density = landuse_.densities();
  s.agents = agents_;
  s.params = params_.base();
  s.overrides = params_.overrides();
  s.rng_seed = rng_seed_;
  return s;
}

WorldState WorldState::restore(Terrain terrain, const Snapshot& snap) {
  if (terrain_sha256(terrain) != snap.terrain_sha256) throw ValidationError("snapshot belongs to a different terrain");
  if (snap.width() != terrain.width() || snap.height() != terrain.height() || snap.use.width() != terrain.width() ||
      snap.density.width() != terrain.width()) {
    throw ValidationError("snapshot dimensions do not match terrain");
  }
  SimParams base = snap.params;
  WorldState w(std::move(terrain), base, snap.rng_seed);
  w.params_.reset(std::move(base), snap.overrides);
  for (std::size_t i = 0; i < snap.roads.size(); ++i) {
    const Coord p = snap.roads.coord(i);
    const bool road = snap.roads.data()[i] != 0;
    const LandUse use = snap.use.data()[i];
    if (road != (use == LandUse::Road)) throw ValidationError("snapshot roads and use disagree");
    if (road) {
      if (!w.terrain_->is_land(p)) throw ValidationError("snapshot road on water");
      w.roads_.mark(p);
      w.landuse_.set_road(p);
    } else if (is_built(use)) {
      w.landuse_.build(p, use, snap.density.data()[i], w.terrain_->elevation(p));
    }
  }
  w.influence_.recompute(w.roads_, w.params_.max_service_radius());
  w.agents_ = snap.agents;
  w.tick_ = snap.tick;
  w.events_.clear();
  return w;
}

std::vector<std::string> validate_world(const WorldState& world) {
  std::vector<std::string> problems;
  const Terrain& t = world.terrain();
  const RoadNetwork& roads = world.roads();
  const LandUseGrid& lu = world.landuse();
  auto where = [](Coord p) { return " at (" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; };

  Grid<int> bfs(t.width(), t.height(), InfluenceField::kUnserviced);
  std::deque<Coord> queue;
  std::size_t road_total = 0;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    const Coord p = bfs.coord(i);
    const bool road = roads.is_road(p);
    if (road) {
      ++road_total;
      bfs[p] = 0;
      queue.push_back(p);
      if (!t.is_land(p)) problems.push_back("road on water" + where(p));
    }
    if (road != (lu.use(p) == LandUse::Road)) problems.push_back("road mask and land use disagree" + where(p));
    if (is_built(lu.use(p))) {
      if (!t.is_land(p)) problems.push_back("building on water" + where(p));
      if (!(lu.density(p) > 0.0)) problems.push_back("built patch with non-positive density" + where(p));
    } else if (lu.density(p) != 0.0) {
      problems.push_back("unbuilt patch with density" + where(p));
    }
  }

  const int cap = world.influence().cap();
  while (!queue.empty()) {
    const Coord p = queue.front();
    queue.pop_front();
    if (bfs[p] + 1 > cap) continue;
    for (const Coord d : kNeighbors4) {
      const Coord q = p + d;
      if (!bfs.in_bounds(q) || bfs[q] != InfluenceField::kUnserviced) continue;
      bfs[q] = bfs[p] + 1;
      queue.push_back(q);
    }
  }
  if (!(bfs == world.influence().grid())) problems.push_back("influence field differs from capped BFS");

  Grid<std::uint8_t> reached(t.width(), t.height(), 0);
  std::size_t reached_count = 0;
  if (roads.is_road(roads.seed())) {
    queue.push_back(roads.seed());
    reached[roads.seed()] = 1;
    while (!queue.empty()) {
      const Coord p = queue.front();
      queue.pop_front();
      ++reached_count;
      for (const Coord d : kNeighbors4) {
        const Coord q = p + d;
        if (roads.is_road(q) && reached[q] == 0) {
          reached[q] = 1;
          queue.push_back(q);
        }
      }
    }
  } else {
    problems.push_back("seed patch is not a road");
  }
  if (reached_count != road_total) problems.push_back("road network is disconnected from the seed");

  for (const Agent& a : world.agents()) {
    if (!t.in_bounds(a.position)) {
      problems.push_back("agent out of bounds");
      continue;
    }
    if (a.kind == AgentKind::Connector && !roads.is_road(a.position)) {
      problems.push_back("connector off the road" + where(a.position));
    }
    if (a.kind != AgentKind::Connector && !t.is_land(a.position)) {
      problems.push_back("agent on water" + where(a.position));
    }
  }
  return problems;
}

}  // namespace citygen
