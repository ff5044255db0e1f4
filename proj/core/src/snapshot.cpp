#include "citygen/snapshot.hpp"

#include <algorithm>

#include "citygen/errors.hpp"

namespace citygen {

namespace {

using nlohmann::json;

template <typename T, typename Fn>
json rows(const Grid<T>& g, Fn&& cell) {
  json out = json::array();
  for (int y = 0; y < g.height(); ++y) {
    json row = json::array();
    for (int x = 0; x < g.width(); ++x) row.push_back(cell(g[{x, y}]));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename T, typename Fn>
Grid<T> grid_from_rows(const json& j, const char* name, int width, int height, Fn&& cell) {
  if (!j.is_array() || static_cast<int>(j.size()) != height) {
    throw ParseError(std::string("snapshot '") + name + "' has the wrong number of rows");
  }
  Grid<T> g(width, height);
  for (int y = 0; y < height; ++y) {
    const auto& row = j[static_cast<std::size_t>(y)];
    if (!row.is_array() || static_cast<int>(row.size()) != width) {
      throw ParseError(std::string("snapshot '") + name + "' has a ragged row");
    }
    for (int x = 0; x < width; ++x) g[{x, y}] = cell(row[static_cast<std::size_t>(x)]);
  }
  return g;
}

const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("snapshot missing '") + key + "'");
  return doc.at(key);
}

LandUse use_from_int(const json& v) {
  if (!v.is_number_integer()) throw ParseError("use entries must be integers");
  const int u = v.get<int>();
  if (u < 0 || u > 3) throw ParseError("use entries must be 0..3");
  return static_cast<LandUse>(u);
}

}  // namespace

json agent_to_json(const Agent& agent) {
  return {{"id", agent.id}, {"kind", to_string(agent.kind)}, {"x", agent.position.x}, {"y", agent.position.y}};
}

Agent agent_from_json(const json& j) {
  try {
    const auto kind = agent_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown agent kind");
    return {j.at("id").get<int>(), *kind, {j.at("x").get<int>(), j.at("y").get<int>()}};
  } catch (const json::exception& e) {
    throw ParseError(std::string("agent: ") + e.what());
  }
}

json to_json(const Snapshot& s) {
  json agents = json::array();
  for (const auto& a : s.agents) agents.push_back(agent_to_json(a));
  json overrides = json::array();
  for (const auto& o : s.overrides) overrides.push_back({{"rect", rect_to_json(o.rect)}, {"params", o.overrides}});
  return {
      {"tick", s.tick},
      {"terrain_sha256", s.terrain_sha256},
      {"roads", rows(s.roads, [](std::uint8_t r) { return r != 0; })},
      {"use", rows(s.use, [](LandUse u) { return static_cast<int>(u); })},
      {"density", rows(s.density, [](double d) { return d; })},
      {"agents", std::move(agents)},
      {"params", to_json(s.params)},
      {"overrides", std::move(overrides)},
      {"rng_seed", s.rng_seed},
  };
}

std::string to_canonical_json(const Snapshot& snapshot) { return to_json(snapshot).dump(); }

Snapshot snapshot_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("snapshot must be a JSON object");
  try {
    Snapshot s;
    s.tick = field(doc, "tick").get<std::uint64_t>();
    s.terrain_sha256 = field(doc, "terrain_sha256").get<std::string>();
    s.rng_seed = field(doc, "rng_seed").get<std::uint64_t>();

    const auto& roads = field(doc, "roads");
    if (!roads.is_array() || roads.empty() || !roads[0].is_array() || roads[0].empty()) {
      throw ParseError("snapshot 'roads' must be a non-empty array of rows");
    }
    const int height = static_cast<int>(roads.size());
    const int width = static_cast<int>(roads[0].size());
    s.roads = grid_from_rows<std::uint8_t>(roads, "roads", width, height, [](const json& v) -> std::uint8_t {
      if (!v.is_boolean()) throw ParseError("roads entries must be booleans");
      return v.get<bool>() ? 1 : 0;
    });
    s.use = grid_from_rows<LandUse>(field(doc, "use"), "use", width, height, use_from_int);
    s.density = grid_from_rows<double>(field(doc, "density"), "density", width, height, [](const json& v) {
      if (!v.is_number()) throw ParseError("density entries must be numbers");
      return v.get<double>();
    });

    for (const auto& a : field(doc, "agents")) s.agents.push_back(agent_from_json(a));
    std::sort(s.agents.begin(), s.agents.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });

    s.params = params_from_json(field(doc, "params"));
    for (const auto& o : field(doc, "overrides")) {
      s.overrides.push_back({rect_from_json(o.at("rect")), o.at("params")});
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("snapshot: ") + e.what());
  } catch (const InvalidParam& e) {
    throw ParseError(std::string("snapshot params: ") + e.what());
  }
}

std::vector<PatchChange> diff_patches(const Snapshot& from, const Snapshot& to) {
  std::vector<PatchChange> out;
  for (std::size_t i = 0; i < to.roads.size(); ++i) {
    const bool changed = from.roads.data()[i] != to.roads.data()[i] || from.use.data()[i] != to.use.data()[i] ||
                         from.density.data()[i] != to.density.data()[i];
    if (!changed) continue;
    out.push_back({to.roads.coord(i), to.use.data()[i], to.density.data()[i], to.roads.data()[i] != 0});
  }
  return out;
}

json to_json(const PatchChange& c) {
  return {{"x", c.p.x}, {"y", c.p.y}, {"use", static_cast<int>(c.use)}, {"density", c.density}, {"road", c.road}};
}

void apply_patch_changes(Snapshot& s, const json& patches) {
  try {
    for (const auto& c : patches) {
      const Coord p{c.at("x").get<int>(), c.at("y").get<int>()};
      if (!s.roads.in_bounds(p)) throw ParseError("patch change out of bounds");
      s.use[p] = use_from_int(c.at("use"));
      s.density[p] = c.at("density").get<double>();
      s.roads[p] = c.at("road").get<bool>() ? 1 : 0;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("patch change: ") + e.what());
  }
}

}  // namespace citygen
