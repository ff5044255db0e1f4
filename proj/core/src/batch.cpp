#include "citygen/batch.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "citygen/errors.hpp"
#include "citygen/raster.hpp"
#include "citygen/road_graph.hpp"

namespace citygen {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

namespace {

json parse_json_file(const fs::path& path) {
  const std::string bytes = read_file(path);
  try {
    return json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace

Terrain read_terrain_file(const fs::path& path) {
  const std::string bytes = read_file(path);
  return load_terrain(bytes, sniff_terrain_format(bytes));
}

SimParams read_params_file(const fs::path& path) {
  try {
    return params_from_json(parse_json_file(path));
  } catch (const InvalidParam& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

std::vector<ScriptEntry> parse_override_script(const json& doc) {
  if (!doc.is_array()) throw ParseError("override script must be a JSON array");
  std::vector<ScriptEntry> out;
  try {
    for (const auto& e : doc) {
      ScriptEntry entry;
      const auto& tick = e.at("tick");
      if (!tick.is_number_unsigned() && !(tick.is_number_integer() && tick.get<std::int64_t>() >= 0)) {
        throw ParseError("script tick must be a non-negative integer");
      }
      entry.tick = tick.get<std::uint64_t>();
      if (e.contains("region") && !e.at("region").is_null()) entry.region = rect_from_json(e.at("region"));
      entry.params = e.at("params");
      if (!entry.params.is_object()) throw ParseError("script params must be an object");
      out.push_back(std::move(entry));
    }
  } catch (const json::exception& ex) {
    throw ParseError(std::string("override script: ") + ex.what());
  } catch (const InvalidParam& ex) {
    throw ParseError(std::string("override script: ") + ex.what());
  }
  std::stable_sort(out.begin(), out.end(), [](const ScriptEntry& a, const ScriptEntry& b) { return a.tick < b.tick; });
  return out;
}

void write_tick_artifacts(const WorldState& world, const fs::path& dir) {
  const Snapshot snap = world.snapshot();
  const std::string tick = std::to_string(world.tick());
  write_file(dir / ("snapshot_" + tick + ".json"), to_canonical_json(snap));
  write_file(dir / ("city_" + tick + ".png"), render_raster(world.terrain(), snap));
  write_file(dir / ("roads_" + tick + ".graph.json"),
             to_json(export_road_graph(snap.roads, world.terrain().seed())).dump());
}

std::string events_jsonl(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

int run_batch(const RunConfig& config, std::ostream& diag) {
  try {
    Terrain terrain = read_terrain_file(config.terrain_path);
    SimParams params = config.params_path ? read_params_file(*config.params_path) : SimParams{};
    std::vector<ScriptEntry> script;
    if (config.script_path) script = parse_override_script(parse_json_file(*config.script_path));
    if (config.snapshot_every && *config.snapshot_every == 0) throw ValidationError("--every must be >= 1");

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create '" + config.output_dir.string() + "': " + ec.message());

    WorldState world(std::move(terrain), std::move(params), config.rng_seed);
    std::size_t next = 0;
    for (std::uint64_t t = 0;; ++t) {
      while (next < script.size() && script[next].tick == t) {
        try {
          world.set_params(script[next].region, script[next].params);
        } catch (const InvalidParam& e) {
          throw ValidationError("override script entry for tick " + std::to_string(t) + ": " + e.what());
        }
        ++next;
      }
      const bool periodic = config.snapshot_every && t % *config.snapshot_every == 0;
      if (periodic || t == config.n_ticks) write_tick_artifacts(world, config.output_dir);
      if (t == config.n_ticks) break;
      world.step();
    }
    if (next < script.size()) diag << "warning: " << script.size() - next << " script entries after the last tick\n";
    write_file(config.output_dir / "events.jsonl", events_jsonl(world.events()));
    return kExitOk;
  } catch (const IoError& e) {
    diag << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const Error& e) {
    diag << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace citygen
