#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citygen/engine.hpp"

namespace citygen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitIoError = 3;

/// A parameter change applied just before the given tick runs.
struct ScriptEntry {
  std::uint64_t tick = 0;
  std::optional<Rect> region;
  nlohmann::json params;
};

/// Parses [{"tick":n,"region":null|{x,y,w,h},"params":{...}}, ...] and
/// stable-sorts by tick. Throws ParseError.
std::vector<ScriptEntry> parse_override_script(const nlohmann::json& doc);

struct RunConfig {
  std::filesystem::path terrain_path;
  std::optional<std::filesystem::path> params_path;
  std::uint64_t rng_seed = 0;
  std::uint64_t n_ticks = 0;
  std::optional<std::uint64_t> snapshot_every;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> script_path;
};

/// Raised for unreadable or unwritable files; maps to kExitIoError.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// Reads and validates a terrain file, sniffing the format.
Terrain read_terrain_file(const std::filesystem::path& path);
/// Defaults overlaid with the JSON parameter file.
SimParams read_params_file(const std::filesystem::path& path);

/// Writes snapshot_{tick}.json, city_{tick}.png and roads_{tick}.graph.json.
void write_tick_artifacts(const WorldState& world, const std::filesystem::path& dir);
/// One JSON object per line, AgentMoved entries included only if logged.
std::string events_jsonl(const std::vector<Event>& events);

/// Headless run. Artifacts every snapshot_every ticks (tick 0 included) and
/// at the final tick, then events.jsonl. Diagnostics go to `diag`.
int run_batch(const RunConfig& config, std::ostream& diag);

}  // namespace citygen
