#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "citygen/grid.hpp"

namespace citygen {

struct ValueWeights {
  double w_road = 1.0;       ///< sign flips with developer kind
  double w_cluster = 0.6;
  double w_disparity = 0.4;
  double w_water = 0.3;
  double w_elevation = 0.2;
  double elevation_band = 0.1;

  friend bool operator==(const ValueWeights&, const ValueWeights&) = default;
};

/// Every tunable constant of the simulation. std::nullopt on grid_spacing and
/// grid_deviation_max means Unbounded. std::nullopt on the four derived limits
/// means "follow service_radius" (see the effective_* accessors).
struct SimParams {
  double k_connect = 2.0;
  std::optional<int> grid_spacing = 8;
  std::optional<int> grid_deviation_max;
  int service_radius = 4;
  int sample_radius = 6;
  int density_radius = 3;
  double max_road_density = 0.35;
  int min_intersection_spacing = 3;
  std::optional<double> max_start_deviation;
  std::optional<int> max_roam_from_developed;
  std::optional<int> connector_bfs_limit;
  std::optional<int> max_developer_leash;
  int n_extenders = 4;
  int n_connectors = 2;
  int n_commercial = 6;
  int n_residential = 10;
  ValueWeights weights;
  double density_step = 1.0;
  double max_density = 8.0;
  double route_elevation_weight = 4.0;

  double effective_max_start_deviation() const;   ///< default 2 * service_radius
  int effective_max_roam_from_developed() const;  ///< default 2 * service_radius
  int effective_connector_bfs_limit() const;      ///< default ceil(k_connect * sample_radius * 4)
  int effective_max_developer_leash() const;      ///< default service_radius

  /// Throws InvalidParam naming the first field that breaks an invariant.
  void validate() const;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

/// Flat JSON object with one key per field; null encodes Unbounded / derived.
nlohmann::json to_json(const SimParams& params);

/// Overlays a partial JSON object onto params. Unknown keys, wrong types and
/// invariant violations throw InvalidParam; params is left untouched on error.
void apply_partial(SimParams& params, const nlohmann::json& partial);

/// Defaults overlaid with a complete or partial JSON document.
SimParams params_from_json(const nlohmann::json& doc);

/// True if the partial mentions a field that only makes sense globally.
bool touches_global_only_fields(const nlohmann::json& partial);

struct RegionOverride {
  Rect rect;
  nlohmann::json overrides;  ///< partial SimParams object

  friend bool operator==(const RegionOverride&, const RegionOverride&) = default;
};

/// Resolves the effective parameters at a patch: base params overlaid with
/// every override whose rectangle contains the patch, in list order.
/// Resolved parameter sets are cached per distinct override combination.
class ParamResolver {
 public:
  ParamResolver(int width, int height, SimParams base);

  const SimParams& base() const { return base_; }
  const std::vector<RegionOverride>& overrides() const { return overrides_; }
  const SimParams& at(Coord p) const { return resolved_[combo_[p]]; }

  /// Largest service radius in effect anywhere on the grid.
  int max_service_radius() const;

  /// Merges partial into the base. Throws InvalidParam.
  void set_global(const nlohmann::json& partial);
  /// Adds an override for rect, or merges into an existing override with the
  /// same rect and moves it to the end of the list. Throws InvalidParam.
  void set_region(const Rect& rect, const nlohmann::json& partial);
  /// Replaces base and override list wholesale (used when restoring).
  void reset(SimParams base, std::vector<RegionOverride> overrides);

 private:
  void rebuild();

  int width_;
  int height_;
  SimParams base_;
  std::vector<RegionOverride> overrides_;
  Grid<std::uint16_t> combo_;
  std::vector<SimParams> resolved_;
};

nlohmann::json rect_to_json(const Rect& r);
/// Throws InvalidParam on malformed input.
Rect rect_from_json(const nlohmann::json& j);

}  // namespace citygen
