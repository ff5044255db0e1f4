#include "citygen/params.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "citygen/errors.hpp"

namespace citygen {

namespace {

using nlohmann::json;

double get_real(const json& v, const std::string& name) {
  if (!v.is_number()) throw InvalidParam(name + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidParam(name + " must be finite");
  return d;
}

int get_int(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw InvalidParam(name + " must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw InvalidParam(name + " out of range");
  }
  return static_cast<int>(i);
}

struct Field {
  const char* name;
  std::function<json(const SimParams&)> read;
  std::function<void(SimParams&, const json&)> write;
};

template <typename M>
Field real_field(const char* name, M member) {
  return {name, [member](const SimParams& p) { return json(p.*member); },
          [name, member](SimParams& p, const json& v) { p.*member = get_real(v, name); }};
}

template <typename M>
Field int_field(const char* name, M member) {
  return {name, [member](const SimParams& p) { return json(p.*member); },
          [name, member](SimParams& p, const json& v) { p.*member = get_int(v, name); }};
}

template <typename M>
Field opt_int_field(const char* name, M member) {
  return {name,
          [member](const SimParams& p) { return (p.*member) ? json(*(p.*member)) : json(nullptr); },
          [name, member](SimParams& p, const json& v) {
            if (v.is_null()) {
              p.*member = std::nullopt;
            } else {
              p.*member = get_int(v, name);
            }
          }};
}

template <typename M>
Field opt_real_field(const char* name, M member) {
  return {name,
          [member](const SimParams& p) { return (p.*member) ? json(*(p.*member)) : json(nullptr); },
          [name, member](SimParams& p, const json& v) {
            if (v.is_null()) {
              p.*member = std::nullopt;
            } else {
              p.*member = get_real(v, name);
            }
          }};
}

template <typename M>
Field weight_field(const char* name, M member) {
  return {name, [member](const SimParams& p) { return json(p.weights.*member); },
          [name, member](SimParams& p, const json& v) { p.weights.*member = get_real(v, name); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      real_field("k_connect", &SimParams::k_connect),
      opt_int_field("grid_spacing", &SimParams::grid_spacing),
      opt_int_field("grid_deviation_max", &SimParams::grid_deviation_max),
      int_field("service_radius", &SimParams::service_radius),
      int_field("sample_radius", &SimParams::sample_radius),
      int_field("density_radius", &SimParams::density_radius),
      real_field("max_road_density", &SimParams::max_road_density),
      int_field("min_intersection_spacing", &SimParams::min_intersection_spacing),
      opt_real_field("max_start_deviation", &SimParams::max_start_deviation),
      opt_int_field("max_roam_from_developed", &SimParams::max_roam_from_developed),
      opt_int_field("connector_bfs_limit", &SimParams::connector_bfs_limit),
      opt_int_field("max_developer_leash", &SimParams::max_developer_leash),
      int_field("n_extenders", &SimParams::n_extenders),
      int_field("n_connectors", &SimParams::n_connectors),
      int_field("n_commercial", &SimParams::n_commercial),
      int_field("n_residential", &SimParams::n_residential),
      weight_field("w_road", &ValueWeights::w_road),
      weight_field("w_cluster", &ValueWeights::w_cluster),
      weight_field("w_disparity", &ValueWeights::w_disparity),
      weight_field("w_water", &ValueWeights::w_water),
      weight_field("w_elevation", &ValueWeights::w_elevation),
      weight_field("elevation_band", &ValueWeights::elevation_band),
      real_field("density_step", &SimParams::density_step),
      real_field("max_density", &SimParams::max_density),
      real_field("route_elevation_weight", &SimParams::route_elevation_weight),
  };
  return kFields;
}

const Field* find_field(const std::string& name) {
  for (const auto& f : fields()) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

void require(bool ok, const char* message) {
  if (!ok) throw InvalidParam(message);
}

}  // namespace

double SimParams::effective_max_start_deviation() const {
  return max_start_deviation.value_or(2.0 * service_radius);
}

int SimParams::effective_max_roam_from_developed() const {
  return max_roam_from_developed.value_or(2 * service_radius);
}

int SimParams::effective_connector_bfs_limit() const {
  if (connector_bfs_limit) return *connector_bfs_limit;
  return static_cast<int>(std::ceil(k_connect * sample_radius * 4.0));
}

int SimParams::effective_max_developer_leash() const { return max_developer_leash.value_or(service_radius); }

void SimParams::validate() const {
  constexpr int kMaxRadius = 4096;
  constexpr int kMaxAgents = 100000;
  require(std::isfinite(k_connect) && k_connect >= 1.0, "k_connect must be >= 1");
  require(!grid_spacing || (*grid_spacing >= 1 && *grid_spacing <= kMaxRadius), "grid_spacing must be >= 1");
  require(!grid_deviation_max || *grid_deviation_max >= 0, "grid_deviation_max must be >= 0");
  require(service_radius >= 1 && service_radius <= kMaxRadius, "service_radius must be >= 1");
  require(sample_radius >= 1 && sample_radius <= kMaxRadius, "sample_radius must be >= 1");
  require(density_radius >= 1 && density_radius <= kMaxRadius, "density_radius must be >= 1");
  require(std::isfinite(max_road_density) && max_road_density > 0.0 && max_road_density <= 1.0,
          "max_road_density must be in (0,1]");
  require(min_intersection_spacing >= 0 && min_intersection_spacing <= kMaxRadius,
          "min_intersection_spacing must be >= 0");
  require(!max_start_deviation || (std::isfinite(*max_start_deviation) && *max_start_deviation > 0.0),
          "max_start_deviation must be > 0");
  require(!max_roam_from_developed || (*max_roam_from_developed >= 1 && *max_roam_from_developed <= kMaxRadius),
          "max_roam_from_developed must be >= 1");
  require(!connector_bfs_limit || *connector_bfs_limit >= 1, "connector_bfs_limit must be >= 1");
  require(!max_developer_leash || (*max_developer_leash >= 1 && *max_developer_leash <= kMaxRadius),
          "max_developer_leash must be >= 1");
  for (const int n : {n_extenders, n_connectors, n_commercial, n_residential}) {
    require(n >= 0 && n <= kMaxAgents, "agent counts must be >= 0");
  }
  require(std::isfinite(weights.w_road), "w_road must be finite");
  require(std::isfinite(weights.w_cluster) && weights.w_cluster >= 0.0, "w_cluster must be >= 0");
  require(std::isfinite(weights.w_disparity) && weights.w_disparity >= 0.0, "w_disparity must be >= 0");
  require(std::isfinite(weights.w_water) && weights.w_water >= 0.0, "w_water must be >= 0");
  require(std::isfinite(weights.w_elevation) && weights.w_elevation >= 0.0, "w_elevation must be >= 0");
  require(std::isfinite(weights.elevation_band) && weights.elevation_band > 0.0, "elevation_band must be > 0");
  require(std::isfinite(density_step) && density_step > 0.0, "density_step must be > 0");
  require(std::isfinite(max_density) && max_density > 0.0, "max_density must be > 0");
  require(std::isfinite(route_elevation_weight) && route_elevation_weight >= 0.0,
          "route_elevation_weight must be >= 0");
}

json to_json(const SimParams& params) {
  json out = json::object();
  for (const auto& f : fields()) out[f.name] = f.read(params);
  return out;
}

void apply_partial(SimParams& params, const json& partial) {
  if (!partial.is_object()) throw InvalidParam("parameter update must be a JSON object");
  SimParams next = params;
  for (const auto& [key, value] : partial.items()) {
    const Field* f = find_field(key);
    if (f == nullptr) throw InvalidParam("unknown parameter '" + key + "'");
    f->write(next, value);
  }
  next.validate();
  params = next;
}

SimParams params_from_json(const json& doc) {
  SimParams p;
  apply_partial(p, doc);
  return p;
}

bool touches_global_only_fields(const json& partial) {
  for (const char* name : {"n_extenders", "n_connectors", "n_commercial", "n_residential"}) {
    if (partial.contains(name)) return true;
  }
  return false;
}

json rect_to_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

Rect rect_from_json(const json& j) {
  if (!j.is_object()) throw InvalidParam("region must be an object {x,y,w,h}");
  Rect r;
  for (const auto& [key, value] : j.items()) {
    if (key == "x") {
      r.x = get_int(value, "region.x");
    } else if (key == "y") {
      r.y = get_int(value, "region.y");
    } else if (key == "w") {
      r.w = get_int(value, "region.w");
    } else if (key == "h") {
      r.h = get_int(value, "region.h");
    } else {
      throw InvalidParam("unexpected region key '" + key + "'");
    }
  }
  for (const char* k : {"x", "y", "w", "h"}) {
    if (!j.contains(k)) throw InvalidParam(std::string("region missing '") + k + "'");
  }
  if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1) throw InvalidParam("region needs x, y >= 0 and w, h >= 1");
  return r;
}

ParamResolver::ParamResolver(int width, int height, SimParams base)
    : width_(width), height_(height), base_(std::move(base)), combo_(width, height, 0) {
  base_.validate();
  rebuild();
}

int ParamResolver::max_service_radius() const {
  int r = 0;
  for (const auto& p : resolved_) r = std::max(r, p.service_radius);
  return r;
}

void ParamResolver::set_global(const json& partial) {
  SimParams next = base_;
  apply_partial(next, partial);
  // Overrides must still resolve on top of the new base.
  for (const auto& o : overrides_) {
    SimParams probe = next;
    apply_partial(probe, o.overrides);
  }
  base_ = next;
  rebuild();
}

void ParamResolver::set_region(const Rect& rect, const json& partial) {
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > width_ ||
      rect.y + rect.h > height_) {
    throw InvalidParam("region out of bounds");
  }
  if (!partial.is_object()) throw InvalidParam("parameter update must be a JSON object");
  if (touches_global_only_fields(partial)) throw InvalidParam("agent counts cannot be set per region");

  json merged = partial;
  auto existing = std::find_if(overrides_.begin(), overrides_.end(),
                               [&](const RegionOverride& o) { return o.rect == rect; });
  if (existing != overrides_.end()) {
    merged = existing->overrides;
    merged.update(partial);
  }
  SimParams probe = base_;
  apply_partial(probe, merged);

  if (existing != overrides_.end()) overrides_.erase(existing);
  overrides_.push_back({rect, std::move(merged)});
  rebuild();
}

void ParamResolver::reset(SimParams base, std::vector<RegionOverride> overrides) {
  base.validate();
  for (const auto& o : overrides) {
    if (touches_global_only_fields(o.overrides)) throw InvalidParam("agent counts cannot be set per region");
    SimParams probe = base;
    apply_partial(probe, o.overrides);
  }
  base_ = std::move(base);
  overrides_ = std::move(overrides);
  rebuild();
}

void ParamResolver::rebuild() {
  resolved_.clear();
  std::map<std::vector<std::uint16_t>, std::uint16_t> ids;
  std::vector<std::uint16_t> key;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      key.clear();
      for (std::size_t i = 0; i < overrides_.size(); ++i) {
        if (overrides_[i].rect.contains({x, y})) key.push_back(static_cast<std::uint16_t>(i));
      }
      auto it = ids.find(key);
      if (it == ids.end()) {
        if (resolved_.size() >= std::numeric_limits<std::uint16_t>::max()) {
          throw InvalidParam("too many overlapping region overrides");
        }
        SimParams p = base_;
        for (const auto i : key) apply_partial(p, overrides_[i].overrides);
        it = ids.emplace(key, static_cast<std::uint16_t>(resolved_.size())).first;
        resolved_.push_back(std::move(p));
      }
      combo_[{x, y}] = it->second;
    }
  }
}

}  // namespace citygen
