#include "citygen/landuse.hpp"

#include "citygen/agents.hpp"

namespace citygen {

std::string_view to_string(LandUse use) {
  switch (use) {
    case LandUse::Empty: return "empty";
    case LandUse::Road: return "road";
    case LandUse::Commercial: return "commercial";
    case LandUse::Residential: return "residential";
  }
  return "?";
}

std::optional<LandUse> land_use_from_string(std::string_view s) {
  for (const auto u : {LandUse::Empty, LandUse::Road, LandUse::Commercial, LandUse::Residential}) {
    if (s == to_string(u)) return u;
  }
  return std::nullopt;
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Extender: return "extender";
    case AgentKind::Connector: return "connector";
    case AgentKind::Commercial: return "commercial";
    case AgentKind::Residential: return "residential";
  }
  return "?";
}

std::optional<AgentKind> agent_kind_from_string(std::string_view s) {
  for (const auto k : {AgentKind::Extender, AgentKind::Connector, AgentKind::Commercial, AgentKind::Residential}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

LandUseGrid::LandUseGrid(int width, int height) : use_(width, height, LandUse::Empty), density_(width, height, 0.0) {}

void LandUseGrid::set_road(Coord p) { use_[p] = LandUse::Road; }

void LandUseGrid::build(Coord p, LandUse use, double density, double elevation) {
  if (!is_built(use_[p])) {
    developed_sum_ += elevation_fixed(elevation);
    ++developed_count_;
  }
  use_[p] = use;
  density_[p] = density;
}

void LandUseGrid::set_density(Coord p, double density) { density_[p] = density; }

Grid<std::uint8_t> LandUseGrid::developed_mask() const {
  Grid<std::uint8_t> mask(width(), height(), 0);
  for (std::size_t i = 0; i < use_.size(); ++i) mask.data()[i] = is_built(use_.data()[i]) ? 1 : 0;
  return mask;
}

}  // namespace citygen
