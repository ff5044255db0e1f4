#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "citygen/grid.hpp"

namespace citygen {

enum class AgentKind : std::uint8_t { Extender, Connector, Commercial, Residential };

std::string_view to_string(AgentKind kind);
std::optional<AgentKind> agent_kind_from_string(std::string_view s);

struct Agent {
  int id = 0;
  AgentKind kind = AgentKind::Extender;
  Coord position;

  friend bool operator==(const Agent&, const Agent&) = default;
};

}  // namespace citygen
