#pragma once

#include <cstdint>

#include "citygen/terrain.hpp"

namespace citygen {

/// Deterministic synthetic island: smoothed value noise under a radial
/// falloff, water below `water_level`, seed at the grid center (always land).
/// Elevations are rounded to 1/1000.
Terrain generate_island(int width, int height, std::uint64_t seed, double water_level = 0.3);

}  // namespace citygen
