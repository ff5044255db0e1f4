#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citygen/landuse.hpp"
#include "citygen/snapshot.hpp"
#include "citygen/terrain.hpp"

namespace citygen {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Fixed raster legend. Built patches start from their base colour and are
/// blended towards white by density / max_density.
namespace legend {
inline constexpr Rgb kLand{88, 148, 72};
inline constexpr Rgb kWater{18, 28, 66};
inline constexpr Rgb kRoad{128, 128, 128};
inline constexpr Rgb kCommercial{32, 84, 224};
inline constexpr Rgb kResidential{208, 44, 44};
}  // namespace legend

/// c + round((255 - c) * clamp(t, 0, 1)) per channel.
Rgb lighten(Rgb base, double t);

Rgb patch_color(bool land, bool road, LandUse use, double density, double max_density);

/// One pixel per patch, row-major. max_density is resolved per patch,
/// honouring region overrides recorded in the snapshot.
std::vector<Rgb> render_pixels(const Terrain& terrain, const Snapshot& snapshot);

/// 8-bit RGB PNG, no ancillary chunks, so identical pixels give identical bytes.
std::string encode_png(int width, int height, std::span<const Rgb> pixels);

std::string render_raster(const Terrain& terrain, const Snapshot& snapshot);

}  // namespace citygen
