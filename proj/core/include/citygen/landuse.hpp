#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "citygen/grid.hpp"
#include "citygen/terrain.hpp"

namespace citygen {

enum class LandUse : std::uint8_t { Empty = 0, Road = 1, Commercial = 2, Residential = 3 };

std::string_view to_string(LandUse use);
std::optional<LandUse> land_use_from_string(std::string_view s);

inline bool is_built(LandUse u) { return u == LandUse::Commercial || u == LandUse::Residential; }

/// Per-patch use and built density, plus a running fixed-point elevation sum
/// over developed (built) patches for the mean-developed-elevation query.
class LandUseGrid {
 public:
  LandUseGrid(int width, int height);

  int width() const { return use_.width(); }
  int height() const { return use_.height(); }
  LandUse use(Coord p) const { return use_[p]; }
  double density(Coord p) const { return density_[p]; }
  const Grid<LandUse>& uses() const { return use_; }
  const Grid<double>& densities() const { return density_; }

  void set_road(Coord p);
  /// Empty patch becomes Commercial/Residential at the given density.
  void build(Coord p, LandUse use, double density, double elevation);
  void set_density(Coord p, double density);

  std::int64_t developed_elevation_sum() const { return developed_sum_; }
  std::int64_t developed_count() const { return developed_count_; }
  Grid<std::uint8_t> developed_mask() const;

  friend bool operator==(const LandUseGrid&, const LandUseGrid&) = default;

 private:
  Grid<LandUse> use_;
  Grid<double> density_;
  std::int64_t developed_sum_ = 0;
  std::int64_t developed_count_ = 0;
};

}  // namespace citygen
