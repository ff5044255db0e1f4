#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "citygen/grid.hpp"

namespace citygen {

enum class CellKind : std::uint8_t { Land, Water };

struct Cell {
  CellKind kind = CellKind::Land;
  /// Normalized height in [0, 1].
  double elevation = 0.0;

  bool is_land() const { return kind == CellKind::Land; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class TerrainFormat { CanonicalJson, AsciiGrid };

/// Static terrain grid plus the seed patch the city grows from.
/// Construction validates every invariant; a Terrain is immutable afterwards.
class Terrain {
 public:
  /// Throws ValidationError on dimension mismatch, out-of-range elevation,
  /// a seed that is out of bounds or on water, or a grid with no land.
  Terrain(int width, int height, std::vector<Cell> cells, Coord seed);

  int width() const { return cells_.width(); }
  int height() const { return cells_.height(); }
  Coord seed() const { return seed_; }
  bool in_bounds(Coord p) const { return cells_.in_bounds(p); }

  const Cell& at(Coord p) const { return cells_[p]; }
  bool is_land(Coord p) const { return cells_[p].is_land(); }
  double elevation(Coord p) const { return cells_[p].elevation; }
  const Grid<Cell>& cells() const { return cells_; }

  friend bool operator==(const Terrain&, const Terrain&) = default;

 private:
  Grid<Cell> cells_;
  Coord seed_;
};

/// Parses and validates a terrain. Throws ParseError or ValidationError.
Terrain load_terrain(std::string_view bytes, TerrainFormat format);

/// Picks CanonicalJson when the first non-blank byte is '{', AsciiGrid otherwise.
TerrainFormat sniff_terrain_format(std::string_view bytes);

/// Canonical JSON bytes (compact, keys sorted). load_terrain inverts this exactly.
std::string to_canonical_json(const Terrain& terrain);
std::string to_ascii_grid(const Terrain& terrain);

/// Hex SHA-256 of to_canonical_json(terrain).
std::string terrain_sha256(const Terrain& terrain);

/// Mean elevation over the cells where mask is non-zero; the seed elevation
/// when the mask is empty. Throws DimensionMismatch.
double mean_developed_elevation(const Terrain& terrain, const Grid<std::uint8_t>& developed_mask);

/// Unbounded 4-connected hop distance from every cell to the nearest water
/// cell. kNoWater everywhere when the terrain has no water.
inline constexpr int kNoWater = -1;
Grid<int> water_distance_field(const Terrain& terrain);

/// Fixed-point elevation used for exact, order-independent sums.
std::int64_t elevation_fixed(double elevation);
double elevation_from_fixed_mean(std::int64_t sum, std::int64_t count);

}  // namespace citygen
