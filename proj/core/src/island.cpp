#include "citygen/island.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "citygen/errors.hpp"
#include "citygen/rng.hpp"

namespace citygen {

namespace {

class Lattice {
 public:
  Lattice(int width, int height, int spacing, std::uint64_t seed, std::uint64_t octave)
      : spacing_(spacing), cols_(width / spacing + 2), rows_(height / spacing + 2) {
    RngStream rng(seed, 0, octave);
    values_.resize(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_));
    for (auto& v : values_) v = rng.unit();
  }

  double sample(int x, int y) const {
    const int cx = x / spacing_;
    const int cy = y / spacing_;
    const double fx = smooth(static_cast<double>(x % spacing_) / spacing_);
    const double fy = smooth(static_cast<double>(y % spacing_) / spacing_);
    const double top = lerp(at(cx, cy), at(cx + 1, cy), fx);
    const double bottom = lerp(at(cx, cy + 1), at(cx + 1, cy + 1), fx);
    return lerp(top, bottom, fy);
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  static double lerp(double a, double b, double t) { return a + (b - a) * t; }
  double at(int cx, int cy) const { return values_[static_cast<std::size_t>(cy) * cols_ + cx]; }

  int spacing_;
  int cols_;
  int rows_;
  std::vector<double> values_;
};

}  // namespace

Terrain generate_island(int width, int height, std::uint64_t seed, double water_level) {
  if (width <= 0 || height <= 0) throw ValidationError("island dimensions must be positive");
  const Lattice coarse(width, height, 16, seed, 1);
  const Lattice fine(width, height, 5, seed, 2);
  const Coord center{width / 2, height / 2};
  const double rx = std::max(1.0, width / 2.0);
  const double ry = std::max(1.0, height / 2.0);

  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x - center.x) / rx;
      const double dy = (y - center.y) / ry;
      const double falloff = std::clamp(1.0 - (dx * dx + dy * dy), 0.0, 1.0);
      double h = (0.65 * coarse.sample(x, y) + 0.35 * fine.sample(x, y)) * (0.35 + 0.9 * falloff);
      h = std::clamp(h, 0.0, 1.0);
      const bool near_center = chebyshev({x, y}, center) <= 1;
      if (near_center) h = std::max(h, water_level + 0.05);
      Cell c;
      c.kind = h > water_level ? CellKind::Land : CellKind::Water;
      c.elevation = std::round(h * 1000.0) / 1000.0;
      cells.push_back(c);
    }
  }
  return Terrain(width, height, std::move(cells), center);
}

}  // namespace citygen
