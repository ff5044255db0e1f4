#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace citygen {

/// Patch coordinate. Row 0 is the top row; x is the column.
struct Coord {
  int x = 0;
  int y = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

inline int manhattan(Coord a, Coord b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
inline int chebyshev(Coord a, Coord b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  return dx > dy ? dx : dy;
}

/// 4-neighbourhood offsets in the fixed tie-break order N, E, S, W.
inline constexpr std::array<Coord, 4> kNeighbors4{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

inline Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }

/// Axis-aligned patch rectangle [x, x+w) x [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(Coord p) const { return p.x >= x && p.y >= y && p.x < x + w && p.y < y + h; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Dense row-major grid. Use std::uint8_t rather than bool for masks.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(Coord p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  std::size_t index(Coord p) const {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(p.x);
  }
  Coord coord(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  T& operator[](Coord p) { return cells_[index(p)]; }
  const T& operator[](Coord p) const { return cells_[index(p)]; }

  std::vector<T>& data() { return cells_; }
  const std::vector<T>& data() const { return cells_; }

  void fill(const T& v) { std::fill(cells_.begin(), cells_.end(), v); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

/// Calls fn(q) for every in-bounds q with chebyshev(center, q) <= radius, row-major.
template <typename T, typename Fn>
void for_each_in_window(const Grid<T>& g, Coord center, int radius, Fn&& fn) {
  const int y0 = center.y - radius < 0 ? 0 : center.y - radius;
  const int y1 = center.y + radius >= g.height() ? g.height() - 1 : center.y + radius;
  const int x0 = center.x - radius < 0 ? 0 : center.x - radius;
  const int x1 = center.x + radius >= g.width() ? g.width() - 1 : center.x + radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) fn(Coord{x, y});
  }
}

}  // namespace citygen
