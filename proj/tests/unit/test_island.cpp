#include <citygen/errors.hpp>
#include <citygen/island.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace citygen;

TEST(Island, Deterministic) {
  EXPECT_EQ(generate_island(48, 40, 3), generate_island(48, 40, 3));
  EXPECT_NE(generate_island(48, 40, 3), generate_island(48, 40, 4));
}

TEST(Island, SeedAtCenterOnLandWaterAtRim) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Terrain t = generate_island(64, 64, seed);
    EXPECT_EQ(t.seed(), (Coord{32, 32}));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) EXPECT_TRUE(t.is_land({32 + dx, 32 + dy}));
    }
    int water = 0;
    int land = 0;
    for (const auto& c : t.cells().data()) {
      (c.is_land() ? land : water)++;
      EXPECT_GE(c.elevation, 0.0);
      EXPECT_LE(c.elevation, 1.0);
      EXPECT_DOUBLE_EQ(c.elevation, std::round(c.elevation * 1000.0) / 1000.0);
    }
    EXPECT_GT(land, 64 * 64 / 5);
    EXPECT_GT(water, 0);
  }
}

TEST(Island, RejectsBadSize) { EXPECT_THROW(generate_island(0, 5, 1), ValidationError); }
