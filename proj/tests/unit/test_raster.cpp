#include <citygen/engine.hpp>
#include <citygen/island.hpp>
#include <citygen/raster.hpp>

#include <gtest/gtest.h>
#include <png.h>

#include "fixtures.hpp"

using namespace citygen;

namespace {

std::vector<Rgb> decode(const std::string& bytes, int& w, int& h) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) return {};
  img.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) return {};
  w = static_cast<int>(img.width);
  h = static_cast<int>(img.height);
  std::vector<Rgb> px;
  for (std::size_t i = 0; i + 2 < buf.size(); i += 3) px.push_back({buf[i], buf[i + 1], buf[i + 2]});
  return px;
}

}  // namespace

TEST(Raster, LegendColors) {
  EXPECT_EQ(legend::kLand, (Rgb{88, 148, 72}));
  EXPECT_EQ(legend::kWater, (Rgb{18, 28, 66}));
  EXPECT_EQ(legend::kRoad, (Rgb{128, 128, 128}));
  EXPECT_EQ(legend::kCommercial, (Rgb{32, 84, 224}));
  EXPECT_EQ(legend::kResidential, (Rgb{208, 44, 44}));
  EXPECT_EQ(lighten({0, 100, 255}, 0.5), (Rgb{128, 178, 255}));
  EXPECT_EQ(lighten({10, 20, 30}, 2.0), (Rgb{255, 255, 255}));
  EXPECT_EQ(lighten({10, 20, 30}, -1.0), (Rgb{10, 20, 30}));
}

TEST(Raster, TickZeroHasOneRoadPixel) {
  const Terrain t = generate_island(30, 24, 2);
  const WorldState w(t, SimParams{}, 1);
  const std::string png = render_raster(t, w.snapshot());
  int width = 0;
  int height = 0;
  const auto px = decode(png, width, height);
  ASSERT_EQ(width, 30);
  ASSERT_EQ(height, 24);
  int roads = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const Coord p{static_cast<int>(i % 30), static_cast<int>(i / 30)};
    if (px[i] == legend::kRoad) {
      ++roads;
      EXPECT_EQ(p, t.seed());
    } else {
      EXPECT_EQ(px[i], t.is_land(p) ? legend::kLand : legend::kWater);
    }
  }
  EXPECT_EQ(roads, 1);
}

TEST(Raster, DenserIsLighterInEveryChannel) {
  for (const LandUse u : {LandUse::Commercial, LandUse::Residential}) {
    const Rgb lo = patch_color(true, false, u, 1.0, 8.0);
    const Rgb hi = patch_color(true, false, u, 8.0, 8.0);
    EXPECT_GT(hi.r, lo.r);
    EXPECT_GT(hi.g, lo.g);
    EXPECT_GT(hi.b, lo.b);
    EXPECT_EQ(hi, (Rgb{255, 255, 255}));
  }
}

TEST(Raster, RegionalMaxDensityUsed) {
  const WorldState w(test::flat_terrain(4, 1, {0, 0}), test::no_agents(), 1);
  Snapshot s = w.snapshot();
  s.use[{2, 0}] = LandUse::Commercial;
  s.density[{2, 0}] = 2.0;
  s.use[{3, 0}] = LandUse::Commercial;
  s.density[{3, 0}] = 2.0;
  s.overrides.push_back({Rect{3, 0, 1, 1}, {{"max_density", 2.0}}});
  const auto px = render_pixels(w.terrain(), s);
  EXPECT_EQ(px[2], lighten(legend::kCommercial, 0.25));
  EXPECT_EQ(px[3], (Rgb{255, 255, 255}));
}

TEST(Raster, PngBytesStable) {
  const Terrain t = generate_island(40, 40, 3);
  WorldState a(t, SimParams{}, 5);
  WorldState b(t, SimParams{}, 5);
  a.run(200);
  b.run(200);
  const std::string pa = render_raster(t, a.snapshot());
  EXPECT_EQ(pa, render_raster(t, b.snapshot()));
  EXPECT_EQ(pa.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
  int w = 0;
  int h = 0;
  EXPECT_EQ(decode(pa, w, h), render_pixels(t, a.snapshot()));
  EXPECT_THROW(encode_png(2, 2, std::vector<Rgb>(3)), std::invalid_argument);
}
