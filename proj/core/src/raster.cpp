#include "citygen/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "citygen/params.hpp"

namespace citygen {

Rgb lighten(Rgb base, double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto ch = [t](std::uint8_t c) {
    return static_cast<std::uint8_t>(c + std::lround((255.0 - c) * t));
  };
  return {ch(base.r), ch(base.g), ch(base.b)};
}

Rgb patch_color(bool land, bool road, LandUse use, double density, double max_density) {
  if (road) return legend::kRoad;
  if (!land) return legend::kWater;
  const double t = max_density > 0.0 ? density / max_density : 0.0;
  if (use == LandUse::Commercial) return lighten(legend::kCommercial, t);
  if (use == LandUse::Residential) return lighten(legend::kResidential, t);
  return legend::kLand;
}

std::vector<Rgb> render_pixels(const Terrain& terrain, const Snapshot& s) {
  ParamResolver params(s.width(), s.height(), s.params);
  if (!s.overrides.empty()) params.reset(s.params, s.overrides);
  std::vector<Rgb> px(s.roads.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const Coord p = s.roads.coord(i);
    px[i] = patch_color(terrain.is_land(p), s.roads[p] != 0, s.use[p], s.density[p], params.at(p).max_density);
  }
  return px;
}

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void flush_nothing(png_structp) {}

}  // namespace

std::string encode_png(int width, int height, std::span<const Rgb> pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("pixel count does not match image size");
  }
  std::string out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, flush_nothing);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Rgb& c = pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
      row[static_cast<std::size_t>(x) * 3 + 0] = c.r;
      row[static_cast<std::size_t>(x) * 3 + 1] = c.g;
      row[static_cast<std::size_t>(x) * 3 + 2] = c.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::string render_raster(const Terrain& terrain, const Snapshot& snapshot) {
  const auto px = render_pixels(terrain, snapshot);
  return encode_png(snapshot.width(), snapshot.height(), px);
}

}  // namespace citygen
