#include "citygen/terrain.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citygen/errors.hpp"

namespace citygen {

namespace {

using nlohmann::json;

constexpr std::int64_t kMaxCells = std::int64_t{1} << 26;
constexpr double kFixedScale = 4294967296.0;  // 2^32

std::string coord_text(Coord p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, const char* what) {
  T value{};
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(std::string("bad ") + what + " token '" + std::string(tok) + "'");
  }
  return value;
}

void check_dimensions(std::int64_t w, std::int64_t h) {
  if (w <= 0 || h <= 0) throw ValidationError("terrain dimensions must be positive");
  if (w * h > kMaxCells) throw ValidationError("terrain too large");
}

Terrain load_ascii(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= bytes.size()) {
    std::size_t nl = bytes.find('\n', start);
    if (nl == std::string_view::npos) nl = bytes.size();
    lines.push_back(bytes.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty AsciiGrid input");

  const auto header = split_tokens(lines[0]);
  if (header.size() != 4) throw ParseError("AsciiGrid header must be 'W H SX SY'");
  const auto w = parse_number<std::int64_t>(header[0], "width");
  const auto h = parse_number<std::int64_t>(header[1], "height");
  const auto sx = parse_number<int>(header[2], "seed x");
  const auto sy = parse_number<int>(header[3], "seed y");
  check_dimensions(w, h);
  if (static_cast<std::int64_t>(lines.size()) - 1 != h) {
    throw ValidationError("AsciiGrid has " + std::to_string(lines.size() - 1) + " rows, header says " +
                          std::to_string(h));
  }

  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(w * h));
  for (std::int64_t row = 0; row < h; ++row) {
    const auto tokens = split_tokens(lines[static_cast<std::size_t>(row) + 1]);
    if (static_cast<std::int64_t>(tokens.size()) != w) {
      throw ValidationError("AsciiGrid row " + std::to_string(row) + " has " + std::to_string(tokens.size()) +
                            " cells, expected " + std::to_string(w));
    }
    for (const auto tok : tokens) {
      if (tok == "~") {
        cells.push_back({CellKind::Water, 0.0});
      } else {
        cells.push_back({CellKind::Land, parse_number<double>(tok, "elevation")});
      }
    }
  }
  return Terrain(static_cast<int>(w), static_cast<int>(h), std::move(cells), Coord{sx, sy});
}

Terrain load_json(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("terrain JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("terrain JSON must be an object");

  static const std::set<std::string> kKeys{"width", "height", "elevation", "water", "seed"};
  for (const auto& [key, _] : doc.items()) {
    if (!kKeys.contains(key)) throw ParseError("terrain JSON has unexpected key '" + key + "'");
  }
  for (const auto& key : kKeys) {
    if (!doc.contains(key)) throw ParseError("terrain JSON missing key '" + key + "'");
  }
  if (!doc["width"].is_number_integer() || !doc["height"].is_number_integer()) {
    throw ParseError("terrain width/height must be integers");
  }
  const auto& elev = doc["elevation"];
  const auto& water = doc["water"];
  const auto& seed = doc["seed"];
  if (!elev.is_array() || !water.is_array()) throw ParseError("elevation and water must be arrays");
  if (!seed.is_array() || seed.size() != 2 || !seed[0].is_number_integer() || !seed[1].is_number_integer()) {
    throw ParseError("seed must be a two-element integer array");
  }

  const auto w = doc["width"].get<std::int64_t>();
  const auto h = doc["height"].get<std::int64_t>();
  check_dimensions(w, h);
  const auto n = static_cast<std::size_t>(w * h);
  if (elev.size() != n || water.size() != n) {
    throw ValidationError("elevation/water arrays must have width*height = " + std::to_string(n) + " entries");
  }

  std::vector<Cell> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!elev[i].is_number()) throw ParseError("elevation entries must be numbers");
    if (!water[i].is_boolean()) throw ParseError("water entries must be booleans");
    cells[i] = {water[i].get<bool>() ? CellKind::Water : CellKind::Land, elev[i].get<double>()};
  }
  return Terrain(static_cast<int>(w), static_cast<int>(h), std::move(cells),
                 Coord{seed[0].get<int>(), seed[1].get<int>()});
}

}  // namespace

Terrain::Terrain(int width, int height, std::vector<Cell> cells, Coord seed) : seed_(seed) {
  check_dimensions(width, height);
  if (cells.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ValidationError("cell count does not match width*height");
  }
  bool any_land = false;
  for (const auto& c : cells) {
    if (!std::isfinite(c.elevation) || c.elevation < 0.0 || c.elevation > 1.0) {
      throw ValidationError("elevation outside [0,1]");
    }
    any_land = any_land || c.is_land();
  }
  if (!any_land) throw ValidationError("terrain has no land");
  cells_ = Grid<Cell>(width, height);
  cells_.data() = std::move(cells);
  if (!cells_.in_bounds(seed)) throw ValidationError("seed " + coord_text(seed) + " out of bounds");
  if (!cells_[seed].is_land()) throw ValidationError("seed " + coord_text(seed) + " is on water");
}

TerrainFormat sniff_terrain_format(std::string_view bytes) {
  for (const char c : bytes) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    return c == '{' ? TerrainFormat::CanonicalJson : TerrainFormat::AsciiGrid;
  }
  return TerrainFormat::AsciiGrid;
}

Terrain load_terrain(std::string_view bytes, TerrainFormat format) {
  return format == TerrainFormat::CanonicalJson ? load_json(bytes) : load_ascii(bytes);
}

std::string to_canonical_json(const Terrain& terrain) {
  json elevation = json::array();
  json water = json::array();
  for (const auto& c : terrain.cells().data()) {
    elevation.push_back(c.elevation);
    water.push_back(!c.is_land());
  }
  json doc = {{"width", terrain.width()},
              {"height", terrain.height()},
              {"elevation", std::move(elevation)},
              {"water", std::move(water)},
              {"seed", {terrain.seed().x, terrain.seed().y}}};
  return doc.dump();
}

std::string to_ascii_grid(const Terrain& terrain) {
  std::string out = std::to_string(terrain.width()) + " " + std::to_string(terrain.height()) + " " +
                    std::to_string(terrain.seed().x) + " " + std::to_string(terrain.seed().y) + "\n";
  char buf[64];
  for (int y = 0; y < terrain.height(); ++y) {
    for (int x = 0; x < terrain.width(); ++x) {
      if (x > 0) out += ' ';
      const Cell& c = terrain.at({x, y});
      if (!c.is_land()) {
        out += '~';
      } else {
        const auto res = std::to_chars(buf, buf + sizeof buf, c.elevation);
        out.append(buf, res.ptr);
      }
    }
    out += '\n';
  }
  return out;
}

std::string terrain_sha256(const Terrain& terrain) {
  const std::string bytes = to_canonical_json(terrain);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::int64_t elevation_fixed(double elevation) { return std::llround(elevation * kFixedScale); }

double elevation_from_fixed_mean(std::int64_t sum, std::int64_t count) {
  return static_cast<double>(sum) / static_cast<double>(count) / kFixedScale;
}

double mean_developed_elevation(const Terrain& terrain, const Grid<std::uint8_t>& developed_mask) {
  if (developed_mask.width() != terrain.width() || developed_mask.height() != terrain.height()) {
    throw DimensionMismatch("developed mask dimensions do not match terrain");
  }
  std::int64_t sum = 0;
  std::int64_t count = 0;
  const auto& cells = terrain.cells().data();
  const auto& mask = developed_mask.data();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) continue;
    sum += elevation_fixed(cells[i].elevation);
    ++count;
  }
  if (count == 0) return terrain.elevation(terrain.seed());
  return elevation_from_fixed_mean(sum, count);
}

Grid<int> water_distance_field(const Terrain& terrain) {
  Grid<int> dist(terrain.width(), terrain.height(), kNoWater);
  std::deque<Coord> queue;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const Coord p = dist.coord(i);
    if (!terrain.is_land(p)) {
      dist[p] = 0;
      queue.push_back(p);
    }
  }
  while (!queue.empty()) {
    const Coord p = queue.front();
    queue.pop_front();
    for (const Coord d : kNeighbors4) {
      const Coord q = p + d;
      if (!dist.in_bounds(q) || dist[q] != kNoWater) continue;
      dist[q] = dist[p] + 1;
      queue.push_back(q);
    }
  }
  return dist;
}

}  // namespace citygen
