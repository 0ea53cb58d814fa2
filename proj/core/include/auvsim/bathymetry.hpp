#pragma once

#include "auvsim/error.hpp"
#include "auvsim/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace auvsim::bathy {

/// Node-registered heightmap. Node (r, c) sits at
/// (origin_x + c * cell_size, origin_y + r * cell_size); row 0 is the southern
/// edge. Neighbouring tiles share their edge nodes.
struct Tile {
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  double cell_size = 1.0;
  std::vector<float> depths;  // seafloor z, m (negative down), row-major

  double max_x() const { return origin_x + static_cast<double>(cols - 1) * cell_size; }
  double max_y() const { return origin_y + static_cast<double>(rows - 1) * cell_size; }
  bool contains(double x, double y) const {
    return x >= origin_x && x <= max_x() && y >= origin_y && y <= max_y();
  }
  float node(std::int64_t r, std::int64_t c) const {
    return depths[static_cast<std::size_t>(r * cols + c)];
  }
  /// Bilinear interpolation between the four surrounding nodes.
  double sample(double x, double y) const;
};

/// Binary tile layout, little-endian:
///   char[8] "AUVTILE1" | f64 origin_x | f64 origin_y | i64 rows | i64 cols |
///   f64 cell_size | f32 depths[rows * cols] (row-major)
void write_tile(const std::filesystem::path& path, const Tile& tile);
Tile read_tile(const std::filesystem::path& path);

struct TileKey {
  std::int64_t i = 0;
  std::int64_t j = 0;
  friend bool operator==(const TileKey&, const TileKey&) = default;
  friend auto operator<=>(const TileKey&, const TileKey&) = default;
};

/// Text manifest:
///   auvsim-tileset 1
///   origin <x> <y>
///   tile_size <m>
///   <i> <j> <path relative to the manifest>
struct Manifest {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double tile_size = 0.0;
  std::map<TileKey, std::filesystem::path> tiles;

  TileKey key_for(double x, double y) const;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Query point lies in no tile of the set.
class OutsideTileset : public DataError {
 public:
  using DataError::DataError;
};

/// Streams tiles on demand and keeps at most `max_resident` of them, evicting
/// the least recently used.
class TileSet {
 public:
  explicit TileSet(Manifest manifest, std::size_t max_resident = 9);
  static TileSet open(const std::filesystem::path& manifest_path, std::size_t max_resident = 9);

  TileSet(TileSet&& other) noexcept;
  TileSet& operator=(TileSet&&) = delete;

  /// Seafloor z at (x, y). Loads the containing tile on a miss.
  double depth_at(double x, double y);

  /// Height of the vehicle above the seafloor; <= 0 means grounded.
  double altitude(const VehicleState& state) { return state.position.z() - depth_at(state.position.x(), state.position.y()); }

  const Manifest& manifest() const { return manifest_; }
  std::size_t max_resident() const { return max_resident_; }
  std::size_t resident_count() const;
  std::size_t load_count() const;
  std::size_t eviction_count() const;
  bool is_resident(const TileKey& key) const;

 private:
  struct KeyHash {
    std::size_t operator()(const TileKey& k) const {
      return std::hash<std::int64_t>()(k.i) * 1000003u ^ std::hash<std::int64_t>()(k.j);
    }
  };
  struct Slot {
    Tile tile;
    std::list<TileKey>::iterator lru;
  };

  const Tile& acquire(const TileKey& key);

  Manifest manifest_;
  std::size_t max_resident_;
  mutable std::mutex mutex_;
  std::list<TileKey> lru_;  // front = most recent
  std::unordered_map<TileKey, Slot, KeyHash> resident_;
  std::size_t loads_ = 0;
  std::size_t evictions_ = 0;
};

struct AsciiGridOptions {
  std::int64_t tile_cells = 256;  // cells per tile side
  bool positive_depth = false;    // input values are depths (positive down)
};

/// Reads an ESRI-style ASCII grid (ncols/nrows/xll*/yll*/cellsize header, rows
/// north to south), writes tiles plus `manifest.tiles` into `out_dir` and
/// returns the manifest path.
std::filesystem::path convert_ascii_grid(const std::filesystem::path& input,
                                         const std::filesystem::path& out_dir,
                                         const AsciiGridOptions& options = {});

}  // namespace auvsim::bathy
