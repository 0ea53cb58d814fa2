#include "auvsim/bathymetry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

namespace auvsim::bathy {
namespace {

constexpr std::array<char, 8> kMagic = {'A', 'U', 'V', 'T', 'I', 'L', 'E', '1'};

template <typename T, typename U>
void put_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<U>(value);
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes, sizeof(U));
}

template <typename T, typename U>
T get_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw DataError("truncated tile file '" + path.string() + "'");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

double Tile::sample(double x, double y) const {
  const double fc = (x - origin_x) / cell_size;
  const double fr = (y - origin_y) / cell_size;
  const std::int64_t c0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(fc)), 0,
                                                   std::max<std::int64_t>(cols - 2, 0));
  const std::int64_t r0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(fr)), 0,
                                                   std::max<std::int64_t>(rows - 2, 0));
  const std::int64_t c1 = std::min(c0 + 1, cols - 1);
  const std::int64_t r1 = std::min(r0 + 1, rows - 1);
  const double tx = c1 == c0 ? 0.0 : fc - static_cast<double>(c0);
  const double ty = r1 == r0 ? 0.0 : fr - static_cast<double>(r0);
  const double south = node(r0, c0) + tx * (node(r0, c1) - node(r0, c0));
  const double north = node(r1, c0) + tx * (node(r1, c1) - node(r1, c0));
  return south + ty * (north - south);
}

void write_tile(const std::filesystem::path& path, const Tile& tile) {
  if (tile.rows < 1 || tile.cols < 1 ||
      tile.depths.size() != static_cast<std::size_t>(tile.rows * tile.cols)) {
    throw DataError("tile shape does not match its depth array");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write tile '" + path.string() + "'");
  out.write(kMagic.data(), kMagic.size());
  put_le<double, std::uint64_t>(out, tile.origin_x);
  put_le<double, std::uint64_t>(out, tile.origin_y);
  put_le<std::int64_t, std::uint64_t>(out, tile.rows);
  put_le<std::int64_t, std::uint64_t>(out, tile.cols);
  put_le<double, std::uint64_t>(out, tile.cell_size);
  for (float d : tile.depths) put_le<float, std::uint32_t>(out, d);
}

Tile read_tile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tile '" + path.string() + "'");
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("'" + path.string() + "' is not a tile file");
  }
  Tile t;
  t.origin_x = get_le<double, std::uint64_t>(in, path);
  t.origin_y = get_le<double, std::uint64_t>(in, path);
  t.rows = get_le<std::int64_t, std::uint64_t>(in, path);
  t.cols = get_le<std::int64_t, std::uint64_t>(in, path);
  t.cell_size = get_le<double, std::uint64_t>(in, path);
  if (t.rows < 1 || t.cols < 1 || t.rows > (1 << 20) || t.cols > (1 << 20) || !(t.cell_size > 0.0)) {
    throw DataError("'" + path.string() + "' has an invalid tile header");
  }
  t.depths.resize(static_cast<std::size_t>(t.rows * t.cols));
  for (auto& d : t.depths) {
    d = get_le<float, std::uint32_t>(in, path);
    if (!std::isfinite(d)) throw DataError("'" + path.string() + "' contains non-finite depths");
  }
  return t;
}

TileKey Manifest::key_for(double x, double y) const {
  return {static_cast<std::int64_t>(std::floor((x - origin_x) / tile_size)),
          static_cast<std::int64_t>(std::floor((y - origin_y) / tile_size))};
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  Manifest m;
  std::string line;
  int line_no = 0;
  bool header = false, have_origin = false, have_size = false;
  auto fail = [&](const std::string& what) {
    return DataError(fmt::format("{}:{}: {}", path.string(), line_no, what));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (!header) {
      int version = 0;
      if (word != "auvsim-tileset" || !(ls >> version) || version != 1) {
        throw fail("expected 'auvsim-tileset 1'");
      }
      header = true;
    } else if (word == "origin") {
      if (!(ls >> m.origin_x >> m.origin_y)) throw fail("expected 'origin <x> <y>'");
      have_origin = true;
    } else if (word == "tile_size") {
      if (!(ls >> m.tile_size) || !(m.tile_size > 0.0)) throw fail("expected 'tile_size <m>'");
      have_size = true;
    } else {
      TileKey key;
      std::string rel;
      std::istringstream row(line);
      if (!(row >> key.i >> key.j >> rel)) throw fail("expected '<i> <j> <path>'");
      if (m.tiles.count(key)) throw fail(fmt::format("duplicate tile ({}, {})", key.i, key.j));
      m.tiles[key] = path.parent_path() / rel;
    }
  }
  if (!header || !have_origin || !have_size) {
    throw DataError("manifest '" + path.string() + "' is missing its header fields");
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  out << "auvsim-tileset 1\n";
  out << fmt::format("origin {} {}\ntile_size {}\n", m.origin_x, m.origin_y, m.tile_size);
  for (const auto& [key, file] : m.tiles) {
    auto rel = file.is_absolute() ? file.lexically_relative(path.parent_path()) : file;
    out << key.i << ' ' << key.j << ' ' << rel.generic_string() << '\n';
  }
}

TileSet::TileSet(Manifest manifest, std::size_t max_resident)
    : manifest_(std::move(manifest)), max_resident_(std::max<std::size_t>(max_resident, 1)) {}

TileSet TileSet::open(const std::filesystem::path& manifest_path, std::size_t max_resident) {
  return TileSet(read_manifest(manifest_path), max_resident);
}

TileSet::TileSet(TileSet&& other) noexcept
    : manifest_(std::move(other.manifest_)),
      max_resident_(other.max_resident_),
      lru_(std::move(other.lru_)),
      resident_(std::move(other.resident_)),
      loads_(other.loads_),
      evictions_(other.evictions_) {}

const Tile& TileSet::acquire(const TileKey& key) {
  if (auto it = resident_.find(key); it != resident_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.lru);
    return it->second.tile;
  }
  Tile tile = read_tile(manifest_.tiles.at(key));
  while (resident_.size() >= max_resident_) {
    resident_.erase(lru_.back());
    lru_.pop_back();
    ++evictions_;
  }
  lru_.push_front(key);
  ++loads_;
  auto [it, inserted] = resident_.emplace(key, Slot{std::move(tile), lru_.begin()});
  return it->second.tile;
}

double TileSet::depth_at(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw DataError("depth_at: non-finite position");
  std::lock_guard lock(mutex_);
  const TileKey base = manifest_.key_for(x, y);
  // A point on a shared edge also belongs to the tile below/left of it, which
  // matters at the outer boundary of the set.
  for (const TileKey key : {base, TileKey{base.i - 1, base.j}, TileKey{base.i, base.j - 1},
                            TileKey{base.i - 1, base.j - 1}}) {
    if (!manifest_.tiles.count(key)) continue;
    const Tile& tile = acquire(key);
    if (tile.contains(x, y)) return tile.sample(x, y);
  }
  throw OutsideTileset(fmt::format("({}, {}) lies outside every bathymetry tile", x, y));
}

std::size_t TileSet::resident_count() const {
  std::lock_guard lock(mutex_);
  return resident_.size();
}

std::size_t TileSet::load_count() const {
  std::lock_guard lock(mutex_);
  return loads_;
}

std::size_t TileSet::eviction_count() const {
  std::lock_guard lock(mutex_);
  return evictions_;
}

bool TileSet::is_resident(const TileKey& key) const {
  std::lock_guard lock(mutex_);
  return resident_.count(key) != 0;
}

std::filesystem::path convert_ascii_grid(const std::filesystem::path& input,
                                         const std::filesystem::path& out_dir,
                                         const AsciiGridOptions& options) {
  std::ifstream in(input);
  if (!in) throw DataError("cannot open ASCII grid '" + input.string() + "'");
  if (options.tile_cells < 1) throw DataError("tile_cells must be >= 1");

  std::int64_t ncols = -1, nrows = -1;
  double xll = 0.0, yll = 0.0, cell = 0.0;
  bool centered = false, have_x = false, have_y = false;
  std::optional<double> nodata;

  std::string word;
  std::streampos data_start = in.tellg();
  while (in >> word) {
    std::string key = word;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    if (key == "ncols") {
      in >> ncols;
    } else if (key == "nrows") {
      in >> nrows;
    } else if (key == "xllcorner" || key == "xllcenter") {
      in >> xll;
      centered = key == "xllcenter";
      have_x = true;
    } else if (key == "yllcorner" || key == "yllcenter") {
      in >> yll;
      have_y = true;
    } else if (key == "cellsize") {
      in >> cell;
    } else if (key == "nodata_value") {
      double v;
      in >> v;
      nodata = v;
    } else {
      in.clear();
      in.seekg(data_start);
      break;
    }
    if (!in) throw DataError("'" + input.string() + "': malformed header entry '" + word + "'");
    data_start = in.tellg();
  }
  if (ncols < 2 || nrows < 2 || !(cell > 0.0) || !have_x || !have_y) {
    throw DataError("'" + input.string() +
                    "': header needs ncols>=2, nrows>=2, cellsize>0, xll*, yll*");
  }

  std::vector<float> grid(static_cast<std::size_t>(ncols * nrows));
  for (std::int64_t r = 0; r < nrows; ++r) {
    // File rows run north to south; store south to north.
    const std::int64_t row = nrows - 1 - r;
    for (std::int64_t c = 0; c < ncols; ++c) {
      double v;
      if (!(in >> v)) {
        throw DataError(fmt::format("'{}': expected {} values, data ends early", input.string(),
                                    ncols * nrows));
      }
      if (nodata && v == *nodata) {
        throw DataError(fmt::format("'{}': NODATA at row {}, column {}", input.string(), r, c));
      }
      grid[static_cast<std::size_t>(row * ncols + c)] = static_cast<float>(options.positive_depth ? -v : v);
    }
  }

  const double x0 = centered ? xll : xll + 0.5 * cell;
  const double y0 = centered ? yll : yll + 0.5 * cell;
  const std::int64_t step = options.tile_cells;

  std::filesystem::create_directories(out_dir);
  Manifest manifest;
  manifest.origin_x = x0;
  manifest.origin_y = y0;
  manifest.tile_size = static_cast<double>(step) * cell;

  for (std::int64_t tj = 0; tj * step < nrows - 1; ++tj) {
    for (std::int64_t ti = 0; ti * step < ncols - 1; ++ti) {
      const std::int64_t c_begin = ti * step, r_begin = tj * step;
      const std::int64_t c_end = std::min(c_begin + step, ncols - 1);
      const std::int64_t r_end = std::min(r_begin + step, nrows - 1);
      Tile tile;
      tile.origin_x = x0 + static_cast<double>(c_begin) * cell;
      tile.origin_y = y0 + static_cast<double>(r_begin) * cell;
      tile.cols = c_end - c_begin + 1;
      tile.rows = r_end - r_begin + 1;
      tile.cell_size = cell;
      tile.depths.reserve(static_cast<std::size_t>(tile.rows * tile.cols));
      for (std::int64_t r = r_begin; r <= r_end; ++r)
        for (std::int64_t c = c_begin; c <= c_end; ++c)
          tile.depths.push_back(grid[static_cast<std::size_t>(r * ncols + c)]);
      const auto name = fmt::format("tile_{}_{}.bin", ti, tj);
      write_tile(out_dir / name, tile);
      manifest.tiles[{ti, tj}] = name;
    }
  }
  const auto manifest_path = out_dir / "manifest.tiles";
  write_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace auvsim::bathy
