#include "auvsim/envgrid.hpp"

#include "auvsim/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace auvsim::env {

AxisIndex::AxisIndex(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DataError("axis must have at least one coordinate");
  for (std::size_t i = 1; i < coords_.size(); ++i) {
    if (!(coords_[i] > coords_[i - 1])) throw DataError("axis coordinates must be strictly increasing");
  }
}

AxisIndex::Bracket AxisIndex::bracket(double q) const {
  if (std::isnan(q)) throw DataError("axis query is NaN");
  const std::size_t n = coords_.size();
  if (q <= coords_.front()) return {0, 0, 0.0, q < coords_.front()};
  if (q >= coords_.back()) return {n - 1, n - 1, 0.0, q > coords_.back()};
  // First coordinate strictly greater than q; q is interior so 0 < hi < n.
  const auto it = std::upper_bound(coords_.begin(), coords_.end(), q);
  const std::size_t hi = static_cast<std::size_t>(it - coords_.begin());
  const std::size_t lo = hi - 1;
  if (coords_[lo] == q) return {lo, lo, 0.0, false};
  return {lo, hi, (q - coords_[lo]) / (coords_[hi] - coords_[lo]), false};
}

EnvGrid::EnvGrid(std::string field_name, AxisIndex t, AxisIndex x, AxisIndex y, AxisIndex z,
                 std::vector<double> values)
    : field_name_(std::move(field_name)),
      t_(std::move(t)),
      x_(std::move(x)),
      y_(std::move(y)),
      z_(std::move(z)),
      values_(std::move(values)) {
  const std::size_t expected = t_.size() * x_.size() * y_.size() * z_.size();
  if (values_.size() != expected) {
    throw DataError(fmt::format("grid '{}' has {} values, axes need {}", field_name_,
                                values_.size(), expected));
  }
}

EnvGrid EnvGrid::sample(std::string field_name, std::vector<double> t, std::vector<double> x,
                        std::vector<double> y, std::vector<double> z,
                        const std::function<double(double, double, double, double)>& f) {
  std::vector<double> values;
  values.reserve(t.size() * x.size() * y.size() * z.size());
  for (double tv : t)
    for (double xv : x)
      for (double yv : y)
        for (double zv : z) values.push_back(f(tv, xv, yv, zv));
  return EnvGrid(std::move(field_name), AxisIndex(std::move(t)), AxisIndex(std::move(x)),
                 AxisIndex(std::move(y)), AxisIndex(std::move(z)), std::move(values));
}

double EnvGrid::spatial(std::size_t it, const AxisIndex::Bracket& bx, const AxisIndex::Bracket& by,
                        const AxisIndex::Bracket& bz) const {
  const std::size_t nx = bx.lo == bx.hi ? 1 : 2;
  const std::size_t ny = by.lo == by.hi ? 1 : 2;
  const std::size_t nz = bz.lo == bz.hi ? 1 : 2;
  double acc = 0.0;
  for (std::size_t a = 0; a < nx; ++a) {
    const double wx = a ? bx.fraction : 1.0 - bx.fraction;
    const std::size_t ix = a ? bx.hi : bx.lo;
    for (std::size_t b = 0; b < ny; ++b) {
      const double wy = b ? by.fraction : 1.0 - by.fraction;
      const std::size_t iy = b ? by.hi : by.lo;
      for (std::size_t c = 0; c < nz; ++c) {
        const double wz = c ? bz.fraction : 1.0 - bz.fraction;
        const std::size_t iz = c ? bz.hi : bz.lo;
        const double v = values_[index(it, ix, iy, iz)];
        if (std::isnan(v)) {
          throw DataError(fmt::format("grid '{}' has no sample at t={} x={} y={} z={}", field_name_,
                                      t_[it], x_[ix], y_[iy], z_[iz]));
        }
        acc += wx * wy * wz * v;
      }
    }
  }
  return acc;
}

EnvGrid::Sample EnvGrid::query(double t, const Vec3& p) const {
  const auto bt = t_.bracket(t);
  const auto bx = x_.bracket(p.x());
  const auto by = y_.bracket(p.y());
  const auto bz = z_.bracket(p.z());
  Sample s;
  s.clamped = bt.out_of_range || bx.out_of_range || by.out_of_range || bz.out_of_range;
  const double before = spatial(bt.lo, bx, by, bz);
  if (bt.lo == bt.hi) {
    s.value = before;
  } else {
    const double after = spatial(bt.hi, bx, by, bz);
    s.value = before + bt.fraction * (after - before);
  }
  return s;
}

namespace {

constexpr double kEarthRadius = 6371000.0;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

struct Row {
  double t, x, y, z, v;
  int line;
};

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t position_of(const std::vector<double>& axis, double q) {
  return static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), q) - axis.begin());
}

}  // namespace

EnvGrid parse_env_csv(std::istream& in, const Projection& projection, std::string field_name,
                      const std::string& source) {
  std::string line;
  int line_no = 0;
  bool geographic = false;
  bool have_header = false;
  std::vector<Row> rows;

  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto cols = split_csv(text);
    if (!have_header) {
      std::string header;
      for (std::size_t i = 0; i < cols.size(); ++i) header += (i ? "," : "") + std::string(cols[i]);
      if (header == "t,x,y,z,value") {
        geographic = false;
      } else if (header == "t,lat,lon,depth,value") {
        geographic = true;
        if (projection.kind == Projection::Kind::None) {
          throw DataError(fmt::format("{}:{}: lat/lon columns need a projection", source, line_no));
        }
      } else {
        throw DataError(fmt::format(
            "{}:{}: expected header 't,x,y,z,value' or 't,lat,lon,depth,value'", source, line_no));
      }
      have_header = true;
      continue;
    }
    if (cols.size() != 5) {
      throw DataError(fmt::format("{}:{}: expected 5 columns, got {}", source, line_no, cols.size()));
    }
    double f[5];
    for (int i = 0; i < 5; ++i) {
      auto c = cols[i];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), f[i]);
      if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw DataError(
            fmt::format("{}:{}: cannot parse '{}' as a number", source, line_no, std::string(c)));
      }
    }
    Row r{f[0], f[1], f[2], f[3], f[4], line_no};
    if (geographic) {
      const double lat = f[1], lon = f[2], depth = f[3];
      const double lat0 = deg2rad(projection.lat0_deg);
      r.x = kEarthRadius * deg2rad(lon - projection.lon0_deg) * std::cos(lat0);
      r.y = kEarthRadius * deg2rad(lat - projection.lat0_deg);
      r.z = -depth;
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw DataError(fmt::format("{}: no data rows", source));

  std::vector<double> ts, xs, ys, zs;
  ts.reserve(rows.size());
  xs.reserve(rows.size());
  ys.reserve(rows.size());
  zs.reserve(rows.size());
  for (const auto& r : rows) {
    ts.push_back(r.t);
    xs.push_back(r.x);
    ys.push_back(r.y);
    zs.push_back(r.z);
  }
  ts = unique_sorted(std::move(ts));
  xs = unique_sorted(std::move(xs));
  ys = unique_sorted(std::move(ys));
  zs = unique_sorted(std::move(zs));

  const std::size_t total = ts.size() * xs.size() * ys.size() * zs.size();
  std::vector<double> values(total, EnvGrid::kMissing);
  std::vector<char> seen(total, 0);
  std::size_t duplicates = 0;
  int first_duplicate = 0;
  for (const auto& r : rows) {
    const std::size_t idx =
        ((position_of(ts, r.t) * xs.size() + position_of(xs, r.x)) * ys.size() +
         position_of(ys, r.y)) * zs.size() + position_of(zs, r.z);
    if (seen[idx]) {
      if (!duplicates) first_duplicate = r.line;
      ++duplicates;
    }
    seen[idx] = 1;
    values[idx] = r.v;
  }
  if (duplicates) {
    spdlog::warn("{}: {} duplicate coordinate rows (first at line {}); last value kept", source,
                 duplicates, first_duplicate);
  }
  return EnvGrid(std::move(field_name), AxisIndex(std::move(ts)), AxisIndex(std::move(xs)),
                 AxisIndex(std::move(ys)), AxisIndex(std::move(zs)), std::move(values));
}

EnvGrid load_env(const std::filesystem::path& path, const Projection& projection,
                 std::string field_name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open env file '" + path.string() + "'");
  if (field_name.empty()) field_name = path.stem().string();
  return parse_env_csv(in, projection, std::move(field_name), path.string());
}

void write_env_csv(const EnvGrid& grid, std::ostream& out) {
  out << "t,x,y,z,value\n";
  for (std::size_t it = 0; it < grid.t_axis().size(); ++it)
    for (std::size_t ix = 0; ix < grid.x_axis().size(); ++ix)
      for (std::size_t iy = 0; iy < grid.y_axis().size(); ++iy)
        for (std::size_t iz = 0; iz < grid.z_axis().size(); ++iz) {
          const double v = grid.at(it, ix, iy, iz);
          if (std::isnan(v)) continue;
          out << fmt::format("{},{},{},{},{}\n", grid.t_axis()[it], grid.x_axis()[ix],
                             grid.y_axis()[iy], grid.z_axis()[iz], v);
        }
}

void export_env(const EnvGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_env_csv(grid, out);
}

Vec3 current_at(const CurrentField& field, double t, const Vec3& p) {
  Vec3 c = Vec3::Zero();
  if (field.east) c.x() = field.east->value(t, p);
  if (field.north) c.y() = field.north->value(t, p);
  if (field.up) c.z() = field.up->value(t, p);
  return c;
}

}  // namespace auvsim::env
