#pragma once

#include "auvsim/types.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace auvsim::env {

/// Sorted, strictly increasing coordinates of one grid axis. Spacing is
/// arbitrary (log-spaced depth axes are common).
class AxisIndex {
 public:
  struct Bracket {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double fraction = 0.0;  // weight of `hi`; 0 when lo == hi
    bool out_of_range = false;
  };

  AxisIndex() = default;
  explicit AxisIndex(std::vector<double> coords);

  /// Binary search. An exact hit gives lo == hi; a query outside the axis is
  /// clamped to the nearest end and flagged.
  Bracket bracket(double q) const;

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

/// Time-varying scalar field on a non-uniform (t, x, y, z) grid. Values are
/// stored densely; cells that were never observed hold kMissing (NaN).
class EnvGrid {
 public:
  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  struct Sample {
    double value = 0.0;
    bool clamped = false;  // some coordinate fell outside the grid hull
  };

  EnvGrid() = default;
  EnvGrid(std::string field_name, AxisIndex t, AxisIndex x, AxisIndex y, AxisIndex z,
          std::vector<double> values);

  /// Fills every node from `f(t, x, y, z)`.
  static EnvGrid sample(std::string field_name, std::vector<double> t, std::vector<double> x,
                        std::vector<double> y, std::vector<double> z,
                        const std::function<double(double, double, double, double)>& f);

  /// Multilinear interpolation in space within the two bracketing time slices,
  /// then linear in time. Axes hit exactly collapse. Throws DataError if a
  /// contributing node is missing.
  Sample query(double t, const Vec3& p) const;
  double value(double t, const Vec3& p) const { return query(t, p).value; }

  const std::string& field_name() const { return field_name_; }
  const AxisIndex& t_axis() const { return t_; }
  const AxisIndex& x_axis() const { return x_; }
  const AxisIndex& y_axis() const { return y_; }
  const AxisIndex& z_axis() const { return z_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t index(std::size_t it, std::size_t ix, std::size_t iy, std::size_t iz) const {
    return ((it * x_.size() + ix) * y_.size() + iy) * z_.size() + iz;
  }
  double at(std::size_t it, std::size_t ix, std::size_t iy, std::size_t iz) const {
    return values_[index(it, ix, iy, iz)];
  }

 private:
  double spatial(std::size_t it, const AxisIndex::Bracket& bx, const AxisIndex::Bracket& by,
                 const AxisIndex::Bracket& bz) const;

  std::string field_name_ = "value";
  AxisIndex t_, x_, y_, z_;
  std::vector<double> values_;
};

/// Optional lat/lon conversion applied at load time.
struct Projection {
  enum class Kind { None, Equirectangular };
  Kind kind = Kind::None;
  double lat0_deg = 0.0;
  double lon0_deg = 0.0;

  static Projection none() { return {}; }
  static Projection equirectangular(double lat0, double lon0) {
    return {Kind::Equirectangular, lat0, lon0};
  }
};

/// Reads `t,x,y,z,value` (or `t,lat,lon,depth,value` with a projection).
/// Rows may come in any order; duplicates keep the last value.
EnvGrid parse_env_csv(std::istream& in, const Projection& projection = {},
                      std::string field_name = "value", const std::string& source = "<stream>");
EnvGrid load_env(const std::filesystem::path& path, const Projection& projection = {},
                 std::string field_name = {});

/// Writes every present node as `t,x,y,z,value` with round-trip precision.
void write_env_csv(const EnvGrid& grid, std::ostream& out);
void export_env(const EnvGrid& grid, const std::filesystem::path& path);

/// World-frame current components; absent components read as zero.
struct CurrentField {
  std::shared_ptr<const EnvGrid> east;
  std::shared_ptr<const EnvGrid> north;
  std::shared_ptr<const EnvGrid> up;

  bool empty() const { return !east && !north && !up; }
};

Vec3 current_at(const CurrentField& field, double t, const Vec3& p);

}  // namespace auvsim::env
