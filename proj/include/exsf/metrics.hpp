#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "exsf/types.hpp"

namespace exsf {

/// Lower clamp for every dB figure so exact reconstructions stay finite.
inline constexpr double kDbFloor = -300.0;

/// 10 log10(sum |u - uhat|^2 / sum |u|^2). Throws DegenerateError on zero truth energy.
double nmse_db(const CVector& truth, const CVector& estimate);

/// 20 log10(|u - uhat| / |u|) at a single point.
double nse_db(cdouble truth, cdouble estimate);

/// Square grid in the plane z = 0 centred on the origin. Samples sit at cell
/// centres; cells with |(x, y)| < mask_radius are masked (NaN).
struct GridSpec {
  double side = 2.0;
  int resolution = 100;
  double mask_radius = 0.2;

  void validate() const;
  double coordinate(int i) const;
  bool masked(int ix, int iy) const;
};

/// Row-major values, index iy * resolution + ix; masked cells hold NaN.
struct PlaneGrid {
  GridSpec spec;
  std::vector<double> values;

  double at(int ix, int iy) const { return values.at(static_cast<std::size_t>(iy * spec.resolution + ix)); }
  std::size_t masked_count() const;
  /// Unmasked values in row-major order.
  std::vector<double> unmasked() const;
};

using FieldFunction = std::function<CVector(const PositionList&)>;

/// Unmasked grid points in row-major order.
PositionList grid_points(const GridSpec& spec);

PlaneGrid nse_map(const FieldFunction& truth, const FieldFunction& estimate, const GridSpec& spec);

/// Real part of a field on the grid (masked like nse_map).
PlaneGrid real_part_map(const FieldFunction& field, const GridSpec& spec);

/// Metadata lines as "# key=value", then one CSV row per grid row (y ascending).
void write_grid_csv(std::ostream& os, const PlaneGrid& grid, const std::map<std::string, std::string>& metadata);

double median(std::vector<double> values);

}  // namespace exsf
