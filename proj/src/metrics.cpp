#include "exsf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "exsf/errors.hpp"

namespace exsf {

double nmse_db(const CVector& truth, const CVector& estimate) {
  if (truth.size() != estimate.size() || truth.size() == 0)
    throw DomainError("nmse: vectors must have equal nonzero length");
  const double energy = truth.squaredNorm();
  if (!(energy > 0.0)) throw DegenerateError("nmse: reference field has zero energy");
  const double err = (truth - estimate).squaredNorm();
  if (err == 0.0) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(err / energy));
}

double nse_db(cdouble truth, cdouble estimate) {
  const double ref = std::abs(truth);
  if (!(ref > 0.0)) throw DegenerateError("nse: reference field is zero");
  const double err = std::abs(truth - estimate);
  if (err == 0.0) return kDbFloor;
  return std::max(kDbFloor, 20.0 * std::log10(err / ref));
}

void GridSpec::validate() const {
  if (!(side > 0.0) || resolution < 1 || !(mask_radius >= 0.0)) throw DomainError("invalid grid specification");
}

double GridSpec::coordinate(int i) const { return -0.5 * side + (i + 0.5) * side / resolution; }

bool GridSpec::masked(int ix, int iy) const {
  return std::hypot(coordinate(ix), coordinate(iy)) < mask_radius;
}

std::size_t PlaneGrid::masked_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }));
}

std::vector<double> PlaneGrid::unmasked() const {
  std::vector<double> out;
  for (double v : values) {
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

PositionList grid_points(const GridSpec& spec) {
  spec.validate();
  PositionList pts;
  for (int iy = 0; iy < spec.resolution; ++iy) {
    for (int ix = 0; ix < spec.resolution; ++ix) {
      if (!spec.masked(ix, iy)) pts.emplace_back(spec.coordinate(ix), spec.coordinate(iy), 0.0);
    }
  }
  return pts;
}

namespace {

template <typename Cell>
PlaneGrid fill_grid(const GridSpec& spec, const CVector& a, const CVector* b, Cell&& cell) {
  PlaneGrid grid{spec, std::vector<double>(static_cast<std::size_t>(spec.resolution * spec.resolution), NAN)};
  Eigen::Index k = 0;
  for (int iy = 0; iy < spec.resolution; ++iy) {
    for (int ix = 0; ix < spec.resolution; ++ix) {
      if (spec.masked(ix, iy)) continue;
      grid.values[static_cast<std::size_t>(iy * spec.resolution + ix)] = cell(a(k), b ? (*b)(k) : cdouble{});
      ++k;
    }
  }
  return grid;
}

}  // namespace

PlaneGrid nse_map(const FieldFunction& truth, const FieldFunction& estimate, const GridSpec& spec) {
  const auto pts = grid_points(spec);
  const CVector u = truth(pts);
  const CVector uhat = estimate(pts);
  if (u.size() != uhat.size() || static_cast<std::size_t>(u.size()) != pts.size())
    throw DomainError("nse_map: field functions returned the wrong number of values");
  return fill_grid(spec, u, &uhat, [](cdouble t, cdouble e) { return nse_db(t, e); });
}

PlaneGrid real_part_map(const FieldFunction& field, const GridSpec& spec) {
  const auto pts = grid_points(spec);
  const CVector u = field(pts);
  return fill_grid(spec, u, nullptr, [](cdouble t, cdouble) { return t.real(); });
}

void write_grid_csv(std::ostream& os, const PlaneGrid& grid, const std::map<std::string, std::string>& metadata) {
  os << "# side_m=" << grid.spec.side << "\n# resolution=" << grid.spec.resolution
     << "\n# mask_radius_m=" << grid.spec.mask_radius << "\n# plane=z0\n# layout=row-major,y-ascending,x-ascending\n";
  for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
  std::ostringstream cell;
  cell.precision(10);
  for (int iy = 0; iy < grid.spec.resolution; ++iy) {
    for (int ix = 0; ix < grid.spec.resolution; ++ix) {
      if (ix) os << ',';
      const double v = grid.at(ix, iy);
      if (std::isnan(v)) {
        os << "nan";
      } else {
        cell.str("");
        cell << v;
        os << cell.str();
      }
    }
    os << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace exsf
