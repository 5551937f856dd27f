#include "exsf/simulation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "exsf/errors.hpp"
#include "exsf/specfun.hpp"

namespace exsf {

void RegionSpec::validate() const {
  if (!(source_radius > 0.0 && source_radius < inner_radius && inner_radius < outer_radius))
    throw DomainError("region requires 0 < source radius < inner radius < outer radius");
}

bool RegionSpec::in_target(const Position3& r, double tol) const {
  const double n = r.norm();
  return n >= inner_radius - tol && n <= outer_radius + tol;
}

double design_exactness_residual(const PositionList& unit_points, int order) {
  std::vector<cdouble> sum(static_cast<std::size_t>(specfun::harmonic_count(order)), 0.0);
  for (const auto& p : unit_points) {
    const auto y = specfun::sph_harmonics_all(order, p);
    for (std::size_t i = 0; i < y.size(); ++i) sum[i] += y[i];
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < sum.size(); ++i)
    worst = std::max(worst, std::abs(sum[i]) / static_cast<double>(unit_points.size()));
  return worst;
}

PositionList load_tdesign(int order, int point_count, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IngestionError("cannot open t-design file " + file.string());
  std::vector<double> coords;
  std::vector<int> coord_line;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v))
        throw IngestionError(file.string() + ":" + std::to_string(line_no) + ": malformed coordinate '" + token + "'");
      coords.push_back(v);
      coord_line.push_back(line_no);
    }
  }
  if (coords.size() % 3 != 0)
    throw IngestionError(file.string() + ": coordinate count " + std::to_string(coords.size()) +
                         " is not a multiple of 3");
  if (static_cast<int>(coords.size() / 3) != point_count)
    throw IngestionError(file.string() + ": expected " + std::to_string(point_count) + " points, found " +
                         std::to_string(coords.size() / 3));
  PositionList pts;
  for (std::size_t i = 0; i < coords.size(); i += 3) {
    Position3 p(coords[i], coords[i + 1], coords[i + 2]);
    const double n = p.norm();
    if (std::abs(n - 1.0) > 1e-8)
      throw IngestionError(file.string() + ":" + std::to_string(coord_line[i]) + ": point " +
                           std::to_string(i / 3 + 1) + " is not on the unit sphere");
    pts.push_back(p / n);
  }
  const double residual = design_exactness_residual(pts, order);
  if (!(residual <= 1e-10))
    throw IngestionError(file.string() + ": not a spherical " + std::to_string(order) +
                         "-design (harmonic mean residual " + std::to_string(residual) + ")");
  return pts;
}

cdouble complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

Position3 sample_shell(double inner, double outer, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Position3 dir;
  do {
    dir = Position3(gauss(rng), gauss(rng), gauss(rng));
  } while (dir.norm() < 1e-12);
  dir.normalize();
  const double lo = inner * inner * inner, hi = outer * outer * outer;
  const double radius = std::cbrt(lo + (hi - lo) * unit(rng));
  return radius * dir;
}

MonopoleScene make_source_scene(const RegionSpec& region, const PositionList& shell_directions,
                                std::mt19937_64& rng) {
  region.validate();
  MonopoleScene scene;
  for (const auto& d : shell_directions) scene.positions.push_back(region.source_radius * d.normalized());
  scene.positions.push_back(Position3::Zero());
  for (std::size_t i = 0; i < scene.positions.size(); ++i) scene.coefficients.push_back(complex_normal(rng));
  return scene;
}

PositionList make_array(const ArraySpec& spec, const RegionSpec& region, std::mt19937_64& rng) {
  region.validate();
  PositionList pts;
  if (spec.kind == ArrayKind::TDesign) {
    if (!(spec.radius >= region.inner_radius && spec.radius <= region.outer_radius))
      throw DomainError("t-design array radius lies outside the target region");
    for (const auto& d : load_tdesign(spec.design_order, spec.points, spec.design_file)) pts.push_back(spec.radius * d);
  } else {
    if (spec.points < 1) throw DomainError("random array needs at least one point");
    for (int i = 0; i < spec.points; ++i) pts.push_back(sample_shell(region.inner_radius, region.outer_radius, rng));
  }
  return pts;
}

CVector measure(const WaveContext& ctx, const MonopoleScene& scene, const PositionList& positions, double snr_db,
                std::mt19937_64& rng) {
  CVector s(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t m = 0; m < positions.size(); ++m)
    s(static_cast<Eigen::Index>(m)) = scene_field(ctx, scene, positions[m]);
  const double power = s.squaredNorm();
  if (!(power > 0.0)) throw DegenerateError("measure: scene produces zero signal at the microphones");
  if (std::isinf(snr_db) && snr_db > 0.0) return s;
  if (std::isnan(snr_db)) throw DomainError("measure: SNR is NaN");
  const double noise_var = power / static_cast<double>(positions.size()) / std::pow(10.0, snr_db / 10.0);
  const double scale = std::sqrt(noise_var);
  for (Eigen::Index m = 0; m < s.size(); ++m) s(m) += scale * complex_normal(rng);
  return s;
}

PositionList sample_test_points(const RegionSpec& region, int count, const PositionList& exclusion,
                                std::mt19937_64& rng) {
  region.validate();
  if (count < 1) throw DomainError("test point count must be positive");
  PositionList pts;
  while (static_cast<int>(pts.size()) < count) {
    const Position3 p = sample_shell(region.inner_radius, region.outer_radius, rng);
    bool clear = true;
    for (const auto& e : exclusion) {
      if ((p - e).norm() <= 1e-6) {
        clear = false;
        break;
      }
    }
    if (clear) pts.push_back(p);
  }
  return pts;
}

std::mt19937_64 substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> labels) {
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(master_seed);
  for (auto l : labels) push(l);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace exsf
