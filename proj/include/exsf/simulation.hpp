#pragma once

// Scene, array and measurement generation for the interpolation experiments.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "exsf/field_model.hpp"
#include "exsf/types.hpp"

namespace exsf {

/// Source ball of radius source_radius inside a target shell [inner, outer].
struct RegionSpec {
  double source_radius = 0.2;
  double inner_radius = 0.4;
  double outer_radius = 1.0;

  /// Throws DomainError unless 0 < source < inner < outer.
  void validate() const;
  bool in_target(const Position3& r, double tol = 1e-12) const;
};

enum class ArrayKind { TDesign, RandomVolumetric };

struct ArraySpec {
  std::string name;
  ArrayKind kind = ArrayKind::TDesign;
  // t-design arrays
  std::filesystem::path design_file;
  int design_order = 9;
  double radius = 0.81;
  // point count (design size or number of random points)
  int points = 48;
};

/// Reads a Hardin-Sloane style table (whitespace separated coordinates, three
/// per point) and verifies it is a spherical design of the stated order: the
/// equal-weight mean of every Y_n^m with 1 <= n <= order must vanish to 1e-10.
/// Throws IngestionError naming the offending line or check.
PositionList load_tdesign(int order, int point_count, const std::filesystem::path& file);

/// Largest |mean_i Y_n^m(x_i)| over 1 <= n <= order.
double design_exactness_residual(const PositionList& unit_points, int order);

/// Standard complex Gaussian: real and imaginary parts each with variance 1/2.
cdouble complex_normal(std::mt19937_64& rng);

/// Uniform by volume in the shell inner <= |r| <= outer.
Position3 sample_shell(double inner, double outer, std::mt19937_64& rng);

/// Shell sources at source_radius * directions plus one source at the origin,
/// each with a standard complex Gaussian coefficient.
MonopoleScene make_source_scene(const RegionSpec& region, const PositionList& shell_directions,
                                std::mt19937_64& rng);

PositionList make_array(const ArraySpec& spec, const RegionSpec& region, std::mt19937_64& rng);

/// Field at the microphones plus complex Gaussian noise calibrated so that
/// 10 log10(sum |u|^2 / sum E|n|^2) = snr_db against this draw's signal power.
/// snr_db = +inf returns the noise-free field. Throws DegenerateError on zero signal.
CVector measure(const WaveContext& ctx, const MonopoleScene& scene, const PositionList& positions, double snr_db,
                std::mt19937_64& rng);

/// count volume-uniform shell points, each farther than 1e-6 m from every excluded point.
PositionList sample_test_points(const RegionSpec& region, int count, const PositionList& exclusion,
                                std::mt19937_64& rng);

/// Independent generator for a labelled sub-task of a seeded run.
std::mt19937_64 substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> labels);

}  // namespace exsf
