#pragma once

// Ground-truth exterior fields: free-field Green's function, monopole scenes
// and the outgoing spherical wave functions psi_{n,m}(r) = h_n(k|r|) Y_n^m(r/|r|).
//
// Time convention e^{-i omega t}: outgoing waves carry e^{+ikd}.

#include <vector>

#include "exsf/specfun.hpp"
#include "exsf/types.hpp"

namespace exsf {

inline constexpr double kDefaultSpeedOfSound = 343.0;

class WaveContext {
 public:
  WaveContext(double frequency_hz, double speed_of_sound = kDefaultSpeedOfSound);

  double frequency() const noexcept { return frequency_; }
  double speed_of_sound() const noexcept { return speed_of_sound_; }
  double wavenumber() const noexcept { return wavenumber_; }

 private:
  double frequency_;
  double speed_of_sound_;
  double wavenumber_;
};

struct MonopoleScene {
  PositionList positions;
  std::vector<cdouble> coefficients;

  /// Throws DomainError unless sizes match, are >= 1, and every source lies
  /// within source_radius of the origin.
  void validate(double source_radius) const;
};

/// e^{ikd} / (4 pi d), d = |eval_point - source|.
cdouble green_free(const WaveContext& ctx, const Position3& source, const Position3& eval_point);

cdouble scene_field(const WaveContext& ctx, const MonopoleScene& scene, const Position3& eval_point);

cdouble psi(const WaveContext& ctx, specfun::HarmonicIndex idx, const Position3& r);

/// psi_{n,m}(r) for all n <= max_order in flat order n^2 + n + m.
std::vector<cdouble> psi_all(const WaveContext& ctx, int max_order, const Position3& r);

}  // namespace exsf
