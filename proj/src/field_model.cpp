#include "exsf/field_model.hpp"

#include <cmath>
#include <string>

#include "exsf/errors.hpp"

namespace exsf {

WaveContext::WaveContext(double frequency_hz, double speed_of_sound)
    : frequency_(frequency_hz), speed_of_sound_(speed_of_sound) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
    throw DomainError("frequency must be positive, got " + std::to_string(frequency_hz));
  if (!(speed_of_sound > 0.0) || !std::isfinite(speed_of_sound))
    throw DomainError("speed of sound must be positive, got " + std::to_string(speed_of_sound));
  wavenumber_ = 2.0 * kPi * frequency_ / speed_of_sound_;
}

void MonopoleScene::validate(double source_radius) const {
  if (positions.empty()) throw DomainError("scene has no sources");
  if (positions.size() != coefficients.size())
    throw DomainError("scene has " + std::to_string(positions.size()) + " positions but " +
                      std::to_string(coefficients.size()) + " coefficients");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!(positions[i].norm() <= source_radius * (1.0 + 1e-12)))
      throw DomainError("source " + std::to_string(i) + " lies outside the source region");
  }
}

cdouble green_free(const WaveContext& ctx, const Position3& source, const Position3& eval_point) {
  const double d = (eval_point - source).norm();
  if (!(d > 0.0)) throw SingularityError("Green's function evaluated at its source");
  return std::polar(1.0 / (4.0 * kPi * d), ctx.wavenumber() * d);
}

cdouble scene_field(const WaveContext& ctx, const MonopoleScene& scene, const Position3& eval_point) {
  cdouble sum = 0.0;
  for (std::size_t i = 0; i < scene.positions.size(); ++i)
    sum += scene.coefficients[i] * green_free(ctx, scene.positions[i], eval_point);
  return sum;
}

std::vector<cdouble> psi_all(const WaveContext& ctx, int max_order, const Position3& r) {
  const double radius = r.norm();
  if (!(radius > 0.0)) throw SingularityError("spherical wave function evaluated at the origin");
  const auto h = specfun::sph_hankel1_all(max_order, ctx.wavenumber() * radius);
  auto out = specfun::sph_harmonics_all(max_order, r / radius);
  for (int n = 0; n <= max_order; ++n) {
    for (int m = -n; m <= n; ++m) out[static_cast<std::size_t>(n * n + n + m)] *= h[static_cast<std::size_t>(n)];
  }
  return out;
}

cdouble psi(const WaveContext& ctx, specfun::HarmonicIndex idx, const Position3& r) {
  if (std::abs(idx.mode) > idx.order) throw DomainError("psi requires |m| <= n");
  return psi_all(ctx, idx.order, r)[static_cast<std::size_t>(idx.flat())];
}

}  // namespace exsf
