#pragma once

// Spherical special functions: Bessel/Hankel, Legendre, spherical harmonics.
//
// Associated Legendre functions include the Condon-Shortley phase (-1)^m, and
// spherical harmonics are orthonormal on the unit sphere with
// conj(Y_n^m) = (-1)^m Y_n^{-m}.

#include <span>
#include <vector>

#include "exsf/types.hpp"

namespace exsf::specfun {

/// Highest order accepted by every function in this namespace.
inline constexpr int kMaxOrder = 25;

/// (order, mode) pair with |mode| <= order.
struct HarmonicIndex {
  int order = 0;
  int mode = 0;

  /// 0-based position in the flat layout n^2 + n + m.
  int flat() const noexcept { return order * order + order + mode; }
  static HarmonicIndex from_flat(int flat);
};

/// Number of (n, m) pairs with n <= max_order.
constexpr int harmonic_count(int max_order) noexcept {
  return (max_order + 1) * (max_order + 1);
}

/// j_n(x) for n = 0..max_order. Downward recurrence normalized against the
/// closed forms of j_0 / j_1, upward where x exceeds max_order.
std::vector<double> sph_bessel_j_all(int max_order, double x);

/// y_n(x) for n = 0..max_order by upward recurrence.
std::vector<double> sph_bessel_y_all(int max_order, double x);

/// h_n^(1)(x) = j_n(x) + i y_n(x) for n = 0..max_order.
std::vector<cdouble> sph_hankel1_all(int max_order, double x);
cdouble sph_hankel1(int order, double x);

/// h_n^(1)(x) in polar form, usable where |h_n| overflows a double
/// (x -> 0 at high order). log_abs[n] = log|h_n(x)|, phase[n] = h_n/|h_n|.
struct HankelPolar {
  std::vector<double> log_abs;
  std::vector<cdouble> phase;
};
HankelPolar sph_hankel1_polar(int max_order, double x);

/// log|h_n(x)|^2 for n = 0..max_order written into out (size max_order+1).
/// Allocation-free; intended for quadrature inner loops.
void sph_hankel1_log_abs2(int max_order, double x, std::span<double> out);

double legendre_poly(int order, double t);
/// P_n(t) for n = 0..max_order written into out.
void legendre_poly_all(int max_order, double t, std::span<double> out);

/// P_n^m(t), 0 <= m <= n, with Condon-Shortley phase.
double assoc_legendre(int order, int mode, double t);

/// Y_n^m(direction) for a unit direction.
cdouble sph_harmonic(HarmonicIndex idx, const Position3& direction);

/// All Y_n^m with n <= max_order in flat order.
std::vector<cdouble> sph_harmonics_all(int max_order, const Position3& direction);

}  // namespace exsf::specfun
