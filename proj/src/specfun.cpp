#include "exsf/specfun.hpp"

#include <cmath>
#include <string>

#include "exsf/errors.hpp"

namespace exsf::specfun {

namespace {

void check_order(int order) {
  if (order < 0) throw DomainError("negative order " + std::to_string(order));
  if (order > kMaxOrder)
    throw UnsupportedOrderError("order " + std::to_string(order) + " exceeds supported maximum " +
                                std::to_string(kMaxOrder));
}

void check_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("spherical Bessel argument must be positive and finite, got " +
                      std::to_string(x));
}

void check_unit_interval(double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("Legendre argument outside [-1, 1]: " + std::to_string(t));
}

// Normalized associated Legendre values Pbar_n^m for m >= 0, stored at
// n(n+1)/2 + m. sin_theta is passed separately so callers with a Cartesian
// direction avoid the cancellation in sqrt(1 - t^2).
void normalized_legendre_all(int max_order, double t, double sin_theta, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>((max_order + 1) * (max_order + 2) / 2), 0.0);
  auto at = [](int n, int m) { return static_cast<std::size_t>(n * (n + 1) / 2 + m); };
  out[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= max_order; ++m) {
    out[at(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_theta * out[at(m - 1, m - 1)];
  }
  for (int m = 0; m < max_order; ++m) {
    out[at(m + 1, m)] = t * std::sqrt(2.0 * m + 3.0) * out[at(m, m)];
    for (int n = m + 2; n <= max_order; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) / (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      out[at(n, m)] = a * (t * out[at(n - 1, m)] - b * out[at(n - 2, m)]);
    }
  }
}

void check_unit_direction(const Position3& d) {
  const double norm = d.norm();
  if (!(std::abs(norm - 1.0) <= 1e-12))
    throw DomainError("direction is not a unit vector (norm " + std::to_string(norm) + ")");
}

}  // namespace

HarmonicIndex HarmonicIndex::from_flat(int flat) {
  if (flat < 0) throw DomainError("negative flat harmonic index");
  const int n = static_cast<int>(std::sqrt(static_cast<double>(flat)));
  // guard against sqrt rounding
  int order = n;
  while (order * order > flat) --order;
  while ((order + 1) * (order + 1) <= flat) ++order;
  return {order, flat - order * order - order};
}

std::vector<double> sph_bessel_j_all(int max_order, double x) {
  check_order(max_order);
  check_argument(x);
  std::vector<double> j(static_cast<std::size_t>(max_order + 1));
  const double s = std::sin(x), c = std::cos(x);
  const double j0 = s / x;
  const double j1 = s / (x * x) - c / x;

  if (x > max_order) {
    j[0] = j0;
    if (max_order >= 1) j[1] = j1;
    for (int n = 1; n < max_order; ++n) j[n + 1] = (2.0 * n + 1.0) / x * j[n] - j[n - 1];
    return j;
  }

  // Miller's algorithm. Values grow downward; rescale to stay finite.
  const int start = max_order + 40 + static_cast<int>(x / 2.0);
  double upper = 0.0;   // j_{n+1}
  double current = 1e-30;  // j_n
  for (int n = start; n > 0; --n) {
    const double lower = (2.0 * n + 1.0) / x * current - upper;  // j_{n-1}
    upper = current;
    current = lower;
    if (n - 1 <= max_order) j[n - 1] = current;
    if (std::abs(current) > 1e200) {
      current *= 1e-200;
      upper *= 1e-200;
      for (int m = n - 1; m <= max_order; ++m) {
        if (m >= 0) j[m] *= 1e-200;
      }
    }
  }
  const double scale = (std::abs(j0) >= std::abs(j1) || max_order == 0) ? j0 / j[0] : j1 / j[1];
  for (auto& v : j) v *= scale;
  return j;
}

std::vector<double> sph_bessel_y_all(int max_order, double x) {
  check_order(max_order);
  check_argument(x);
  std::vector<double> y(static_cast<std::size_t>(max_order + 1));
  const double s = std::sin(x), c = std::cos(x);
  y[0] = -c / x;
  if (max_order >= 1) y[1] = -c / (x * x) - s / x;
  for (int n = 1; n < max_order; ++n) y[n + 1] = (2.0 * n + 1.0) / x * y[n] - y[n - 1];
  return y;
}

std::vector<cdouble> sph_hankel1_all(int max_order, double x) {
  const auto j = sph_bessel_j_all(max_order, x);
  const auto y = sph_bessel_y_all(max_order, x);
  std::vector<cdouble> h(j.size());
  for (std::size_t n = 0; n < h.size(); ++n) h[n] = {j[n], y[n]};
  return h;
}

cdouble sph_hankel1(int order, double x) {
  check_order(order);
  return sph_hankel1_all(order, x)[static_cast<std::size_t>(order)];
}

HankelPolar sph_hankel1_polar(int max_order, double x) {
  check_order(max_order);
  check_argument(x);
  HankelPolar out;
  out.log_abs.resize(static_cast<std::size_t>(max_order + 1));
  out.phase.resize(static_cast<std::size_t>(max_order + 1));
  // h_0 = -i e^{ix} / x; ratios rho_n = h_n / h_{n-1} obey
  // rho_{n+1} = (2n+1)/x - 1/rho_n with rho_1 = 1/x - i.
  out.log_abs[0] = -std::log(x);
  out.phase[0] = cdouble(0.0, -1.0) * std::polar(1.0, x);
  cdouble rho(1.0 / x, -1.0);
  for (int n = 1; n <= max_order; ++n) {
    if (n > 1) rho = (2.0 * n - 1.0) / x - 1.0 / rho;
    const double mag = std::abs(rho);
    out.log_abs[n] = out.log_abs[n - 1] + std::log(mag);
    out.phase[n] = out.phase[n - 1] * (rho / mag);
  }
  return out;
}

void sph_hankel1_log_abs2(int max_order, double x, std::span<double> out) {
  // Same ratio recurrence as sph_hankel1_polar without the phase bookkeeping.
  out[0] = -2.0 * std::log(x);
  double re = 1.0 / x, im = -1.0;
  for (int n = 1; n <= max_order; ++n) {
    if (n > 1) {
      const double inv = 1.0 / (re * re + im * im);
      re = (2.0 * n - 1.0) / x - re * inv;
      im = im * inv;
    }
    out[n] = out[n - 1] + std::log(re * re + im * im);
  }
}

double legendre_poly(int order, double t) {
  check_order(order);
  check_unit_interval(t);
  double p0 = 1.0, p1 = t;
  if (order == 0) return p0;
  for (int n = 1; n < order; ++n) {
    const double p2 = ((2.0 * n + 1.0) * t * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_poly_all(int max_order, double t, std::span<double> out) {
  out[0] = 1.0;
  if (max_order == 0) return;
  out[1] = t;
  for (int n = 1; n < max_order; ++n)
    out[n + 1] = ((2.0 * n + 1.0) * t * out[n] - n * out[n - 1]) / (n + 1.0);
}

double assoc_legendre(int order, int mode, double t) {
  check_order(order);
  if (mode < 0 || mode > order)
    throw DomainError("associated Legendre mode must satisfy 0 <= m <= n");
  check_unit_interval(t);
  std::vector<double> table;
  normalized_legendre_all(order, t, std::sqrt((1.0 - t) * (1.0 + t)), table);
  const double normalized = table[static_cast<std::size_t>(order * (order + 1) / 2 + mode)];
  // Pbar = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P
  const double log_norm = 0.5 * (std::log((2.0 * order + 1.0) / (4.0 * kPi)) +
                                 std::lgamma(order - mode + 1.0) - std::lgamma(order + mode + 1.0));
  return normalized * std::exp(-log_norm);
}

cdouble sph_harmonic(HarmonicIndex idx, const Position3& direction) {
  check_order(idx.order);
  if (std::abs(idx.mode) > idx.order) throw DomainError("spherical harmonic requires |m| <= n");
  check_unit_direction(direction);
  const auto all = sph_harmonics_all(idx.order, direction);
  return all[static_cast<std::size_t>(idx.flat())];
}

std::vector<cdouble> sph_harmonics_all(int max_order, const Position3& direction) {
  check_order(max_order);
  check_unit_direction(direction);
  const double sin_theta = std::hypot(direction.x(), direction.y());
  const double cos_theta = direction.z();
  const double phi = std::atan2(direction.y(), direction.x());

  std::vector<double> legendre;
  normalized_legendre_all(max_order, cos_theta, sin_theta, legendre);

  std::vector<cdouble> out(static_cast<std::size_t>(harmonic_count(max_order)));
  for (int n = 0; n <= max_order; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double p = legendre[static_cast<std::size_t>(n * (n + 1) / 2 + m)];
      const cdouble y = p * std::polar(1.0, m * phi);
      out[static_cast<std::size_t>(n * n + n + m)] = y;
      if (m > 0) out[static_cast<std::size_t>(n * n + n - m)] = ((m % 2) ? -1.0 : 1.0) * std::conj(y);
    }
  }
  return out;
}

}  // namespace exsf::specfun
