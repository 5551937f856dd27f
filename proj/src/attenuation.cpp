#include "exsf/attenuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "exsf/errors.hpp"
#include "exsf/quadrature.hpp"
#include "exsf/specfun.hpp"

namespace exsf {

void ConstraintBox::validate() const {
  if (!(delta_min > 0.0) || !(delta_max > delta_min))
    throw DomainError("constraint box requires 0 < delta_min < delta_max");
  if (!(beta_min > 0.0) || !(beta_max > beta_min))
    throw DomainError("constraint box requires 0 < beta_min < beta_max");
}

bool ConstraintBox::contains(double alpha, double beta, double slack) const {
  const double gap = alpha - beta;
  return gap >= delta_min - slack && gap <= delta_max + slack && beta >= beta_min - slack &&
         beta <= beta_max + slack;
}

void AttenuationParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
}

namespace {

constexpr int kMaxOrders = specfun::kMaxOrder + 1;

// Integrand in u = log r:
//   g_n(u) = -exp((log alpha - u) / beta) + log|h_n(e^u)|^2 + u.
// The left side dies double-exponentially, the right side like e^{-u}.
struct LogIntegrand {
  double log_alpha;
  double beta;
  int max_order;

  double weight_exponent(double u) const { return (log_alpha - u) / beta; }

  void operator()(double u, std::span<double> g) const {
    const double e = weight_exponent(u);
    const double log_weight = e > 700.0 ? -INFINITY : -std::exp(e);
    specfun::sph_hankel1_log_abs2(max_order, std::exp(u), g);
    for (int n = 0; n <= max_order; ++n) g[n] += log_weight + u;
  }

  // d/du of the weight term.
  double weight_slope(double u) const {
    const double e = weight_exponent(u);
    return e > 700.0 ? INFINITY : std::exp(e) / beta;
  }
};

std::string describe(int order, double alpha, double beta) {
  std::ostringstream os;
  os.precision(17);
  os << "(n=" << order << ", alpha=" << alpha << ", beta=" << beta << ")";
  return os.str();
}

std::vector<double> compute_log_xi(double alpha, double beta, int max_order) {
  if (max_order < 0) throw DomainError("negative order");
  if (max_order > specfun::kMaxOrder)
    throw UnsupportedOrderError("attenuation order exceeds supported maximum");
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw DomainError("attenuation requires alpha > 0 and beta > 0");

  const LogIntegrand g{std::log(alpha), beta, max_order};
  const std::size_t width = static_cast<std::size_t>(max_order + 1);
  std::array<double, kMaxOrders> buf{};
  std::span<double> vals(buf.data(), width);

  // Coarse scan for per-order peak heights (scaling) and integration bounds.
  constexpr double kStep = 0.25;
  std::vector<double> peak(width, -INFINITY);
  auto absorb = [&](double u) {
    g(u, vals);
    for (std::size_t n = 0; n < width; ++n) peak[n] = std::max(peak[n], vals[n]);
  };
  auto all_below = [&](double margin) {
    for (std::size_t n = 0; n < width; ++n) {
      if (!(vals[n] < peak[n] - margin)) return false;
    }
    return true;
  };

  const double start = g.log_alpha;
  absorb(start);
  double right = start;
  for (int i = 0; i < 100000; ++i) {
    right += kStep;
    absorb(right);
    if (g.weight_slope(right) < 0.5 && all_below(80.0)) break;
  }
  double left = start;
  const double steep = 2.0 * max_order + 4.0;
  for (int i = 0; i < 100000; ++i) {
    left -= kStep;
    absorb(left);
    if (g.weight_slope(left) > steep && all_below(800.0)) break;
  }
  for (std::size_t n = 0; n < width; ++n) {
    if (!std::isfinite(peak[n])) throw NumericError("attenuation integrand has no finite peak " +
                                                    describe(static_cast<int>(n), alpha, beta));
  }

  quadrature::Options opts;
  opts.rel_tol = 1e-12;
  opts.max_subdivisions = 4000;
  const auto result = quadrature::integrate_vector(
      [&](double u, std::span<double> out) {
        g(u, out);
        for (std::size_t n = 0; n < width; ++n) out[n] = std::exp(out[n] - peak[n]);
      },
      width, left, right, opts);

  std::vector<double> log_xi(width);
  for (std::size_t n = 0; n < width; ++n) {
    const double v = result.value[n];
    if (!(v > 0.0) || !std::isfinite(v) || result.error[n] > 1e-10 * v)
      throw NumericError("attenuation quadrature did not converge " + describe(static_cast<int>(n), alpha, beta));
    log_xi[n] = -(peak[n] + std::log(v));
  }
  return log_xi;
}

}  // namespace

double log_xi(int order, double alpha, double beta) {
  if (order < 0) throw DomainError("negative order");
  return compute_log_xi(alpha, beta, order).back();
}

double xi(int order, double alpha, double beta) { return std::exp(log_xi(order, alpha, beta)); }

XiTable::XiTable(double alpha, double beta, int max_order)
    : alpha_(alpha), beta_(beta), log_xi_(compute_log_xi(alpha, beta, max_order)) {}

double XiTable::value(int order) const { return std::exp(log_value(order)); }

}  // namespace exsf
