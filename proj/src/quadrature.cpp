#include "exsf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace exsf::quadrature {

namespace {

// Kronrod nodes (positive half, descending) and weights; Gauss weights for
// the embedded 7-point rule live on the odd Kronrod nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  std::vector<double> value, error;
  double priority;  // largest error / tolerance over components
  bool operator<(const Segment& o) const { return priority < o.priority; }
};

template <typename Eval>
void gk15(Eval&& eval, std::size_t width, double a, double b, std::vector<double>& value,
          std::vector<double>& error, std::vector<double>& scratch) {
  const double center = 0.5 * (a + b), half = 0.5 * (b - a);
  value.assign(width, 0.0);
  std::vector<double> gauss(width, 0.0);
  scratch.resize(width);
  thread_local std::vector<double> left;
  left.resize(width);

  eval(center, scratch);
  for (std::size_t c = 0; c < width; ++c) {
    value[c] = kKronrod[7] * scratch[c];
    gauss[c] = kGauss[3] * scratch[c];
  }
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    eval(center - dx, left);
    eval(center + dx, scratch);
    for (std::size_t c = 0; c < width; ++c) {
      const double sum = left[c] + scratch[c];
      value[c] += kKronrod[i] * sum;
      if (i % 2 == 1) gauss[c] += kGauss[i / 2] * sum;
    }
  }
  error.assign(width, 0.0);
  for (std::size_t c = 0; c < width; ++c) {
    value[c] *= half;
    error[c] = std::abs(value[c] - gauss[c] * half);
  }
}

double component_tolerance(double total, const Options& opts) {
  return std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
}

}  // namespace

VectorResult integrate_vector(const std::function<void(double, std::span<double>)>& f, std::size_t width,
                              double a, double b, const Options& opts) {
  VectorResult result;
  auto eval = [&](double x, std::vector<double>& out) {
    f(x, std::span<double>(out.data(), width));
    ++result.evaluations;
  };

  std::vector<double> scratch;
  Segment first{a, b, {}, {}, 0.0};
  gk15(eval, width, a, b, first.value, first.error, scratch);

  std::vector<double> total = first.value, total_err = first.error;
  auto priority = [&](const Segment& s) {
    double p = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      const double tol = component_tolerance(total[c], opts);
      p = std::max(p, tol > 0.0 ? s.error[c] / tol : (s.error[c] > 0.0 ? INFINITY : 0.0));
    }
    return p;
  };
  auto done = [&] {
    for (std::size_t c = 0; c < width; ++c) {
      if (total_err[c] > component_tolerance(total[c], opts)) return false;
    }
    return true;
  };

  std::priority_queue<Segment> heap;
  first.priority = priority(first);
  heap.push(std::move(first));

  while (!done() && result.subdivisions < opts.max_subdivisions) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left{worst.a, mid, {}, {}, 0.0}, right{mid, worst.b, {}, {}, 0.0};
    gk15(eval, width, left.a, left.b, left.value, left.error, scratch);
    gk15(eval, width, right.a, right.b, right.value, right.error, scratch);
    for (std::size_t c = 0; c < width; ++c) {
      total[c] += left.value[c] + right.value[c] - worst.value[c];
      total_err[c] += left.error[c] + right.error[c] - worst.error[c];
    }
    ++result.subdivisions;
    left.priority = priority(left);
    right.priority = priority(right);
    heap.push(std::move(left));
    heap.push(std::move(right));
  }

  // Re-sum from the segments to shed accumulated cancellation in the running totals.
  std::fill(total.begin(), total.end(), 0.0);
  std::fill(total_err.begin(), total_err.end(), 0.0);
  while (!heap.empty()) {
    const Segment& s = heap.top();
    for (std::size_t c = 0; c < width; ++c) {
      total[c] += s.value[c];
      total_err[c] += s.error[c];
    }
    heap.pop();
  }
  result.value = std::move(total);
  result.error = std::move(total_err);
  result.converged = true;
  for (std::size_t c = 0; c < width; ++c) {
    if (result.error[c] > component_tolerance(result.value[c], opts)) result.converged = false;
  }
  return result;
}

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
  auto vec = integrate_vector([&](double x, std::span<double> out) { out[0] = f(x); }, 1, a, b, opts);
  return {vec.value[0], vec.error[0], vec.evaluations, vec.subdivisions, vec.converged};
}

}  // namespace exsf::quadrature
