#pragma once

#include <functional>
#include <span>
#include <vector>

namespace exsf::quadrature {

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts = {});

/// Vector-valued variant: f(x, out) fills `width` components. Subdivision
/// continues until every component meets its own tolerance, so components
/// of very different magnitude are each resolved.
struct VectorResult {
  std::vector<double> value;
  std::vector<double> error;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

VectorResult integrate_vector(const std::function<void(double, std::span<double>)>& f, std::size_t width,
                              double a, double b, const Options& opts = {});

}  // namespace exsf::quadrature
