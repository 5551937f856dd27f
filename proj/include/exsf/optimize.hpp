#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace exsf::optimize {

/// Objective over R^n. May return a non-finite value or throw exsf::NumericError
/// to signal an infeasible trial point; line searches back off from those.
using Objective = std::function<double(std::span<const double>)>;

struct BfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  /// Stop once the objective changes by less than this (relative) over two iterations.
  double value_tolerance = 1e-13;
  double fd_step = 1e-5;
  double max_step = 5.0;
  /// Box applied to every coordinate; keeps saturating reparametrizations finite.
  double coordinate_bound = 40.0;
};

struct BfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double initial_value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// Central differences; falls back to a one-sided stencil when one side is
/// not finite. Throws NumericError if both sides fail for some coordinate.
std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double step, double fx,
                                     int* evaluations = nullptr);

/// Quasi-Newton minimization with BFGS updates, finite-difference gradients and
/// Armijo backtracking. Throws OptimizationError if f(x0) is not finite.
BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts = {});

}  // namespace exsf::optimize
