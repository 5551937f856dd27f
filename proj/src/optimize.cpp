#include "exsf/optimize.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "exsf/errors.hpp"

namespace exsf::optimize {

namespace {

double safe_eval(const Objective& f, std::span<const double> x, int& evaluations) {
  ++evaluations;
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : INFINITY;
  } catch (const NumericError&) {
    return INFINITY;
  } catch (const LinearSolveError&) {
    return INFINITY;
  }
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double step, double fx,
                                     int* evaluations) {
  int evals = 0;
  std::vector<double> g(x.size());
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = safe_eval(f, probe, evals);
    probe[i] = x[i] - step;
    const double down = safe_eval(f, probe, evals);
    probe[i] = x[i];
    if (std::isfinite(up) && std::isfinite(down)) {
      g[i] = (up - down) / (2.0 * step);
    } else if (std::isfinite(up) && std::isfinite(fx)) {
      g[i] = (up - fx) / step;
    } else if (std::isfinite(down) && std::isfinite(fx)) {
      g[i] = (fx - down) / step;
    } else {
      throw NumericError("finite-difference gradient: objective not finite around coordinate " +
                         std::to_string(i));
    }
  }
  if (evaluations) *evaluations += evals;
  return g;
}

BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts) {
  BfgsResult result;
  const auto n = static_cast<Eigen::Index>(x0.size());
  for (auto& c : x0) c = std::clamp(c, -opts.coordinate_bound, opts.coordinate_bound);

  Eigen::VectorXd x = to_eigen(x0);
  double fx = safe_eval(f, x0, result.evaluations);
  if (!std::isfinite(fx)) throw OptimizationError("objective is not finite at the initial point", x0);
  result.initial_value = fx;

  auto gradient = [&](const Eigen::VectorXd& at, double value) {
    try {
      return to_eigen(central_gradient(f, to_std(at), opts.fd_step, value, &result.evaluations));
    } catch (const NumericError& e) {
      throw OptimizationError(e.what(), to_std(at));
    }
  };

  Eigen::VectorXd g = gradient(x, fx);
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  int small_changes = 0;

  for (result.iterations = 0; result.iterations < opts.max_iterations; ++result.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      result.converged = true;
      result.message = "gradient tolerance reached";
      break;
    }

    bool accepted = false;
    Eigen::VectorXd x_new, g_new;
    double f_new = fx;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) inv_hessian.setIdentity();
      Eigen::VectorXd dir = -inv_hessian * g;
      double slope = g.dot(dir);
      if (!(slope < 0.0)) {
        inv_hessian.setIdentity();
        dir = -g;
        slope = g.dot(dir);
      }
      const double dir_norm = dir.norm();
      double step = dir_norm > opts.max_step ? opts.max_step / dir_norm : 1.0;
      for (int shrink = 0; shrink < 50; ++shrink, step *= 0.5) {
        x_new = (x + step * dir).cwiseMax(-opts.coordinate_bound).cwiseMin(opts.coordinate_bound);
        f_new = safe_eval(f, to_std(x_new), result.evaluations);
        if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      result.converged = true;
      result.message = "line search cannot improve further";
      break;
    }

    g_new = gradient(x_new, f_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      inv_hessian = (id - rho * s * y.transpose()) * inv_hessian * (id - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }

    const double change = std::abs(fx - f_new);
    small_changes = change <= opts.value_tolerance * (1.0 + std::abs(fx)) ? small_changes + 1 : 0;
    x = x_new;
    fx = f_new;
    g = g_new;
    if (small_changes >= 2) {
      ++result.iterations;
      result.converged = true;
      result.message = "objective stalled";
      break;
    }
  }
  if (result.iterations >= opts.max_iterations) result.message = "iteration limit reached";
  result.x = to_std(x);
  result.value = fx;
  return result;
}

}  // namespace exsf::optimize
