#pragma once

// Hyperparameter learning for the attenuated kernel. The objective is the
// Gaussian negative log marginal likelihood core plus a log condition-number
// penalty:
//
//   L(alpha, beta) = s^H H^{-1} s + log det H + lambda_cond log cond(H),  H = K + lambda I.

#include <array>
#include <string>
#include <vector>

#include "exsf/attenuation.hpp"
#include "exsf/field_model.hpp"
#include "exsf/kernel.hpp"
#include "exsf/optimize.hpp"
#include "exsf/types.hpp"

namespace exsf {

inline constexpr int kDefaultKernelOrder = 20;
inline constexpr double kDefaultLambdaCond = 0.0075;

/// Objective from a precomputed Gram matrix. Throws NumericError if H is not
/// positive definite or the value is not finite.
double gpr_objective_from_gram(const CMatrix& gram, const CVector& samples, double lambda, double lambda_cond);

/// Measurement set plus fixed regularization; caches the (alpha, beta)-free
/// parts of the Gram assembly.
class GprProblem {
 public:
  GprProblem(const WaveContext& ctx, int max_order, PositionList positions, CVector samples, double lambda,
             double lambda_cond = kDefaultLambdaCond);

  double objective(double alpha, double beta) const;
  /// Same objective with a different regularization constant.
  double objective(double alpha, double beta, double lambda) const;
  CMatrix gram(double alpha, double beta) const;

  /// Central-difference gradient with respect to (alpha, beta); each step is
  /// rel_step times the coordinate.
  std::array<double, 2> gradient(double alpha, double beta, double rel_step = 1e-6) const;

  const WaveContext& context() const noexcept { return ctx_; }
  int max_order() const noexcept { return max_order_; }
  const PositionList& positions() const noexcept { return positions_; }
  const CVector& samples() const noexcept { return samples_; }
  double lambda() const noexcept { return lambda_; }
  double lambda_cond() const noexcept { return lambda_cond_; }

 private:
  WaveContext ctx_;
  int max_order_;
  PositionList positions_;
  CVector samples_;
  double lambda_;
  double lambda_cond_;
  std::vector<RadialFactors> radial_;
};

double gpr_objective(const WaveContext& ctx, const AttenuationParams& params, int max_order,
                     const PositionList& positions, const CVector& samples, double lambda, double lambda_cond);

/// Smooth map from unconstrained (b, d) onto the constraint box:
///   beta = beta_min + (beta_max - beta_min) sigmoid(b)
///   alpha = beta + delta_min + (delta_max - delta_min) sigmoid(d)
struct BoxReparametrization {
  ConstraintBox box;

  AttenuationParams to_params(double b, double d) const;
  /// Inverse map; the logistic fractions are clamped to [margin, 1 - margin].
  std::array<double, 2> from_params(double alpha, double beta, double margin = 1e-3) const;
};

struct HyperparamResult {
  AttenuationParams params;
  AttenuationParams initial;
  /// Regularization at the optimum (the fixed input unless it was optimized too).
  double lambda = 0.0;
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// Starting point: alpha = k R_array clamped into the box, beta = 1 clamped.
AttenuationParams default_initial_params(const WaveContext& ctx, const PositionList& positions,
                                         const ConstraintBox& box);

HyperparamResult optimize_hyperparams(const GprProblem& problem, const ConstraintBox& box,
                                      const AttenuationParams& initial, const optimize::BfgsOptions& opts = {});

/// Variant that also learns lambda (as log lambda, starting from problem.lambda()),
/// the usual treatment of the noise variance in GP regression.
HyperparamResult optimize_hyperparams_with_lambda(const GprProblem& problem, const ConstraintBox& box,
                                                  const AttenuationParams& initial,
                                                  const optimize::BfgsOptions& opts = {});

HyperparamResult optimize_hyperparams(const WaveContext& ctx, int max_order, const PositionList& positions,
                                      const CVector& samples, double lambda, double lambda_cond,
                                      const ConstraintBox& box);

}  // namespace exsf
