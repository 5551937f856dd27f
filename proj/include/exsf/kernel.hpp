#pragma once

// Reproducing kernel built from attenuated outgoing wave functions:
//
//   kappa(r, r') = sum_{n <= N} sum_m xi_n psi_{n,m}(r) conj(psi_{n,m}(r'))
//                = sum_{n <= N} xi_n (2n+1)/(4 pi) h_n(k|r|) conj(h_n(k|r'|)) P_n(rhat . rhat')
//
// plus kernel ridge regression on top of it.

#include <vector>

#include "exsf/attenuation.hpp"
#include "exsf/field_model.hpp"
#include "exsf/lambda_search.hpp"
#include "exsf/types.hpp"

namespace exsf {

/// A point prepared for kernel evaluation: radial[n] = sqrt(xi_n) h_n(k|r|).
struct KernelPoint {
  Position3 direction;
  std::vector<cdouble> radial;
};

/// Radial factors that do not depend on (alpha, beta): log|h_n| and phases.
struct RadialFactors {
  Position3 direction;
  std::vector<double> log_abs;
  std::vector<cdouble> phase;
};

RadialFactors radial_factors(const WaveContext& ctx, int max_order, const Position3& r);
KernelPoint attenuate(const RadialFactors& factors, const XiTable& table);
KernelPoint kernel_point(const WaveContext& ctx, const XiTable& table, const Position3& r);

/// Kernel between two prepared points (addition-theorem form).
cdouble kernel_value(const KernelPoint& a, const KernelPoint& b);

cdouble kernel_eval(const WaveContext& ctx, const AttenuationParams& params, int max_order, const Position3& r,
                    const Position3& r_prime);

/// Hermitian Gram matrix [kappa(r_i, r_j)].
CMatrix gram_matrix(const WaveContext& ctx, const AttenuationParams& params, int max_order,
                    const PositionList& positions);
CMatrix gram_matrix(const std::vector<KernelPoint>& points);

/// [kappa(e_i, m_j)] for evaluation points e and microphones m.
CMatrix cross_kernel(const std::vector<KernelPoint>& eval_points, const std::vector<KernelPoint>& mic_points);

/// a = (K + lambda I)^{-1} s via Hermitian factorization with iterative refinement.
/// Throws LinearSolveError if the regularized matrix is singular.
CVector krr_fit(const CMatrix& gram, const CVector& samples, double lambda);

struct KernelModel {
  AttenuationParams params;
  int max_order = 20;
  double lambda = 0.0;
  double frequency = 0.0;
  double speed_of_sound = kDefaultSpeedOfSound;
  PositionList mic_positions;
  CVector coefficients;

  WaveContext context() const { return {frequency, speed_of_sound}; }
};

KernelModel fit_kernel_model(const WaveContext& ctx, const AttenuationParams& params, int max_order,
                             const PositionList& positions, const CVector& samples, double lambda);

/// Prediction helper caching the attenuated microphone points.
class KernelPredictor {
 public:
  explicit KernelPredictor(const KernelModel& model);

  cdouble operator()(const Position3& r) const;
  CVector predict(const PositionList& points) const;

 private:
  WaveContext ctx_;
  CVector coefficients_;
  XiTable table_;
  std::vector<KernelPoint> mics_;
};

cdouble krr_predict(const KernelModel& model, const Position3& r);

/// Closed-form leave-one-out search: e_m = [H^{-1} s]_m / [H^{-1}]_mm, H = K + lambda I,
/// score = sum |e_m|^2.
LambdaSearch loo_cv_krr(const CMatrix& gram, const CVector& samples, const std::vector<double>& lambdas);

}  // namespace exsf
