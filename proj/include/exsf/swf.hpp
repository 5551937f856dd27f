#pragma once

// Regularized spherical wave function expansion:
//   u(r) ~ sum_{n <= N, m} c_{n,m} psi_{n,m}(r),
//   c = (Psi^H W Psi + lambda D)^{-1} Psi^H W s,  D_{nm} = n^2 + n + 1.

#include <vector>

#include "exsf/field_model.hpp"
#include "exsf/lambda_search.hpp"
#include "exsf/types.hpp"

namespace exsf {

/// Largest N with (N + 1)^2 <= mic_count.
int swf_truncation(std::size_t mic_count);

struct SwfDesign {
  CMatrix psi;       // M x (N+1)^2
  RVector weights;   // diagonal of W
  RVector penalty;   // diagonal of D
};

/// Quadrature weights default to 1/M for every microphone.
SwfDesign swf_design_matrices(const WaveContext& ctx, const PositionList& positions, int max_order);
SwfDesign swf_design_matrices(const WaveContext& ctx, const PositionList& positions, int max_order,
                              const RVector& weights);

/// Throws LinearSolveError if the normal matrix is singular.
CVector swf_fit(const SwfDesign& design, const CVector& samples, double lambda);

struct SwfModel {
  int max_order = 0;
  double lambda = 0.0;
  double frequency = 0.0;
  double speed_of_sound = kDefaultSpeedOfSound;
  CVector coefficients;

  WaveContext context() const { return {frequency, speed_of_sound}; }
};

cdouble swf_predict(const SwfModel& model, const Position3& r);
CVector swf_predict(const SwfModel& model, const PositionList& points);

/// Hat-matrix leave-one-out: e_m = (s_m - shat_m) / (1 - H_mm),
/// H = Psi (Psi^H W Psi + lambda D)^{-1} Psi^H W.
LambdaSearch swf_loo_lambda(const SwfDesign& design, const CVector& samples, const std::vector<double>& lambdas);

/// Oracle selection against ground truth at test points (NMSE criterion).
/// Only for the "ideal" reference baseline.
LambdaSearch swf_ideal_lambda(const SwfDesign& design, const CVector& samples, const std::vector<double>& lambdas,
                              const CMatrix& test_psi, const CVector& ground_truth);

/// psi values at arbitrary points (rows) for a given truncation.
CMatrix swf_basis(const WaveContext& ctx, const PositionList& points, int max_order);

}  // namespace exsf
