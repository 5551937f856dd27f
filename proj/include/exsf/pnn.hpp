#pragma once

// Point neuron network: a sum of point sources with learnable complex weights
// and positions,
//
//   u(r) = sum_n eta_n |v_n| e^{ik(|r - v_n| - |v_n|)} / (4 pi |r - v_n|),
//
// fitted by minimizing sum_m |u(r_m) - s_m|^2 + lambda sum_n |eta_n| with every
// centre kept inside the ball |v| < R_in.

#include <cstdint>
#include <random>
#include <vector>

#include "exsf/field_model.hpp"
#include "exsf/types.hpp"

namespace exsf {

struct PnnModel {
  CVector weights;
  PositionList centers;
  double lambda = 1e-2;
  double radius_bound = 0.4;
  double frequency = 0.0;
  double speed_of_sound = kDefaultSpeedOfSound;

  WaveContext context() const { return {frequency, speed_of_sound}; }
};

/// Throws SingularityError when r coincides with a centre.
cdouble pnn_forward(const PnnModel& model, const Position3& r);
CVector pnn_forward(const PnnModel& model, const PositionList& points);

/// Data misfit plus L1 penalty.
double pnn_loss(const PnnModel& model, const PositionList& positions, const CVector& samples);

struct PnnOptions {
  int iterations = 3000;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Centres are initialised uniformly (by volume) in the ball of this radius.
  double init_radius = 0.2;
};

struct PnnTrainingReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  /// Loss after each accepted step (a step that improves on the best loss so far).
  std::vector<double> accepted_losses;
  /// Largest centre norm seen after any projected step.
  double max_center_norm = 0.0;
};

/// N centres uniform in the init ball, weights standard complex Gaussian.
PnnModel pnn_initialize(const WaveContext& ctx, int neurons, double lambda, double radius_bound,
                        const PnnOptions& opts, std::mt19937_64& rng);

/// Adam on (Re eta, Im eta, v); L1 handled by the subgradient eta/|eta| (0 at 0);
/// centres projected to radius (1 - 1e-6) R_in after each step. Returns the
/// best iterate, so the loss never exceeds the initial loss.
PnnModel pnn_train(const PositionList& positions, const CVector& samples, PnnModel model, const PnnOptions& opts,
                   PnnTrainingReport* report = nullptr);

PnnModel pnn_fit(const WaveContext& ctx, const PositionList& positions, const CVector& samples, int neurons,
                 double lambda, double radius_bound, std::uint64_t seed, const PnnOptions& opts = {},
                 PnnTrainingReport* report = nullptr);

}  // namespace exsf
