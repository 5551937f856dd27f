#include "exsf/gpr.hpp"

#include <algorithm>
#include <cmath>

#include "exsf/errors.hpp"

namespace exsf {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

double gpr_objective_from_gram(const CMatrix& gram, const CVector& samples, double lambda, double lambda_cond) {
  if (gram.rows() != gram.cols() || gram.rows() != samples.size())
    throw DomainError("gpr objective: dimension mismatch");
  if (!gram.allFinite()) throw NumericError("gpr objective: Gram matrix has non-finite entries");
  CMatrix h = gram;
  h.diagonal().array() += lambda;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  if (eig.info() != Eigen::Success) throw NumericError("gpr objective: eigendecomposition failed");
  const RVector& e = eig.eigenvalues();  // ascending
  if (!(e(0) > 0.0)) throw NumericError("gpr objective: K + lambda I is not positive definite");
  const CVector projected = eig.eigenvectors().adjoint() * samples;
  const double quadratic = (projected.cwiseAbs2().array() / e.array()).sum();
  const double logdet = e.array().log().sum();
  const double log_cond = std::log(e(e.size() - 1) / e(0));
  const double value = quadratic + logdet + lambda_cond * log_cond;
  if (!std::isfinite(value)) throw NumericError("gpr objective: non-finite value");
  return value;
}

GprProblem::GprProblem(const WaveContext& ctx, int max_order, PositionList positions, CVector samples,
                       double lambda, double lambda_cond)
    : ctx_(ctx),
      max_order_(max_order),
      positions_(std::move(positions)),
      samples_(std::move(samples)),
      lambda_(lambda),
      lambda_cond_(lambda_cond) {
  if (static_cast<std::size_t>(samples_.size()) != positions_.size())
    throw DomainError("gpr problem: sample count differs from position count");
  if (positions_.empty()) throw DomainError("gpr problem: no measurements");
  if (!(lambda_ > 0.0)) throw DomainError("gpr problem: lambda must be positive");
  if (!(lambda_cond_ >= 0.0)) throw DomainError("gpr problem: lambda_cond must be nonnegative");
  radial_.reserve(positions_.size());
  for (const auto& r : positions_) radial_.push_back(radial_factors(ctx_, max_order_, r));
}

CMatrix GprProblem::gram(double alpha, double beta) const {
  const XiTable table(alpha, beta, max_order_);
  std::vector<KernelPoint> points;
  points.reserve(radial_.size());
  for (const auto& f : radial_) points.push_back(attenuate(f, table));
  return gram_matrix(points);
}

double GprProblem::objective(double alpha, double beta) const { return objective(alpha, beta, lambda_); }

double GprProblem::objective(double alpha, double beta, double lambda) const {
  return gpr_objective_from_gram(gram(alpha, beta), samples_, lambda, lambda_cond_);
}

std::array<double, 2> GprProblem::gradient(double alpha, double beta, double rel_step) const {
  const double ha = rel_step * alpha, hb = rel_step * beta;
  return {(objective(alpha + ha, beta) - objective(alpha - ha, beta)) / (2.0 * ha),
          (objective(alpha, beta + hb) - objective(alpha, beta - hb)) / (2.0 * hb)};
}

double gpr_objective(const WaveContext& ctx, const AttenuationParams& params, int max_order,
                     const PositionList& positions, const CVector& samples, double lambda, double lambda_cond) {
  params.validate();
  return GprProblem(ctx, max_order, positions, samples, lambda, lambda_cond).objective(params.alpha, params.beta);
}

AttenuationParams BoxReparametrization::to_params(double b, double d) const {
  AttenuationParams p;
  p.box = box;
  p.beta = box.beta_min + (box.beta_max - box.beta_min) * sigmoid(b);
  p.alpha = p.beta + box.delta_min + (box.delta_max - box.delta_min) * sigmoid(d);
  return p;
}

std::array<double, 2> BoxReparametrization::from_params(double alpha, double beta, double margin) const {
  const double fb = std::clamp((beta - box.beta_min) / (box.beta_max - box.beta_min), margin, 1.0 - margin);
  const double fd =
      std::clamp((alpha - beta - box.delta_min) / (box.delta_max - box.delta_min), margin, 1.0 - margin);
  return {logit(fb), logit(fd)};
}

AttenuationParams default_initial_params(const WaveContext& ctx, const PositionList& positions,
                                         const ConstraintBox& box) {
  box.validate();
  double radius = 0.0;
  for (const auto& r : positions) radius = std::max(radius, r.norm());
  AttenuationParams p;
  p.box = box;
  p.beta = std::clamp(1.0, box.beta_min, box.beta_max);
  p.alpha = std::clamp(ctx.wavenumber() * radius, p.beta + box.delta_min, p.beta + box.delta_max);
  return p;
}

HyperparamResult optimize_hyperparams(const GprProblem& problem, const ConstraintBox& box,
                                      const AttenuationParams& initial, const optimize::BfgsOptions& opts) {
  box.validate();
  const BoxReparametrization map{box};
  auto objective_at = [&](double b, double d) {
    const auto p = map.to_params(b, d);
    return problem.objective(p.alpha, p.beta);
  };
  const auto start = map.from_params(initial.alpha, initial.beta);

  const auto bfgs = optimize::minimize_bfgs(
      [&](std::span<const double> x) { return objective_at(x[0], x[1]); }, {start[0], start[1]}, opts);

  HyperparamResult result;
  result.initial = map.to_params(start[0], start[1]);
  result.lambda = problem.lambda();
  result.initial_objective = bfgs.initial_value;
  result.params = map.to_params(bfgs.x[0], bfgs.x[1]);
  result.objective = bfgs.value;
  result.iterations = bfgs.iterations;
  result.evaluations = bfgs.evaluations;
  result.converged = bfgs.converged;
  result.message = bfgs.message;

  // Logistic coordinates only approach the box faces asymptotically. Try the
  // face itself when the optimum is pressed against it.
  constexpr double kFace = 1e-2;
  const double fb = (result.params.beta - box.beta_min) / (box.beta_max - box.beta_min);
  const double fd = (result.params.alpha - result.params.beta - box.delta_min) / (box.delta_max - box.delta_min);
  auto snap = [&](double f) { return f < kFace ? 0.0 : (f > 1.0 - kFace ? 1.0 : f); };
  const double sb = snap(fb), sd = snap(fd);
  if (sb != fb || sd != fd) {
    AttenuationParams candidate;
    candidate.box = box;
    candidate.beta = box.beta_min + (box.beta_max - box.beta_min) * sb;
    candidate.alpha = candidate.beta + box.delta_min + (box.delta_max - box.delta_min) * sd;
    try {
      const double v = problem.objective(candidate.alpha, candidate.beta);
      ++result.evaluations;
      if (v <= result.objective) {
        result.params = candidate;
        result.objective = v;
      }
    } catch (const NumericError&) {
    }
  }
  return result;
}

HyperparamResult optimize_hyperparams_with_lambda(const GprProblem& problem, const ConstraintBox& box,
                                                  const AttenuationParams& initial,
                                                  const optimize::BfgsOptions& opts) {
  box.validate();
  const BoxReparametrization map{box};
  // Third coordinate is log lambda; the generic coordinate bound keeps it finite.
  auto objective_at = [&](std::span<const double> x) {
    const auto p = map.to_params(x[0], x[1]);
    return problem.objective(p.alpha, p.beta, std::exp(x[2]));
  };
  const auto start = map.from_params(initial.alpha, initial.beta);
  // Settle lambda at the starting kernel first. A random initial lambda far
  // above the data power otherwise drags the kernel towards its smallest
  // amplitude before lambda has time to adapt.
  const auto settle = optimize::minimize_bfgs(
      [&](std::span<const double> x) {
        const auto p = map.to_params(start[0], start[1]);
        return problem.objective(p.alpha, p.beta, std::exp(x[0]));
      },
      {std::log(problem.lambda())}, opts);
  auto bfgs = optimize::minimize_bfgs(objective_at, {start[0], start[1], settle.x[0]}, opts);
  bfgs.initial_value = settle.initial_value;
  bfgs.evaluations += settle.evaluations;

  HyperparamResult result;
  result.initial = map.to_params(start[0], start[1]);
  result.initial_objective = bfgs.initial_value;
  result.params = map.to_params(bfgs.x[0], bfgs.x[1]);
  result.lambda = std::exp(bfgs.x[2]);
  result.objective = bfgs.value;
  result.iterations = bfgs.iterations;
  result.evaluations = bfgs.evaluations;
  result.converged = bfgs.converged;
  result.message = bfgs.message;
  return result;
}

HyperparamResult optimize_hyperparams(const WaveContext& ctx, int max_order, const PositionList& positions,
                                      const CVector& samples, double lambda, double lambda_cond,
                                      const ConstraintBox& box) {
  const GprProblem problem(ctx, max_order, positions, samples, lambda, lambda_cond);
  return optimize_hyperparams(problem, box, default_initial_params(ctx, positions, box));
}

}  // namespace exsf
