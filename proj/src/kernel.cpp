#include "exsf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exsf/errors.hpp"

namespace exsf {

RadialFactors radial_factors(const WaveContext& ctx, int max_order, const Position3& r) {
  const double radius = r.norm();
  if (!(radius > 0.0)) throw SingularityError("kernel evaluated at the origin");
  auto polar = specfun::sph_hankel1_polar(max_order, ctx.wavenumber() * radius);
  return {r / radius, std::move(polar.log_abs), std::move(polar.phase)};
}

KernelPoint attenuate(const RadialFactors& factors, const XiTable& table) {
  const std::size_t width = factors.log_abs.size();
  if (static_cast<int>(width) - 1 > table.max_order())
    throw DomainError("attenuation table shorter than the kernel truncation");
  KernelPoint p{factors.direction, std::vector<cdouble>(width)};
  for (std::size_t n = 0; n < width; ++n) {
    const double mag = std::exp(0.5 * table.log_value(static_cast<int>(n)) + factors.log_abs[n]);
    p.radial[n] = mag * factors.phase[n];
  }
  return p;
}

KernelPoint kernel_point(const WaveContext& ctx, const XiTable& table, const Position3& r) {
  return attenuate(radial_factors(ctx, table.max_order(), r), table);
}

cdouble kernel_value(const KernelPoint& a, const KernelPoint& b) {
  const double t = std::clamp(a.direction.dot(b.direction), -1.0, 1.0);
  const std::size_t width = std::min(a.radial.size(), b.radial.size());
  double p_prev = 1.0, p = t;
  cdouble sum = a.radial[0] * std::conj(b.radial[0]);
  for (std::size_t n = 1; n < width; ++n) {
    sum += (2.0 * n + 1.0) * p * (a.radial[n] * std::conj(b.radial[n]));
    const double p_next = ((2.0 * n + 1.0) * t * p - n * p_prev) / (n + 1.0);
    p_prev = p;
    p = p_next;
  }
  return sum / (4.0 * kPi);
}

cdouble kernel_eval(const WaveContext& ctx, const AttenuationParams& params, int max_order, const Position3& r,
                    const Position3& r_prime) {
  params.validate();
  const XiTable table(params.alpha, params.beta, max_order);
  return kernel_value(kernel_point(ctx, table, r), kernel_point(ctx, table, r_prime));
}

CMatrix gram_matrix(const std::vector<KernelPoint>& points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  CMatrix k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = kernel_value(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(i)]).real();
    for (Eigen::Index j = i + 1; j < m; ++j) {
      k(i, j) = kernel_value(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      k(j, i) = std::conj(k(i, j));
    }
  }
  return k;
}

CMatrix gram_matrix(const WaveContext& ctx, const AttenuationParams& params, int max_order,
                    const PositionList& positions) {
  params.validate();
  const XiTable table(params.alpha, params.beta, max_order);
  std::vector<KernelPoint> points;
  points.reserve(positions.size());
  for (const auto& r : positions) points.push_back(kernel_point(ctx, table, r));
  return gram_matrix(points);
}

CMatrix cross_kernel(const std::vector<KernelPoint>& eval_points, const std::vector<KernelPoint>& mic_points) {
  CMatrix k(static_cast<Eigen::Index>(eval_points.size()), static_cast<Eigen::Index>(mic_points.size()));
  for (std::size_t i = 0; i < eval_points.size(); ++i) {
    for (std::size_t j = 0; j < mic_points.size(); ++j)
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel_value(eval_points[i], mic_points[j]);
  }
  return k;
}

CVector krr_fit(const CMatrix& gram, const CVector& samples, double lambda) {
  if (gram.rows() != gram.cols() || gram.rows() != samples.size())
    throw DomainError("krr_fit: dimension mismatch");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("krr_fit: lambda must be nonnegative");
  CMatrix h = gram;
  h.diagonal().array() += lambda;

  CVector a;
  Eigen::LLT<CMatrix> llt(h);
  if (llt.info() == Eigen::Success) {
    a = llt.solve(samples);
    for (int it = 0; it < 3; ++it) {
      const CVector r = samples - h * a;
      if (r.norm() <= 1e-14 * samples.norm()) break;
      a += llt.solve(r);
    }
  } else {
    Eigen::LDLT<CMatrix> ldlt(h);
    const double scale = h.cwiseAbs().maxCoeff();
    const auto d = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) || d.minCoeff() <= 1e-14 * scale * h.rows())
      throw LinearSolveError("krr_fit: K + lambda I is singular (lambda = " + std::to_string(lambda) + ")");
    a = ldlt.solve(samples);
    for (int it = 0; it < 3; ++it) {
      const CVector r = samples - h * a;
      if (r.norm() <= 1e-14 * samples.norm()) break;
      a += ldlt.solve(r);
    }
  }
  if (!a.allFinite()) throw LinearSolveError("krr_fit: non-finite solution");
  return a;
}

KernelModel fit_kernel_model(const WaveContext& ctx, const AttenuationParams& params, int max_order,
                             const PositionList& positions, const CVector& samples, double lambda) {
  const CMatrix k = gram_matrix(ctx, params, max_order, positions);
  KernelModel model;
  model.params = params;
  model.max_order = max_order;
  model.lambda = lambda;
  model.frequency = ctx.frequency();
  model.speed_of_sound = ctx.speed_of_sound();
  model.mic_positions = positions;
  model.coefficients = krr_fit(k, samples, lambda);
  return model;
}

KernelPredictor::KernelPredictor(const KernelModel& model)
    : ctx_(model.context()),
      coefficients_(model.coefficients),
      table_(model.params.alpha, model.params.beta, model.max_order) {
  if (static_cast<std::size_t>(model.coefficients.size()) != model.mic_positions.size())
    throw DomainError("kernel model has mismatched coefficient and microphone counts");
  mics_.reserve(model.mic_positions.size());
  for (const auto& r : model.mic_positions) mics_.push_back(kernel_point(ctx_, table_, r));
}

cdouble KernelPredictor::operator()(const Position3& r) const {
  const KernelPoint p = kernel_point(ctx_, table_, r);
  cdouble sum = 0.0;
  for (std::size_t m = 0; m < mics_.size(); ++m)
    sum += coefficients_(static_cast<Eigen::Index>(m)) * kernel_value(p, mics_[m]);
  return sum;
}

CVector KernelPredictor::predict(const PositionList& points) const {
  CVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) out(static_cast<Eigen::Index>(i)) = (*this)(points[i]);
  return out;
}

cdouble krr_predict(const KernelModel& model, const Position3& r) { return KernelPredictor(model)(r); }

LambdaSearch loo_cv_krr(const CMatrix& gram, const CVector& samples, const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw DomainError("loo_cv_krr: empty lambda grid");
  if (gram.rows() != gram.cols() || gram.rows() != samples.size())
    throw DomainError("loo_cv_krr: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericError("loo_cv_krr: eigendecomposition failed");
  const RVector& e = eig.eigenvalues();
  const CMatrix& v = eig.eigenvectors();
  const CVector projected = v.adjoint() * samples;
  const Eigen::MatrixXd v_abs2 = v.cwiseAbs2();

  LambdaSearch out;
  out.lambdas = lambdas;
  out.scores.assign(lambdas.size(), NAN);
  const double spectrum = e.cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    const RVector shifted = e.array() + lambda;
    if (!(lambda >= 0.0) || shifted.cwiseAbs().minCoeff() <= 1e-13 * std::max(spectrum, lambda)) {
      out.warnings.push_back("loo_cv_krr: skipped singular lambda " + std::to_string(lambda));
      continue;
    }
    const RVector inv = shifted.cwiseInverse();
    const CVector alpha = v * (projected.array() * inv.array()).matrix();
    const RVector diag = v_abs2 * inv;
    double score = 0.0;
    for (Eigen::Index m = 0; m < samples.size(); ++m) score += std::norm(alpha(m) / diag(m));
    out.scores[i] = score;
  }
  out.best_lambda = lambdas[select_lambda(out.lambdas, out.scores)];
  return out;
}

}  // namespace exsf
