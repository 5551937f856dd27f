#include "exsf/swf.hpp"

#include <cmath>
#include <string>

#include "exsf/errors.hpp"
#include "exsf/metrics.hpp"

namespace exsf {

namespace {

void check_design(const SwfDesign& design, const CVector& samples) {
  if (design.psi.rows() != samples.size() || design.weights.size() != samples.size() ||
      design.penalty.size() != design.psi.cols())
    throw DomainError("swf: dimension mismatch");
}

CMatrix normal_matrix(const SwfDesign& design, double lambda) {
  CMatrix a = design.psi.adjoint() * design.weights.asDiagonal() * design.psi;
  a.diagonal() += (lambda * design.penalty).cast<cdouble>();
  return a;
}

// Factorization of the regularized normal matrix; throws on singularity.
Eigen::LDLT<CMatrix> factor(const CMatrix& a, double lambda) {
  Eigen::LDLT<CMatrix> ldlt(a);
  const double scale = a.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-14 * scale * static_cast<double>(a.rows()))
    throw LinearSolveError("swf: regularized normal matrix is singular (lambda = " + std::to_string(lambda) + ")");
  return ldlt;
}

}  // namespace

int swf_truncation(std::size_t mic_count) {
  if (mic_count == 0) throw DomainError("swf truncation needs at least one microphone");
  int n = 0;
  while (static_cast<std::size_t>((n + 2) * (n + 2)) <= mic_count) ++n;
  return n;
}

CMatrix swf_basis(const WaveContext& ctx, const PositionList& points, int max_order) {
  const auto cols = static_cast<Eigen::Index>(specfun::harmonic_count(max_order));
  CMatrix psi(static_cast<Eigen::Index>(points.size()), cols);
  for (std::size_t m = 0; m < points.size(); ++m) {
    const auto row = psi_all(ctx, max_order, points[m]);
    for (Eigen::Index c = 0; c < cols; ++c) psi(static_cast<Eigen::Index>(m), c) = row[static_cast<std::size_t>(c)];
  }
  return psi;
}

SwfDesign swf_design_matrices(const WaveContext& ctx, const PositionList& positions, int max_order,
                              const RVector& weights) {
  if (static_cast<std::size_t>(weights.size()) != positions.size())
    throw DomainError("swf: one quadrature weight per microphone required");
  SwfDesign d;
  d.psi = swf_basis(ctx, positions, max_order);
  d.weights = weights;
  d.penalty.resize(d.psi.cols());
  for (int n = 0; n <= max_order; ++n) {
    for (int m = -n; m <= n; ++m) d.penalty(n * n + n + m) = n * n + n + 1.0;
  }
  return d;
}

SwfDesign swf_design_matrices(const WaveContext& ctx, const PositionList& positions, int max_order) {
  const RVector w = RVector::Constant(static_cast<Eigen::Index>(positions.size()),
                                      1.0 / static_cast<double>(positions.size()));
  return swf_design_matrices(ctx, positions, max_order, w);
}

CVector swf_fit(const SwfDesign& design, const CVector& samples, double lambda) {
  check_design(design, samples);
  if (!(lambda >= 0.0)) throw DomainError("swf: lambda must be nonnegative");
  const CMatrix a = normal_matrix(design, lambda);
  const CVector rhs = design.psi.adjoint() * (design.weights.cast<cdouble>().asDiagonal() * samples);
  const auto ldlt = factor(a, lambda);
  CVector c = ldlt.solve(rhs);
  for (int it = 0; it < 2; ++it) {
    const CVector r = rhs - a * c;
    if (r.norm() <= 1e-14 * rhs.norm()) break;
    c += ldlt.solve(r);
  }
  return c;
}

cdouble swf_predict(const SwfModel& model, const Position3& r) {
  const auto basis = psi_all(model.context(), model.max_order, r);
  if (static_cast<Eigen::Index>(basis.size()) != model.coefficients.size())
    throw DomainError("swf model coefficient count does not match its truncation");
  cdouble sum = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) sum += model.coefficients(static_cast<Eigen::Index>(i)) * basis[i];
  return sum;
}

CVector swf_predict(const SwfModel& model, const PositionList& points) {
  CVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) out(static_cast<Eigen::Index>(i)) = swf_predict(model, points[i]);
  return out;
}

LambdaSearch swf_loo_lambda(const SwfDesign& design, const CVector& samples, const std::vector<double>& lambdas) {
  check_design(design, samples);
  if (lambdas.empty()) throw DomainError("swf_loo_lambda: empty lambda grid");
  LambdaSearch out;
  out.lambdas = lambdas;
  out.scores.assign(lambdas.size(), NAN);
  const CMatrix weighted_adj = design.psi.adjoint() * design.weights.cast<cdouble>().asDiagonal();  // Psi^H W
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    try {
      const auto ldlt = factor(normal_matrix(design, lambdas[i]), lambdas[i]);
      const CMatrix right = ldlt.solve(weighted_adj);  // A^{-1} Psi^H W
      const CVector fitted = design.psi * (right * samples);
      double score = 0.0;
      bool leverage_one = false;
      for (Eigen::Index m = 0; m < samples.size(); ++m) {
        const cdouble h_mm = design.psi.row(m).transpose().cwiseProduct(right.col(m)).sum();
        const cdouble denom = 1.0 - h_mm;
        if (std::abs(denom) <= 1e-12) {
          leverage_one = true;
          break;
        }
        score += std::norm((samples(m) - fitted(m)) / denom);
      }
      if (leverage_one) {
        out.warnings.push_back("swf_loo_lambda: unit leverage at lambda " + std::to_string(lambdas[i]));
        continue;
      }
      out.scores[i] = score;
    } catch (const LinearSolveError& e) {
      out.warnings.push_back(e.what());
    }
  }
  out.best_lambda = lambdas[select_lambda(out.lambdas, out.scores)];
  return out;
}

LambdaSearch swf_ideal_lambda(const SwfDesign& design, const CVector& samples, const std::vector<double>& lambdas,
                              const CMatrix& test_psi, const CVector& ground_truth) {
  check_design(design, samples);
  if (lambdas.empty()) throw DomainError("swf_ideal_lambda: empty lambda grid");
  if (test_psi.rows() != ground_truth.size() || test_psi.cols() != design.psi.cols())
    throw DomainError("swf_ideal_lambda: test basis does not match ground truth");
  LambdaSearch out;
  out.lambdas = lambdas;
  out.scores.assign(lambdas.size(), NAN);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    try {
      const CVector c = swf_fit(design, samples, lambdas[i]);
      out.scores[i] = nmse_db(ground_truth, test_psi * c);
    } catch (const LinearSolveError& e) {
      out.warnings.push_back(e.what());
    }
  }
  out.best_lambda = lambdas[select_lambda(out.lambdas, out.scores)];
  return out;
}

}  // namespace exsf
