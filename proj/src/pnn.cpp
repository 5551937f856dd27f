#include "exsf/pnn.hpp"

#include <cmath>

#include "exsf/errors.hpp"

namespace exsf {

namespace {

cdouble neuron_term(double k, const Position3& center, double center_norm, const Position3& r) {
  const double d = (r - center).norm();
  if (!(d > 0.0)) throw SingularityError("point neuron evaluated at its centre");
  return std::polar(center_norm / (4.0 * kPi * d), k * (d - center_norm));
}

}  // namespace

cdouble pnn_forward(const PnnModel& model, const Position3& r) {
  const double k = model.context().wavenumber();
  cdouble sum = 0.0;
  for (std::size_t n = 0; n < model.centers.size(); ++n) {
    const double rho = model.centers[n].norm();
    sum += model.weights(static_cast<Eigen::Index>(n)) * neuron_term(k, model.centers[n], rho, r);
  }
  return sum;
}

CVector pnn_forward(const PnnModel& model, const PositionList& points) {
  CVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) out(static_cast<Eigen::Index>(i)) = pnn_forward(model, points[i]);
  return out;
}

double pnn_loss(const PnnModel& model, const PositionList& positions, const CVector& samples) {
  return (pnn_forward(model, positions) - samples).squaredNorm() + model.lambda * model.weights.cwiseAbs().sum();
}

PnnModel pnn_initialize(const WaveContext& ctx, int neurons, double lambda, double radius_bound,
                        const PnnOptions& opts, std::mt19937_64& rng) {
  if (neurons < 1) throw DomainError("pnn needs at least one neuron");
  if (!(radius_bound > 0.0)) throw DomainError("pnn radius bound must be positive");
  if (!(opts.init_radius > 0.0) || opts.init_radius >= radius_bound)
    throw DomainError("pnn initial radius must lie inside the radius bound");
  PnnModel model;
  model.lambda = lambda;
  model.radius_bound = radius_bound;
  model.frequency = ctx.frequency();
  model.speed_of_sound = ctx.speed_of_sound();
  model.weights.resize(neurons);
  model.centers.reserve(static_cast<std::size_t>(neurons));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int n = 0; n < neurons; ++n) {
    Position3 dir(gauss(rng), gauss(rng), gauss(rng));
    dir.normalize();
    const double radius = opts.init_radius * std::cbrt(unit(rng));
    model.centers.push_back(radius * dir);
  }
  const double s = std::sqrt(0.5);
  for (int n = 0; n < neurons; ++n) model.weights(n) = {s * gauss(rng), s * gauss(rng)};
  return model;
}

PnnModel pnn_train(const PositionList& positions, const CVector& samples, PnnModel model, const PnnOptions& opts,
                   PnnTrainingReport* report) {
  const auto m_count = positions.size();
  const auto n_count = model.centers.size();
  if (static_cast<std::size_t>(samples.size()) != m_count) throw DomainError("pnn: sample count mismatch");
  if (static_cast<std::size_t>(model.weights.size()) != n_count) throw DomainError("pnn: weight count mismatch");

  const double k = model.context().wavenumber();
  const double limit = (1.0 - 1e-6) * model.radius_bound;
  const double lambda = model.lambda;

  // Parameter layout per neuron: Re eta, Im eta, vx, vy, vz.
  const std::size_t dim = 5 * n_count;
  std::vector<double> grad(dim), moment1(dim, 0.0), moment2(dim, 0.0);
  std::vector<cdouble> terms(m_count * n_count);
  std::vector<double> dist(m_count * n_count);
  std::vector<cdouble> residual(m_count);

  auto project = [&](Position3& v) {
    const double norm = v.norm();
    if (norm > limit) v *= limit / norm;
  };
  for (auto& v : model.centers) project(v);

  // Forward pass; returns the full loss and fills terms/dist/residual.
  auto evaluate = [&]() {
    for (std::size_t m = 0; m < m_count; ++m) residual[m] = -samples(static_cast<Eigen::Index>(m));
    for (std::size_t n = 0; n < n_count; ++n) {
      const Position3& v = model.centers[n];
      const double rho = v.norm();
      const cdouble eta = model.weights(static_cast<Eigen::Index>(n));
      for (std::size_t m = 0; m < m_count; ++m) {
        const double d = (positions[m] - v).norm();
        if (!(d > 0.0)) throw SingularityError("pnn: microphone coincides with a neuron centre");
        const double phase = k * (d - rho);
        const cdouble t(rho / (4.0 * kPi * d) * std::cos(phase), rho / (4.0 * kPi * d) * std::sin(phase));
        terms[n * m_count + m] = t;
        dist[n * m_count + m] = d;
        residual[m] += eta * t;
      }
    }
    double data = 0.0;
    for (const auto& e : residual) data += std::norm(e);
    return data + lambda * model.weights.cwiseAbs().sum();
  };

  double loss = evaluate();
  if (!std::isfinite(loss)) throw NumericError("pnn: initial loss is not finite");
  PnnTrainingReport local;
  local.initial_loss = loss;
  double best_loss = loss;
  PnnModel best = model;

  const cdouble ik(0.0, k);
  for (int it = 1; it <= opts.iterations; ++it) {
    for (std::size_t n = 0; n < n_count; ++n) {
      const Position3& v = model.centers[n];
      const double rho = v.norm();
      const cdouble eta = model.weights(static_cast<Eigen::Index>(n));
      cdouble g_eta = 0.0, a_sum = 0.0;
      Eigen::Vector3d g_pos = Eigen::Vector3d::Zero();
      for (std::size_t m = 0; m < m_count; ++m) {
        const cdouble t = terms[n * m_count + m];
        const cdouble ce = std::conj(residual[m]) * t;
        g_eta += ce;
        if (rho > 0.0) {
          const double d = dist[n * m_count + m];
          const cdouble c = ce * eta;
          a_sum += c;
          const double b = (c * (ik / d - 1.0 / (d * d))).real();
          g_pos += b * (v - positions[m]);
        }
      }
      double* g = grad.data() + 5 * n;
      g[0] = 2.0 * g_eta.real();
      g[1] = -2.0 * g_eta.imag();
      const double mag = std::abs(eta);
      if (mag > 0.0) {
        g[0] += lambda * eta.real() / mag;
        g[1] += lambda * eta.imag() / mag;
      }
      if (rho > 0.0) {
        const double radial = (a_sum * (1.0 / (rho * rho) - ik / rho)).real();
        const Eigen::Vector3d gv = 2.0 * (radial * v + g_pos);
        g[2] = gv.x();
        g[3] = gv.y();
        g[4] = gv.z();
      } else {
        g[2] = g[3] = g[4] = 0.0;
      }
    }

    const double c1 = 1.0 - std::pow(opts.beta1, it);
    const double c2 = 1.0 - std::pow(opts.beta2, it);
    for (std::size_t i = 0; i < dim; ++i) {
      moment1[i] = opts.beta1 * moment1[i] + (1.0 - opts.beta1) * grad[i];
      moment2[i] = opts.beta2 * moment2[i] + (1.0 - opts.beta2) * grad[i] * grad[i];
      grad[i] = opts.learning_rate * (moment1[i] / c1) / (std::sqrt(moment2[i] / c2) + opts.epsilon);
    }
    for (std::size_t n = 0; n < n_count; ++n) {
      const double* step = grad.data() + 5 * n;
      model.weights(static_cast<Eigen::Index>(n)) -= cdouble(step[0], step[1]);
      model.centers[n] -= Eigen::Vector3d(step[2], step[3], step[4]);
      project(model.centers[n]);
      local.max_center_norm = std::max(local.max_center_norm, model.centers[n].norm());
    }

    loss = evaluate();
    if (!std::isfinite(loss)) throw NumericError("pnn: loss became non-finite at iteration " + std::to_string(it));
    if (loss < best_loss) {
      best_loss = loss;
      best = model;
      local.accepted_losses.push_back(loss);
    }
  }
  local.final_loss = best_loss;
  if (report) *report = std::move(local);
  return best;
}

PnnModel pnn_fit(const WaveContext& ctx, const PositionList& positions, const CVector& samples, int neurons,
                 double lambda, double radius_bound, std::uint64_t seed, const PnnOptions& opts,
                 PnnTrainingReport* report) {
  std::mt19937_64 rng(seed);
  return pnn_train(positions, samples, pnn_initialize(ctx, neurons, lambda, radius_bound, opts, rng), opts, report);
}

}  // namespace exsf
