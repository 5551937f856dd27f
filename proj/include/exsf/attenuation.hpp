#pragma once

// Order attenuation xi_n(alpha, beta) = 1 / int_0^inf exp(-(alpha/r)^(1/beta)) |h_n(r)|^2 dr.
//
// Values span hundreds of orders of magnitude across (n, alpha, beta), so the
// table is kept as log xi and consumers combine it with log|h_n| before
// exponentiating.

#include <vector>

namespace exsf {

/// Feasible region for (alpha, beta): delta_min <= alpha - beta <= delta_max,
/// beta_min <= beta <= beta_max.
struct ConstraintBox {
  double delta_min = 1.0;
  double delta_max = 100.0;
  double beta_min = 1e-4;
  double beta_max = 5.0;

  /// Throws DomainError unless 0 < delta_min < delta_max and 0 < beta_min < beta_max.
  void validate() const;
  bool contains(double alpha, double beta, double slack = 0.0) const;
};

struct AttenuationParams {
  double alpha = 2.0;
  double beta = 1.0;
  ConstraintBox box{};

  /// Throws DomainError unless alpha > 0 and beta > 0.
  void validate() const;
  bool feasible(double slack = 1e-12) const { return box.contains(alpha, beta, slack); }
};

/// log xi_n(alpha, beta); adaptive quadrature to relative 1e-10 or better.
/// Throws NumericError naming (n, alpha, beta) if the quadrature fails.
double log_xi(int order, double alpha, double beta);
double xi(int order, double alpha, double beta);

/// log xi_n for n = 0..max_order from one vector-valued quadrature.
class XiTable {
 public:
  XiTable(double alpha, double beta, int max_order);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  int max_order() const noexcept { return static_cast<int>(log_xi_.size()) - 1; }
  double log_value(int order) const { return log_xi_.at(static_cast<std::size_t>(order)); }
  double value(int order) const;
  const std::vector<double>& log_values() const noexcept { return log_xi_; }

 private:
  double alpha_;
  double beta_;
  std::vector<double> log_xi_;
};

}  // namespace exsf
