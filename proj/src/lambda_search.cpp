#include "exsf/lambda_search.hpp"

#include <cmath>

#include "exsf/errors.hpp"

namespace exsf {

std::vector<double> log_lambda_grid(double log10_min, double log10_max, double step) {
  if (!(step > 0.0) || !(log10_max >= log10_min)) throw DomainError("invalid lambda grid");
  std::vector<double> grid;
  const int count = static_cast<int>(std::floor((log10_max - log10_min) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) grid.push_back(std::pow(10.0, log10_min + i * step));
  return grid;
}

std::size_t select_lambda(const std::vector<double>& lambdas, const std::vector<double>& scores) {
  double best = INFINITY;
  for (double s : scores) {
    if (std::isfinite(s) && s < best) best = s;
  }
  if (!std::isfinite(best)) throw NumericError("no regularization value produced a finite score");
  const double cutoff = best + 1e-12 * std::abs(best);
  std::size_t pick = lambdas.size();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (std::isfinite(scores[i]) && scores[i] <= cutoff && (pick == lambdas.size() || lambdas[i] > lambdas[pick]))
      pick = i;
  }
  return pick;
}

}  // namespace exsf
