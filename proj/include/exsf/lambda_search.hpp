#pragma once

#include <string>
#include <vector>

namespace exsf {

/// Outcome of a regularization grid search. Scores are NaN for grid values
/// that were skipped; each skip leaves a message in `warnings`.
struct LambdaSearch {
  double best_lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> scores;
  std::vector<std::string> warnings;
};

/// 10^e for e = log10_min, log10_min + step, ..., log10_max (inclusive).
std::vector<double> log_lambda_grid(double log10_min = -10.0, double log10_max = 2.0, double step = 0.25);

/// Index of the smallest finite score; ties within a relative 1e-12 go to the
/// larger lambda. Throws NumericError if no score is finite.
std::size_t select_lambda(const std::vector<double>& lambdas, const std::vector<double>& scores);

}  // namespace exsf
