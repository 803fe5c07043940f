#pragma once

#include <functional>
#include <vector>

namespace zinbspc {

struct NelderMeadOptions {
  double f_tol = 1e-8;       ///< spread of objective values across the simplex
  int max_iterations = 10'000;
  double initial_step = 0.5; ///< simplex edge in each coordinate
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free minimization (Nelder & Mead 1965, standard coefficients).
/// Non-finite objective values are treated as +infinity. The returned value
/// never exceeds objective(start).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace zinbspc
