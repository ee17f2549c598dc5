#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pinnproj/autodiff/hvp.hpp"

namespace pinnproj {

struct LbfgsOptions {
  int history = 50;
  /// Sufficient-decrease and curvature constants of the strong Wolfe conditions.
  double c1 = 1e-4;
  double c2 = 0.9;
  /// Stop once max_i |g_i| ≤ grad_tol.
  double grad_tol = 1e-6;
  int max_iterations = 20000;
  /// Function evaluations allowed per line search.
  int max_line_search = 25;
  /// Stop when |f_k − f_{k−1}| ≤ change_tol·max(1, |f_k|) or the step leaves
  /// x unchanged. The default 0 stops only on no progress at all.
  double change_tol = 0.0;
};

enum class StopReason { GradientTolerance, MaxIterations, LineSearchFailed, Stalled };

std::string_view to_string(StopReason reason);

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double grad_inf = 0.0;
  int iterations = 0;
  int evaluations = 0;
  StopReason reason = StopReason::MaxIterations;
};

/// Called after every accepted step with (iteration, f, max|g|). Returning
/// false stops the run (reported as MaxIterations).
using IterationCallback = std::function<bool(int, double, double)>;

/// Limited-memory BFGS with a strong Wolfe line search (bracketing followed
/// by cubic-interpolation zoom). Trials whose f lies within rounding of the
/// start are also accepted when the curvature condition holds. The callback
/// always runs right after the accepted point was evaluated. Throws
/// TrainingDiverged if the objective is not finite at the start or no finite
/// trial point can be found.
LbfgsResult minimize(const ad::GradientFn& fn, std::vector<double> x0, const LbfgsOptions& options = {},
                     const IterationCallback& callback = {});

}  // namespace pinnproj
