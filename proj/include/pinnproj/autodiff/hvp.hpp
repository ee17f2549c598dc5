#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pinnproj::ad {

/// Loss evaluator: returns the loss at `x` and writes its gradient to `grad`.
using GradientFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Hessian-vector product H(x)·v by central differences of the gradient,
///   H v ≈ (g(x + h v) - g(x - h v)) / (2h),
/// with h = rel_step·max(1, ‖x‖∞)/‖v‖∞. Exact (to rounding) for quadratic
/// losses; O(h²) truncation error otherwise. Throws UsageError on size mismatch.
std::vector<double> hvp(const GradientFn& loss, std::span<const double> x, std::span<const double> v,
                        double rel_step = 1e-5);

/// Dense Hessian assembled column by column from `hvp` on unit vectors, then
/// symmetrised. Intended as a test oracle for small problems.
std::vector<double> dense_hessian(const GradientFn& loss, std::span<const double> x,
                                  double rel_step = 1e-5);

}  // namespace pinnproj::ad
