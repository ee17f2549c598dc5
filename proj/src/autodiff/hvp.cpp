#include "pinnproj/autodiff/hvp.hpp"

#include <algorithm>
#include <cmath>

#include "pinnproj/errors.hpp"

namespace pinnproj::ad {

std::vector<double> hvp(const GradientFn& loss, std::span<const double> x, std::span<const double> v,
                        double rel_step) {
  if (x.size() != v.size()) throw UsageError("hvp: |v| != |params|");
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  double vmax = 0.0;
  double xmax = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    vmax = std::max(vmax, std::abs(v[i]));
    xmax = std::max(xmax, std::abs(x[i]));
  }
  if (vmax == 0.0) return out;
  const double h = rel_step * xmax / vmax;

  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    xp[i] += h * v[i];
    xm[i] -= h * v[i];
  }
  std::vector<double> gp(n);
  std::vector<double> gm(n);
  loss(xp, gp);
  loss(xm, gm);
  for (std::size_t i = 0; i < n; ++i) out[i] = (gp[i] - gm[i]) / (2.0 * h);
  return out;
}

std::vector<double> dense_hessian(const GradientFn& loss, std::span<const double> x, double rel_step) {
  const std::size_t n = x.size();
  std::vector<double> h(n * n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = hvp(loss, x, e, rel_step);
    for (std::size_t i = 0; i < n; ++i) h[i * n + j] = col[i];
    e[j] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (h[i * n + j] + h[j * n + i]);
      h[i * n + j] = s;
      h[j * n + i] = s;
    }
  }
  return h;
}

}  // namespace pinnproj::ad
