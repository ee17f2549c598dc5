#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Central differences of a scalar function of one variable, Richardson-refined
/// for the first two orders.
inline double d1(const std::function<double(double)>& f, double x, double h = 1e-3) {
  auto c = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
  return (4 * c(h / 2) - c(h)) / 3;
}

inline double d2(const std::function<double(double)>& f, double x, double h = 1e-3) {
  auto c = [&](double s) { return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s); };
  return (4 * c(h / 2) - c(h)) / 3;
}

inline double d3(const std::function<double(double)>& f, double x, double h = 1e-2) {
  auto c = [&](double s) { return (f(x + 2 * s) - 2 * f(x + s) + 2 * f(x - s) - f(x - 2 * s)) / (2 * s * s * s); };
  return (4 * c(h / 2) - c(h)) / 3;
}

/// Central-difference gradient of f: R^n -> R.
inline std::vector<double> gradient(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

/// Dense Hessian from second differences of function values only.
inline std::vector<double> hessian(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> x, double h = 1e-4) {
  const std::size_t n = x.size();
  std::vector<double> H(n * n);
  const double f0 = f(x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (i == j) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        v = (fp - 2 * f0 + fm) / (h * h);
      } else {
        auto at = [&](double si, double sj) {
          const double xi = x[i];
          const double xj = x[j];
          x[i] = xi + si * h;
          x[j] = xj + sj * h;
          const double r = f(x);
          x[i] = xi;
          x[j] = xj;
          return r;
        };
        v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
      }
      H[i * n + j] = H[j * n + i] = v;
    }
  }
  return H;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// max|a − b| / max(max|b|, floor).
inline double rel_err(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-12) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m / std::max(max_abs(b), floor);
}

}  // namespace oracle
