#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "pinnproj/autodiff/tape.hpp"
#include "pinnproj/errors.hpp"

namespace pinnproj {

enum class ConservedKind { Linear, Quadratic };
enum class ProjectionKind { None, Linear, Quadratic, Both };
enum class SeriesMode { Constant, TimeVarying };

std::string_view to_string(ConservedKind kind);
std::string_view to_string(ProjectionKind kind);
ProjectionKind parse_projection_kind(std::string_view text);

/// Which projector to apply to one time slice of n points, each carrying
/// `cell_volume` of the spatial domain (Δx in 1D, Δx·Δy in 2D).
struct ProjectionSpec {
  ProjectionKind kind = ProjectionKind::None;
  double cell_volume = 1.0;
  std::size_t n = 1;

  void validate() const;
  bool uses(ConservedKind k) const noexcept;
};

/// Prescribed values c(t) of one integral quantity.
class ConservedSeries {
 public:
  static ConservedSeries constant(ConservedKind kind, double value);
  /// Needs at least three strictly increasing times.
  static ConservedSeries time_varying(ConservedKind kind, std::vector<double> times,
                                      std::vector<double> values);

  ConservedKind kind() const noexcept { return kind_; }
  SeriesMode mode() const noexcept { return mode_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Derivative samples (empty in Constant mode).
  const std::vector<double>& gradient() const noexcept { return gradient_; }
  double constant_value() const;

 private:
  ConservedSeries() = default;
  ConservedKind kind_ = ConservedKind::Linear;
  SeriesMode mode_ = SeriesMode::Constant;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> gradient_;
};

/// c'(t_i): central differences inside, one-sided second-order stencils at
/// both ends. Throws UsageError for fewer than three samples.
std::vector<double> c_gradient(std::span<const double> times, std::span<const double> values);
std::vector<double> c_gradient(const ConservedSeries& series);

/// c(t) from the nearest sample t* (earlier one on ties):
///   c(t*) + c'(t*)·(t − t*).
/// Queries more than one sample spacing outside the sampled range throw
/// DomainError.
double c_at(const ConservedSeries& series, double t);

/// dc/dt of the interpolant used by c_at (the slope at the nearest sample;
/// zero in Constant mode).
double c_rate_at(const ConservedSeries& series, double t);

template <class T>
constexpr double default_degeneracy_eps() {
  return std::is_same_v<T, float> ? 1e-18 : 1e-30;
}

/// Affine action of a projector on one slice: y_i = offset + scale·(u_i − centre).
/// Every projector here has this form, with slice-wide coefficients.
template <class T>
struct SliceMap {
  T offset{0};
  T scale{1};
  T centre{0};

  T apply(const T& u) const { return offset + scale * (u - centre); }
};

namespace detail {

/// Neumaier-compensated sum for floating types; plain sum otherwise.
template <class T, class F>
T accumulate(std::size_t n, F&& term) {
  if constexpr (std::is_floating_point_v<T>) {
    T sum = 0;
    T comp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const T x = term(i);
      const T t = sum + x;
      if (std::abs(sum) >= std::abs(x)) {
        comp += (sum - t) + x;
      } else {
        comp += (x - t) + sum;
      }
      sum = t;
    }
    return sum + comp;
  } else {
    T sum(0);
    for (std::size_t i = 0; i < n; ++i) sum = sum + term(i);
    return sum;
  }
}

template <class T>
T mean(std::span<const T> u) {
  return accumulate<T>(u.size(), [&](std::size_t i) { return u[i]; }) / T(static_cast<double>(u.size()));
}

}  // namespace detail

// The maps below depend on the slice only through a few sums, so each comes
// in two forms: from precomputed sums (used when the sums themselves are the
// differentiated quantities) and from the slice.

/// Linear map from Σu over n points.
template <class T>
SliceMap<T> linear_map_from(const T& sum, std::size_t n, const T& c, double cell_volume) {
  const double nd = static_cast<double>(n);
  return {c / T(nd * cell_volume), T(1), sum / T(nd)};
}

/// Quadratic map from Σu².
template <class T>
SliceMap<T> quadratic_map_from(const T& energy, const T& c, double cell_volume,
                               double eps = default_degeneracy_eps<T>()) {
  using ad::value_of;
  using std::sqrt;
  if (value_of(c) < 0) throw InfeasibleConstraints("quadratic projection: negative target");
  if (!(value_of(energy) > eps)) {
    throw DegenerateProjection("quadratic projection: slice norm is zero, nearest point not unique");
  }
  return {T(0), sqrt(c / (T(cell_volume) * energy)), T(0)};
}

/// Combined map from the slice mean and Σ(u − mean)². `c_quadratic` is the
/// target of Δx·Σy², `c_linear` that of Δx·Σy.
template <class T>
SliceMap<T> combined_map_from(const T& mean, const T& spread, std::size_t n, const T& c_quadratic,
                              const T& c_linear, double cell_volume, double eps = default_degeneracy_eps<T>()) {
  using ad::value_of;
  using std::sqrt;
  if (n < 2) throw UsageError("combined projection needs n >= 2");
  const double nd = static_cast<double>(n);
  const T radius2 = c_quadratic / T(cell_volume) - c_linear * c_linear / T(nd * cell_volume * cell_volume);
  if (!(value_of(radius2) > 0)) {
    throw InfeasibleConstraints("combined projection: sphere and hyperplane do not intersect");
  }
  if (!(value_of(spread) > eps)) {
    throw DegenerateProjection("combined projection: centred slice is zero, nearest point not unique");
  }
  return {c_linear / T(nd * cell_volume), sqrt(radius2 / spread), mean};
}

template <class T>
SliceMap<T> linear_map(std::span<const T> u, const T& c, double cell_volume) {
  if (u.empty()) throw UsageError("projection: empty slice");
  const T sum = detail::accumulate<T>(u.size(), [&](std::size_t i) { return u[i]; });
  return linear_map_from(sum, u.size(), c, cell_volume);
}

template <class T>
SliceMap<T> quadratic_map(std::span<const T> u, const T& c, double cell_volume,
                          double eps = default_degeneracy_eps<T>()) {
  if (u.empty()) throw UsageError("projection: empty slice");
  const T energy = detail::accumulate<T>(u.size(), [&](std::size_t i) { return u[i] * u[i]; });
  return quadratic_map_from(energy, c, cell_volume, eps);
}

template <class T>
SliceMap<T> combined_map(std::span<const T> u, const T& c_quadratic, const T& c_linear, double cell_volume,
                         double eps = default_degeneracy_eps<T>()) {
  if (u.size() < 2) throw UsageError("combined projection needs n >= 2");
  const T m = detail::mean(u);
  if constexpr (std::is_floating_point_v<T>) {
    // The centre is rarely the exact mean in T; the leftover r = mean(u − m)
    // is removed from the centred values and absorbed into the offset.
    const T r = detail::accumulate<T>(u.size(), [&](std::size_t i) { return u[i] - m; }) /
                T(static_cast<double>(u.size()));
    const T spread = detail::accumulate<T>(u.size(), [&](std::size_t i) {
      const T d = (u[i] - m) - r;
      return d * d;
    });
    SliceMap<T> map = combined_map_from(m, spread, u.size(), c_quadratic, c_linear, cell_volume, eps);
    map.offset -= map.scale * r;
    return map;
  } else {
    const T spread = detail::accumulate<T>(u.size(), [&](std::size_t i) {
      const T d = u[i] - m;
      return d * d;
    });
    return combined_map_from(m, spread, u.size(), c_quadratic, c_linear, cell_volume, eps);
  }
}

template <class T>
std::vector<T> apply_map(const SliceMap<T>& map, std::span<const T> u) {
  std::vector<T> y;
  y.reserve(u.size());
  for (const T& v : u) y.push_back(map.apply(v));
  return y;
}

/// Nearest point to u with Δx·Σy = c.
template <class T>
std::vector<T> project_linear(std::span<const T> u, T c, double dx) {
  return apply_map(linear_map<T>(u, c, dx), u);
}

/// Nearest point to u with Δx·Σy² = c.
template <class T>
std::vector<T> project_quadratic(std::span<const T> u, T c, double dx, double eps = default_degeneracy_eps<T>()) {
  return apply_map(quadratic_map<T>(u, c, dx, eps), u);
}

/// Nearest point to u with Δx·Σy² = c_quadratic and Δx·Σy = c_linear.
template <class T>
std::vector<T> project_both(std::span<const T> u, T c_quadratic, T c_linear, double dx,
                            double eps = default_degeneracy_eps<T>()) {
  return apply_map(combined_map<T>(u, c_quadratic, c_linear, dx, eps), u);
}

/// Slice map for `spec` with targets taken from the series at time t.
/// Series pointers may be null when `spec` does not use that quantity.
template <class T>
SliceMap<T> slice_map(std::span<const T> slice, const ProjectionSpec& spec, const ConservedSeries* linear,
                      const ConservedSeries* quadratic, double t) {
  spec.validate();
  if (slice.size() != spec.n) throw UsageError("project_field: slice length does not match spec.n");
  auto target = [&](const ConservedSeries* s, const char* what) {
    if (!s) throw ConfigError(std::string("project_field: missing ") + what + " series");
    return T(c_at(*s, t));
  };
  switch (spec.kind) {
    case ProjectionKind::None:
      return {};
    case ProjectionKind::Linear:
      return linear_map<T>(slice, target(linear, "linear"), spec.cell_volume);
    case ProjectionKind::Quadratic:
      return quadratic_map<T>(slice, target(quadratic, "quadratic"), spec.cell_volume);
    case ProjectionKind::Both:
      return combined_map<T>(slice, target(quadratic, "quadratic"), target(linear, "linear"),
                             spec.cell_volume);
  }
  return {};
}

/// Project one (possibly flattened 2D) time slice.
std::vector<double> project_field(std::span<const double> slice, const ProjectionSpec& spec,
                                  const ConservedSeries* linear, const ConservedSeries* quadratic, double t);

/// Δx·Σu (Linear) or Δx·Σu² (Quadratic) over a slice.
double integral(std::span<const double> slice, ConservedKind kind, double cell_volume);

}  // namespace pinnproj
