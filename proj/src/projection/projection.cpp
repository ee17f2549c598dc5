#include "pinnproj/projection.hpp"

#include <algorithm>
#include <string>

namespace pinnproj {

std::string_view to_string(ConservedKind kind) {
  return kind == ConservedKind::Linear ? "linear" : "quadratic";
}

std::string_view to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::None: return "none";
    case ProjectionKind::Linear: return "linear";
    case ProjectionKind::Quadratic: return "quadratic";
    case ProjectionKind::Both: return "both";
  }
  return "none";
}

ProjectionKind parse_projection_kind(std::string_view text) {
  if (text == "none") return ProjectionKind::None;
  if (text == "linear" || text == "L") return ProjectionKind::Linear;
  if (text == "quadratic" || text == "Q") return ProjectionKind::Quadratic;
  if (text == "both" || text == "Both" || text == "LQ") return ProjectionKind::Both;
  throw ConfigError("unknown conserved-quantity selection: " + std::string(text));
}

void ProjectionSpec::validate() const {
  if (!(cell_volume > 0.0)) throw UsageError("ProjectionSpec: cell_volume must be positive");
  if (n < 1) throw UsageError("ProjectionSpec: n must be >= 1");
  if (kind == ProjectionKind::Both && n < 2) throw UsageError("ProjectionSpec: n must be >= 2 for Both");
}

bool ProjectionSpec::uses(ConservedKind k) const noexcept {
  switch (kind) {
    case ProjectionKind::None: return false;
    case ProjectionKind::Linear: return k == ConservedKind::Linear;
    case ProjectionKind::Quadratic: return k == ConservedKind::Quadratic;
    case ProjectionKind::Both: return true;
  }
  return false;
}

ConservedSeries ConservedSeries::constant(ConservedKind kind, double value) {
  if (kind == ConservedKind::Quadratic && value < 0.0) {
    throw ConfigError("quadratic conserved quantity cannot be negative");
  }
  ConservedSeries s;
  s.kind_ = kind;
  s.mode_ = SeriesMode::Constant;
  s.values_ = {value};
  return s;
}

ConservedSeries ConservedSeries::time_varying(ConservedKind kind, std::vector<double> times,
                                              std::vector<double> values) {
  if (times.size() != values.size()) throw ConfigError("conserved series: times/values length mismatch");
  if (times.size() < 3) throw ConfigError("conserved series: need at least 3 samples");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("conserved series: times must be strictly increasing");
  }
  if (kind == ConservedKind::Quadratic &&
      std::any_of(values.begin(), values.end(), [](double v) { return v < 0.0; })) {
    throw ConfigError("quadratic conserved quantity cannot be negative");
  }
  ConservedSeries s;
  s.kind_ = kind;
  s.mode_ = SeriesMode::TimeVarying;
  s.gradient_ = c_gradient(times, values);
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double ConservedSeries::constant_value() const {
  if (mode_ != SeriesMode::Constant) throw UsageError("series is time-varying");
  return values_.front();
}

std::vector<double> c_gradient(std::span<const double> t, std::span<const double> c) {
  const std::size_t n = c.size();
  if (n < 3 || t.size() != n) throw UsageError("c_gradient: need at least 3 samples with matching times");
  std::vector<double> g(n);
  g[0] = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (t[2] - t[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (c[i + 1] - c[i - 1]) / (t[i + 1] - t[i - 1]);
  g[n - 1] = (3.0 * c[n - 1] - 4.0 * c[n - 2] + c[n - 3]) / (t[n - 1] - t[n - 3]);
  return g;
}

std::vector<double> c_gradient(const ConservedSeries& series) {
  if (series.mode() != SeriesMode::TimeVarying) throw UsageError("c_gradient: series is constant");
  return series.gradient();
}

namespace {

/// Nearest sample to t (earlier one on ties), after the range check.
std::size_t nearest_sample(const ConservedSeries& series, double t) {
  const auto& ts = series.times();
  const std::size_t n = ts.size();
  const double lo = ts.front() - (ts[1] - ts[0]);
  const double hi = ts.back() + (ts[n - 1] - ts[n - 2]);
  if (!(t >= lo && t <= hi)) {
    throw DomainError("c_at: t=" + std::to_string(t) + " outside the sampled range");
  }
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin()) return 0;
  if (it == ts.end()) return n - 1;
  const auto k = static_cast<std::size_t>(it - ts.begin());
  return (t - ts[k - 1] <= ts[k] - t) ? k - 1 : k;
}

}  // namespace

double c_at(const ConservedSeries& series, double t) {
  if (series.mode() == SeriesMode::Constant) return series.values().front();
  const std::size_t k = nearest_sample(series, t);
  return series.values()[k] + series.gradient()[k] * (t - series.times()[k]);
}

double c_rate_at(const ConservedSeries& series, double t) {
  if (series.mode() == SeriesMode::Constant) return 0.0;
  return series.gradient()[nearest_sample(series, t)];
}

std::vector<double> project_field(std::span<const double> slice, const ProjectionSpec& spec,
                                  const ConservedSeries* linear, const ConservedSeries* quadratic, double t) {
  if (spec.kind == ProjectionKind::None) return {slice.begin(), slice.end()};
  return apply_map(slice_map<double>(slice, spec, linear, quadratic, t), slice);
}

double integral(std::span<const double> slice, ConservedKind kind, double cell_volume) {
  const double s = kind == ConservedKind::Linear
                       ? detail::accumulate<double>(slice.size(), [&](std::size_t i) { return slice[i]; })
                       : detail::accumulate<double>(slice.size(), [&](std::size_t i) { return slice[i] * slice[i]; });
  return s * cell_volume;
}

}  // namespace pinnproj
