#include <algorithm>
#include <cmath>
#include <numeric>

#include "pinnproj/errors.hpp"
#include "pinnproj/pde.hpp"
#include "solvers.hpp"

namespace pinnproj {

Grid Grid::standard_1d() { return Grid{}; }

Grid Grid::standard_2d() {
  Grid g;
  g.dims = 2;
  g.nx = 32;
  g.ny = 32;
  g.dx = 1.0 / 16.0;
  g.dy = 1.0 / 16.0;
  return g;
}

void Grid::validate() const {
  if (dims != 1 && dims != 2) throw ConfigError("grid: dims must be 1 or 2");
  if (nx < 1 || ny < 1 || nt < 1) throw ConfigError("grid: point counts must be positive");
  if (dims == 1 && ny != 1) throw ConfigError("grid: 1D grid must have ny = 1");
  if (!(dx > 0.0) || !(dt > 0.0) || (dims == 2 && !(dy > 0.0))) throw ConfigError("grid: spacings must be positive");
}

std::vector<double> Grid::lower() const {
  if (dims == 2) return {x0, y0, 0.0};
  return {x0, 0.0};
}

std::vector<double> Grid::upper() const {
  if (dims == 2) return {x_max(), y_max(), t_max()};
  return {x_max(), t_max()};
}

std::vector<double> Grid::coordinates(std::size_t flat) const {
  const std::size_t per_slice = spatial_points();
  const int n = static_cast<int>(flat / per_slice);
  const std::size_t rem = flat % per_slice;
  const int j = static_cast<int>(rem / static_cast<std::size_t>(nx));
  const int i = static_cast<int>(rem % static_cast<std::size_t>(nx));
  if (dims == 2) return {x(i), y(j), t(n)};
  return {x(i), t(n)};
}

std::string_view to_string(PdeKind kind) {
  switch (kind) {
    case PdeKind::Advection1D: return "advection1d";
    case PdeKind::Advection2D: return "advection2d";
    case PdeKind::Wave: return "wave";
    case PdeKind::KdV: return "kdv";
    case PdeKind::ReactionDiffusion: return "reaction_diffusion";
  }
  return "advection1d";
}

PdeKind parse_pde_kind(std::string_view text) {
  for (PdeKind k : {PdeKind::Advection1D, PdeKind::Advection2D, PdeKind::Wave, PdeKind::KdV,
                    PdeKind::ReactionDiffusion}) {
    if (text == to_string(k)) return k;
  }
  if (text == "rd") return PdeKind::ReactionDiffusion;
  throw ConfigError("unknown PDE: " + std::string(text));
}

PdeSpec PdeSpec::standard(PdeKind kind) {
  PdeSpec s;
  s.kind = kind;
  switch (kind) {
    case PdeKind::Advection1D:
      s.coefficients = {{"c", 0.25}};
      s.initial_condition = [](std::span<const double> p) {
        const double d = (p[0] - 1.0) / 0.25;
        return std::exp(-d * d);
      };
      break;
    case PdeKind::Advection2D:
      s.coefficients = {{"c", 0.25}};
      s.initial_condition = [](std::span<const double> p) {
        const double dx = p[0] - 1.0;
        const double dy = p[1] - 1.0;
        return std::exp(-(dx * dx + dy * dy));
      };
      break;
    case PdeKind::Wave:
      s.coefficients = {{"c", 0.25}};
      s.initial_condition = [](std::span<const double> p) {
        const double d = p[0] - 1.0;
        return std::exp(-d * d);
      };
      break;
    case PdeKind::KdV:
      s.coefficients = {{"a", 1.0}, {"b", 0.0025}};
      s.initial_condition = [](std::span<const double> p) {
        const double d = p[0] - 1.0;
        return std::exp(-d * d);
      };
      break;
    case PdeKind::ReactionDiffusion:
      s.coefficients = {{"D", 0.1}, {"k", 0.5}};
      s.conserved = false;
      s.initial_condition = [](std::span<const double> p) {
        const double d = (p[0] - 1.0) / 0.5;
        return std::exp(-d * d);
      };
      break;
  }
  return s;
}

int PdeSpec::space_order() const noexcept {
  switch (kind) {
    case PdeKind::Advection1D:
    case PdeKind::Advection2D: return 1;
    case PdeKind::Wave:
    case PdeKind::ReactionDiffusion: return 2;
    case PdeKind::KdV: return 3;
  }
  return 1;
}

double PdeSpec::coefficient(const std::string& name) const {
  const auto it = coefficients.find(name);
  if (it == coefficients.end()) throw ConfigError("PDE coefficient '" + name + "' not set");
  return it->second;
}

double residual(const PdeSpec& spec, const MlpParams& params, const InputScaling& scaling,
                std::span<const double> point) {
  const int time_axis = spec.dims();
  PointJets<double> j;
  j.along_x = forward_jets(params, scaling, point, 0);
  j.along_t = forward_jets(params, scaling, point, time_axis);
  if (spec.dims() == 2) j.along_y = forward_jets(params, scaling, point, 1);
  return residual_from_jets(spec, j);
}

Field::Field(Grid g) : grid(g), values(g.total_points(), 0.0) {}

std::span<const double> Field::slice(int n) const {
  const std::size_t m = grid.spatial_points();
  return {values.data() + static_cast<std::size_t>(n) * m, m};
}

std::span<double> Field::slice(int n) {
  const std::size_t m = grid.spatial_points();
  return {values.data() + static_cast<std::size_t>(n) * m, m};
}

bool Field::finite() const {
  const auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(values.begin(), values.end(), ok) && std::all_of(companion.begin(), companion.end(), ok);
}

Field solve_reference(const PdeSpec& spec, const Grid& grid, const SolverOptions& options) {
  grid.validate();
  if (grid.dims != spec.dims()) throw ConfigError("grid dimensionality does not match the PDE");
  if (!spec.initial_condition) throw ConfigError("PDE has no initial condition");
  switch (spec.kind) {
    case PdeKind::Advection1D:
    case PdeKind::Advection2D: return solvers::advection(spec, grid, options);
    case PdeKind::Wave: return solvers::wave(spec, grid, options);
    case PdeKind::KdV: return solvers::kdv(spec, grid, options);
    case PdeKind::ReactionDiffusion: return solvers::reaction_diffusion(spec, grid, options);
  }
  throw ConfigError("unknown PDE kind");
}

std::string solver_tag(PdeKind kind) {
  switch (kind) {
    case PdeKind::Advection1D:
    case PdeKind::Advection2D: return "weno5js-lf/ssprk3";
    case PdeKind::Wave: return "weno5js-lf/ssprk3-characteristic";
    case PdeKind::KdV: return "crank-nicolson-fv/picard";
    case PdeKind::ReactionDiffusion: return "crank-nicolson-fv";
  }
  return "unknown";
}

std::vector<double> integral_series(const Field& field, ConservedKind kind) {
  std::vector<double> out(static_cast<std::size_t>(field.grid.nt));
  for (int n = 0; n < field.grid.nt; ++n) {
    out[static_cast<std::size_t>(n)] = integral(field.slice(n), kind, field.grid.cell_volume());
  }
  return out;
}

ConservedSeries conserved_series(const Field& field, ConservedKind kind, SeriesMode mode) {
  std::vector<double> c = integral_series(field, kind);
  if (mode == SeriesMode::Constant) {
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    return ConservedSeries::constant(kind, mean);
  }
  std::vector<double> times(c.size());
  for (std::size_t n = 0; n < c.size(); ++n) times[n] = field.grid.t(static_cast<int>(n));
  return ConservedSeries::time_varying(kind, std::move(times), std::move(c));
}

double relative_drift(std::span<const double> series) {
  if (series.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  return (*hi - *lo) / std::abs(mean);
}

}  // namespace pinnproj
