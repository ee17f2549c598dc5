#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinnproj/autodiff/jet.hpp"
#include "pinnproj/mlp.hpp"
#include "pinnproj/projection.hpp"

namespace pinnproj {

/// Uniform space–time grid. Spatial nodes sit at x_i = x0 + i·Δx (same for y),
/// times at t_n = n·Δt. The spatial box is [x0, x0 + nx·Δx].
struct Grid {
  int dims = 1;
  int nx = 256;
  int ny = 1;
  int nt = 100;
  double dx = 1.0 / 128.0;
  double dy = 1.0;
  double dt = 0.01;
  double x0 = 0.0;
  double y0 = 0.0;

  static Grid standard_1d();
  static Grid standard_2d();

  void validate() const;
  std::size_t spatial_points() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t total_points() const noexcept { return spatial_points() * static_cast<std::size_t>(nt); }
  double cell_volume() const noexcept { return dims == 2 ? dx * dy : dx; }
  double x(int i) const noexcept { return x0 + i * dx; }
  double y(int j) const noexcept { return y0 + j * dy; }
  double t(int n) const noexcept { return n * dt; }
  double x_max() const noexcept { return x0 + nx * dx; }
  double y_max() const noexcept { return y0 + ny * dy; }
  double t_max() const noexcept { return (nt - 1) * dt; }
  /// Lower/upper corners of the space–time box, ordered (x[, y], t).
  std::vector<double> lower() const;
  std::vector<double> upper() const;
  /// Coordinates (x[, y], t) of flat index n·(nx·ny) + j·nx + i.
  std::vector<double> coordinates(std::size_t flat) const;
};

enum class PdeKind { Advection1D, Advection2D, Wave, KdV, ReactionDiffusion };

std::string_view to_string(PdeKind kind);
PdeKind parse_pde_kind(std::string_view text);

struct PdeSpec {
  PdeKind kind = PdeKind::Advection1D;
  std::map<std::string, double> coefficients;
  /// Initial condition u(x[, y], 0).
  std::function<double(std::span<const double>)> initial_condition;
  /// Whether the linear / quadratic integrals are conserved by the dynamics.
  bool conserved = true;

  static PdeSpec standard(PdeKind kind);

  int dims() const noexcept { return kind == PdeKind::Advection2D ? 2 : 1; }
  /// Highest time derivative in the residual (2 for the wave equation).
  int time_order() const noexcept { return kind == PdeKind::Wave ? 2 : 1; }
  /// Highest spatial derivative in the residual.
  int space_order() const noexcept;
  double coefficient(const std::string& name) const;
};

/// Jets of u at one point: along x, along t and (2D) along y. Lane 0 of
/// `along_x` carries the value; the value lanes of the others are ignored.
template <class T>
struct PointJets {
  ad::Jet<T> along_x;
  ad::Jet<T> along_t;
  ad::Jet<T> along_y;
};

/// f = u_t + N[u] for the given PDE.
template <class T>
T residual_from_jets(const PdeSpec& spec, const PointJets<T>& j) {
  const T& u = j.along_x.v;
  switch (spec.kind) {
    case PdeKind::Advection1D: {
      const T c(spec.coefficient("c"));
      return j.along_t.d1 + c * j.along_x.d1;
    }
    case PdeKind::Advection2D: {
      const T c(spec.coefficient("c"));
      return j.along_t.d1 + c * j.along_x.d1 + c * j.along_y.d1;
    }
    case PdeKind::Wave: {
      const T c(spec.coefficient("c"));
      return j.along_t.d2 - c * c * j.along_x.d2;
    }
    case PdeKind::KdV: {
      const T a(spec.coefficient("a"));
      const T b(spec.coefficient("b"));
      return j.along_t.d1 + a * u * j.along_x.d1 + b * j.along_x.d3;
    }
    case PdeKind::ReactionDiffusion: {
      const T d(spec.coefficient("D"));
      const T k(spec.coefficient("k"));
      return j.along_t.d1 - d * j.along_x.d2 - k * u;
    }
  }
  return T(0);
}

/// PDE residual of the network u_θ at `point` (x[, y], t).
double residual(const PdeSpec& spec, const MlpParams& params, const InputScaling& scaling,
                std::span<const double> point);

/// Discretised solution on a grid: values[n][j][i] stored row-major, plus an
/// optional companion array of the same shape (u_t for the wave equation).
struct Field {
  Grid grid;
  std::vector<double> values;
  std::vector<double> companion;

  explicit Field(Grid g = {});
  std::span<const double> slice(int n) const;
  std::span<double> slice(int n);
  double at(int n, int j, int i) const { return values[index(n, j, i)]; }
  std::size_t index(int n, int j, int i) const {
    return (static_cast<std::size_t>(n) * grid.ny + static_cast<std::size_t>(j)) * grid.nx + static_cast<std::size_t>(i);
  }
  bool finite() const;
};

struct SolverOptions {
  double cfl = 0.4;
  /// Crank–Nicolson steps per output interval.
  int cn_substeps = 10;
  /// Picard corrections of the lagged KdV nonlinearity per step.
  int picard_corrections = 1;
  /// Zero flux through the boundary faces (exact conservation of Σu) instead
  /// of fluxes reconstructed from mirrored ghost cells.
  bool closed_walls = false;
};

/// Reference solution: WENO5 + SSP-RK3 for advection and wave, Crank–Nicolson
/// for KdV and reaction–diffusion. Throws SolverBlowUp on non-finite states.
Field solve_reference(const PdeSpec& spec, const Grid& grid, const SolverOptions& options = {});

/// One integral value per time slice: Σ u^p · cell volume (p = 1 or 2).
std::vector<double> integral_series(const Field& field, ConservedKind kind);

/// Constant mode stores the time mean, TimeVarying the full series.
ConservedSeries conserved_series(const Field& field, ConservedKind kind, SeriesMode mode);

/// Relative drift (max − min)/|mean| of an integral over the horizon.
double relative_drift(std::span<const double> series);

// ---------------------------------------------------------------------------
// Dataset files

enum class DatasetFormat { Binary, Csv };

struct DatasetHeader {
  PdeSpec spec;
  Grid grid;
  std::string solver;
  int version = 1;
  std::string config_hash;
};

/// Binary: one JSON header line, then the little-endian float64 payload
/// (values, then companion if present). CSV: "# <header json>" then rows.
/// A non-empty `config_hash` is stored in the header.
void write_dataset(const Field& field, const PdeSpec& spec, const std::string& solver_tag,
                   const std::filesystem::path& path, DatasetFormat format, const std::string& config_hash = {});
Field read_dataset(const std::filesystem::path& path, DatasetHeader* header = nullptr);

std::string solver_tag(PdeKind kind);

/// Series file (JSON): kind, mode, times, values.
void write_series(const ConservedSeries& series, const std::filesystem::path& path,
                  const std::string& config_hash = {});
ConservedSeries read_series(const std::filesystem::path& path);

}  // namespace pinnproj
