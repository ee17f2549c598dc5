// Crank–Nicolson reference solvers for KdV and reaction–diffusion on a
// cell-centred grid with zero flux through both boundary faces.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <vector>

#include "pinnproj/errors.hpp"
#include "pinnproj/pde.hpp"
#include "solvers.hpp"

namespace pinnproj::solvers {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Eigen::VectorXd;

/// Index of cell k after even reflection about the boundary faces.
int mirror(int k, int n) {
  if (k < 0) return std::min(-k - 1, n - 1);
  if (k >= n) return std::max(2 * n - k - 1, 0);
  return k;
}

VectorXd initial_values(const PdeSpec& spec, const Grid& grid) {
  VectorXd u(grid.nx);
  for (int i = 0; i < grid.nx; ++i) {
    const double x[1] = {grid.x(i)};
    u[i] = spec.initial_condition(x);
  }
  return u;
}

/// Operator A with du/dt = -A u for the divergence of face fluxes
///   F_{i+1/2} = a/6 · (u_i² + u_i·u_{i+1} + u_{i+1}²) + b · (u_{i+2} - u_{i+1} - u_i + u_{i-1}) / (2Δx²),
/// linearised about the lagged state ubar. This convective flux also keeps
/// Σu² invariant under the semi-discrete flow. Boundary faces carry no flux,
/// so 1ᵀA = 0.
SpMat kdv_operator(const VectorXd& lagged, double a, double b, double dx, bool closed) {
  const int n = static_cast<int>(lagged.size());
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n) * 12);
  const double disp = b / (2.0 * dx * dx);
  for (int f = closed ? 1 : 0; f <= (closed ? n - 1 : n); ++f) {
    const int i = f - 1;  // face between cells i and i+1
    const int l = mirror(i, n);
    const int r = mirror(i + 1, n);
    const double cl = a / 6.0 * (lagged[l] + 0.5 * lagged[r]);
    const double cr = a / 6.0 * (lagged[r] + 0.5 * lagged[l]);
    const std::pair<int, double> terms[] = {
        {l, cl}, {r, cr}, {mirror(i + 2, n), disp}, {r, -disp}, {l, -disp}, {mirror(i - 1, n), disp}};
    for (const auto& [col, w] : terms) {
      if (i >= 0) entries.emplace_back(i, col, w / dx);          // +F_{i+1/2} leaves cell i
      if (i + 1 < n) entries.emplace_back(i + 1, col, -w / dx);  // and enters cell i+1
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(entries.begin(), entries.end());
  return A;
}

/// (I + h/2·A) x = (I - h/2·A) u.
VectorXd cn_step(const SpMat& A, const VectorXd& u, double h) {
  SpMat I(A.rows(), A.cols());
  I.setIdentity();
  SpMat lhs = I + 0.5 * h * A;
  lhs.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) return VectorXd::Constant(u.size(), std::nan(""));
  return lu.solve(u - 0.5 * h * (A * u));
}

void store(Field& field, int step, const VectorXd& u) {
  std::copy(u.data(), u.data() + u.size(), field.slice(step).begin());
}

}  // namespace

Field kdv(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt) {
  const double a = spec.coefficient("a");
  const double b = spec.coefficient("b");
  Field field(grid);
  VectorXd u = initial_values(spec, grid);
  store(field, 0, u);
  const int sub = std::max(1, opt.cn_substeps);
  const double h = grid.dt / sub;
  for (int step = 1; step < grid.nt; ++step) {
    for (int s = 0; s < sub; ++s) {
      VectorXd next = cn_step(kdv_operator(u, a, b, grid.dx, opt.closed_walls), u, h);
      for (int p = 0; p < opt.picard_corrections; ++p) {
        next = cn_step(kdv_operator(0.5 * (u + next), a, b, grid.dx, opt.closed_walls), u, h);
      }
      u = std::move(next);
    }
    if (!u.allFinite()) throw SolverBlowUp("crank-nicolson-kdv", step);
    store(field, step, u);
  }
  return field;
}

Field reaction_diffusion(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt) {
  const double d = spec.coefficient("D");
  const double k = spec.coefficient("k");
  const int n = grid.nx;
  // du/dt = -A u with A = -(D·Lap + k I); Lap has mirrored ghosts, i.e. zero
  // flux through the boundary faces.
  std::vector<Triplet> entries;
  const double w = d / (grid.dx * grid.dx);
  for (int i = 0; i < n; ++i) {
    entries.emplace_back(i, i, -k);
    if (i > 0) {
      entries.emplace_back(i, i - 1, -w);
      entries.emplace_back(i, i, w);
    }
    if (i + 1 < n) {
      entries.emplace_back(i, i + 1, -w);
      entries.emplace_back(i, i, w);
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(entries.begin(), entries.end());
  const int sub = std::max(1, opt.cn_substeps);
  const double h = grid.dt / sub;
  SpMat I(n, n);
  I.setIdentity();
  SpMat lhs = I + 0.5 * h * A;
  SpMat rhs = I - 0.5 * h * A;
  lhs.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) throw SolverBlowUp("crank-nicolson-rd", 0);

  Field field(grid);
  VectorXd u = initial_values(spec, grid);
  store(field, 0, u);
  for (int step = 1; step < grid.nt; ++step) {
    for (int s = 0; s < sub; ++s) u = lu.solve(rhs * u);
    if (!u.allFinite()) throw SolverBlowUp("crank-nicolson-rd", step);
    store(field, step, u);
  }
  return field;
}

}  // namespace pinnproj::solvers
