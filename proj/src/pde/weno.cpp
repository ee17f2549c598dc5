// WENO5-JS finite-volume reference solvers (advection 1D/2D, wave) with
// SSP-RK3 sub-cycling under the output interval.

#include <algorithm>
#include <cmath>
#include <vector>

#include "pinnproj/errors.hpp"
#include "pinnproj/pde.hpp"
#include "solvers.hpp"

namespace pinnproj::solvers {

namespace {

constexpr int kGhost = 3;

/// Left-biased fifth-order reconstruction at face i+1/2 from cells i-2..i+2.
double weno5(double vm2, double vm1, double v0, double vp1, double vp2) {
  constexpr double eps = 1e-6;
  const double q0 = (2.0 * vm2 - 7.0 * vm1 + 11.0 * v0) / 6.0;
  const double q1 = (-vm1 + 5.0 * v0 + 2.0 * vp1) / 6.0;
  const double q2 = (2.0 * v0 + 5.0 * vp1 - vp2) / 6.0;
  const double b0 = 13.0 / 12.0 * std::pow(vm2 - 2.0 * vm1 + v0, 2) + 0.25 * std::pow(vm2 - 4.0 * vm1 + 3.0 * v0, 2);
  const double b1 = 13.0 / 12.0 * std::pow(vm1 - 2.0 * v0 + vp1, 2) + 0.25 * std::pow(vm1 - vp1, 2);
  const double b2 = 13.0 / 12.0 * std::pow(v0 - 2.0 * vp1 + vp2, 2) + 0.25 * std::pow(3.0 * v0 - 4.0 * vp1 + vp2, 2);
  const double a0 = 0.1 / ((eps + b0) * (eps + b0));
  const double a1 = 0.6 / ((eps + b1) * (eps + b1));
  const double a2 = 0.3 / ((eps + b2) * (eps + b2));
  return (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2);
}

/// Line of n cells padded with kGhost ghosts per side; padded[k + kGhost] is cell k.
struct Line {
  std::vector<double> padded;
  int n = 0;

  explicit Line(int cells) : padded(static_cast<std::size_t>(cells + 2 * kGhost)), n(cells) {}
  double& cell(int k) { return padded[static_cast<std::size_t>(k + kGhost)]; }
  double cell(int k) const { return padded[static_cast<std::size_t>(k + kGhost)]; }

  /// Even reflection about both boundary faces, taking ghost values from `src`.
  void mirror_from(const Line& src) {
    for (int g = 1; g <= kGhost; ++g) {
      cell(-g) = src.cell(std::min(g - 1, n - 1));
      cell(n - 1 + g) = src.cell(std::max(n - g, 0));
    }
  }
};

/// Adds −∂(s·v)/∂x to dvdt for v_t + s v_x = 0, using Lax–Friedrichs flux
/// splitting with WENO5 reconstruction. Boundary faces carry zero flux when
/// `closed` is set; otherwise they use the ghost-cell reconstruction.
void advect(const Line& v, double speed, double dx, bool closed, double* dvdt, std::ptrdiff_t stride) {
  const double alpha = std::abs(speed);
  const int n = v.n;
  auto fp = [&](int k) { return 0.5 * (speed + alpha) * v.cell(k); };
  auto fm = [&](int k) { return 0.5 * (speed - alpha) * v.cell(k); };
  // flux[f] is the flux through face f - 1/2, f = 0..n.
  std::vector<double> flux(static_cast<std::size_t>(n + 1));
  for (int f = 0; f <= n; ++f) {
    if (closed && (f == 0 || f == n)) {
      flux[static_cast<std::size_t>(f)] = 0.0;
      continue;
    }
    const int i = f - 1;  // face i+1/2
    const double left = weno5(fp(i - 2), fp(i - 1), fp(i), fp(i + 1), fp(i + 2));
    const double right = weno5(fm(i + 3), fm(i + 2), fm(i + 1), fm(i), fm(i - 1));
    flux[static_cast<std::size_t>(f)] = left + right;
  }
  for (int k = 0; k < n; ++k) {
    dvdt[k * stride] -= (flux[static_cast<std::size_t>(k + 1)] - flux[static_cast<std::size_t>(k)]) / dx;
  }
}

/// u ← u + dt·L(u) combinations of the SSP-RK3 scheme.
template <class Rhs>
void ssp_rk3(std::vector<double>& u, double dt, Rhs&& rhs) {
  const std::size_t n = u.size();
  std::vector<double> k(n);
  std::vector<double> u1(n);
  std::vector<double> u2(n);
  rhs(u, k);
  for (std::size_t i = 0; i < n; ++i) u1[i] = u[i] + dt * k[i];
  rhs(u1, k);
  for (std::size_t i = 0; i < n; ++i) u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * k[i]);
  rhs(u2, k);
  for (std::size_t i = 0; i < n; ++i) u[i] = u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k[i]);
}

int substeps(double interval, double stable_dt) {
  return std::max(1, static_cast<int>(std::ceil(interval / stable_dt - 1e-12)));
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

Field advection(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt) {
  const double c = spec.coefficient("c");
  const bool two_d = grid.dims == 2;
  const int nx = grid.nx;
  const int ny = grid.ny;
  Field field(grid);
  std::vector<double> u(grid.spatial_points());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::vector<double> p = two_d ? std::vector<double>{grid.x(i), grid.y(j)} : std::vector<double>{grid.x(i)};
      u[static_cast<std::size_t>(j * nx + i)] = spec.initial_condition(p);
    }
  }

  auto rhs = [&](const std::vector<double>& state, std::vector<double>& dudt) {
    std::fill(dudt.begin(), dudt.end(), 0.0);
    Line line(nx);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) line.cell(i) = state[static_cast<std::size_t>(j * nx + i)];
      line.mirror_from(line);
      advect(line, c, grid.dx, opt.closed_walls, dudt.data() + j * nx, 1);
    }
    if (!two_d) return;
    Line col(ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) col.cell(j) = state[static_cast<std::size_t>(j * nx + i)];
      col.mirror_from(col);
      advect(col, c, grid.dy, opt.closed_walls, dudt.data() + i, nx);
    }
  };

  const double rate = std::abs(c) / grid.dx + (two_d ? std::abs(c) / grid.dy : 0.0);
  const int nsub = rate > 0.0 ? substeps(grid.dt, opt.cfl / rate) : 1;
  const double dt = grid.dt / nsub;

  std::copy(u.begin(), u.end(), field.slice(0).begin());
  for (int n = 1; n < grid.nt; ++n) {
    for (int s = 0; s < nsub; ++s) ssp_rk3(u, dt, rhs);
    if (!all_finite(u)) throw SolverBlowUp("weno5-advection", n);
    std::copy(u.begin(), u.end(), field.slice(n).begin());
  }
  return field;
}

Field wave(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt) {
  // First-order system in (u, w+, w-), w± = u_t ± c·u_x:
  //   u_t = (w+ + w-)/2,  w+_t - c w+_x = 0,  w-_t + c w-_x = 0.
  // Homogeneous Neumann reflects each characteristic into the other.
  const double c = spec.coefficient("c");
  const int n = grid.nx;
  const auto nu = static_cast<std::size_t>(n);
  Field field(grid);
  field.companion.assign(field.values.size(), 0.0);

  std::vector<double> state(3 * nu);  // [u | w+ | w-]
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    constexpr double h = 1e-5;
    const double xp[1] = {x + h};
    const double xm[1] = {x - h};
    const double x0[1] = {x};
    const double ux = (spec.initial_condition(xp) - spec.initial_condition(xm)) / (2.0 * h);
    const auto iu = static_cast<std::size_t>(i);
    state[iu] = spec.initial_condition(x0);
    state[nu + iu] = c * ux;   // u_t(x, 0) = 0
    state[2 * nu + iu] = -c * ux;
  }

  auto rhs = [&](const std::vector<double>& s, std::vector<double>& d) {
    std::fill(d.begin(), d.end(), 0.0);
    Line wp(n);
    Line wm(n);
    for (int i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      wp.cell(i) = s[nu + iu];
      wm.cell(i) = s[2 * nu + iu];
      d[iu] = 0.5 * (s[nu + iu] + s[2 * nu + iu]);
    }
    // mirror_from only writes ghosts, so the exchange order does not matter.
    wp.mirror_from(wm);
    wm.mirror_from(wp);
    advect(wp, -c, grid.dx, false, d.data() + nu, 1);
    advect(wm, c, grid.dx, false, d.data() + 2 * nu, 1);
  };

  const int nsub = c != 0.0 ? substeps(grid.dt, opt.cfl * grid.dx / std::abs(c)) : 1;
  const double dt = grid.dt / nsub;

  auto emit = [&](int step) {
    for (int i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      field.slice(step)[iu] = state[iu];
      field.companion[field.index(step, 0, i)] = 0.5 * (state[nu + iu] + state[2 * nu + iu]);
    }
  };
  emit(0);
  for (int step = 1; step < grid.nt; ++step) {
    for (int s = 0; s < nsub; ++s) ssp_rk3(state, dt, rhs);
    if (!all_finite(state)) throw SolverBlowUp("weno5-wave", step);
    emit(step);
  }
  return field;
}

}  // namespace pinnproj::solvers
