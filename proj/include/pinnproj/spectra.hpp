#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pinnproj/autodiff/hvp.hpp"

namespace pinnproj {

/// Matrix–vector product with a symmetric operator of fixed dimension.
using MatVec = std::function<std::vector<double>(std::span<const double>)>;

struct SlqOptions {
  int probes = 10;
  int steps = 100;
  std::uint64_t seed = 0;
  /// Gaussian kernel variance, scaled by max(1, λ_max − λ_min) of the nodes.
  double variance = 4e-5;
  /// Upper bound on samples of the density axis.
  int max_samples = 200000;
  /// Worker threads; probes are split between them.
  int threads = 1;
  /// Relative finite-difference step of the Hessian-vector product.
  double hvp_step = 1e-5;
};

struct SpectralDensity {
  /// Ritz values and weights (squared first eigenvector components), per probe.
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;
  /// Uniform eigenvalue axis and the smoothed density on it.
  std::vector<double> axis;
  std::vector<double> density;
  /// Kernel variance actually used after range scaling.
  double variance = 0.0;
  int probes = 0;
  int steps = 0;
};

/// Stochastic Lanczos quadrature over `matvec` of dimension n. Each probe is
/// a Rademacher vector; Lanczos runs with full reorthogonalisation and stops
/// early when β vanishes. Throws UsageError if steps > n or steps < 1.
SpectralDensity slq(const MatVec& matvec, std::size_t n, const SlqOptions& options = {});

/// The same with Hessian-vector products of `loss` at `params`.
SpectralDensity slq(const ad::GradientFn& loss, std::span<const double> params, const SlqOptions& options = {});

/// Largest Ritz value over all probes.
double max_eig(const SpectralDensity& density);

/// Trapezoid integral of the smoothed density.
double density_mass(const SpectralDensity& density);

/// CSV "eigenvalue,density" preceded by "# config_hash: <hash>".
void write_density_csv(const SpectralDensity& density, const std::filesystem::path& path,
                       const std::string& config_hash);

}  // namespace pinnproj
