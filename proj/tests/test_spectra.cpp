#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pinnproj/autodiff/tape.hpp"
#include "pinnproj/mlp.hpp"
#include "pinnproj/spectra.hpp"

using namespace pinnproj;

namespace {

MatVec dense(const Eigen::MatrixXd& A) {
  return [A](std::span<const double> v) {
    const Eigen::VectorXd r = A * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    return std::vector<double>(r.data(), r.data() + r.size());
  };
}

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  }
  return 0.5 * (M + M.transpose());
}

}  // namespace

TEST_CASE("full Krylov space of a diagonal operator recovers its eigenvalues") {
  const Eigen::MatrixXd A = Eigen::Vector3d(1, 2, 3).asDiagonal();
  SlqOptions opt;
  opt.steps = 3;
  opt.probes = 4;
  const SpectralDensity d = slq(dense(A), 3, opt);
  REQUIRE(d.nodes.size() == 4);
  for (const auto& nodes : d.nodes) {
    REQUIRE(nodes.size() == 3);
    CHECK(std::abs(nodes[0] - 1) <= 1e-10);
    CHECK(std::abs(nodes[1] - 2) <= 1e-10);
    CHECK(std::abs(nodes[2] - 3) <= 1e-10);
  }
  // A Rademacher probe weighs each eigenvector equally.
  for (const auto& w : d.weights) {
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-10));
  }
  CHECK(max_eig(d) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("the identity gives a single spike at one") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(50, 50);
  SlqOptions opt;
  opt.steps = 20;
  const SpectralDensity d = slq(dense(I), 50, opt);
  for (const auto& nodes : d.nodes) {
    REQUIRE(nodes.size() == 1);
    CHECK(nodes[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(max_eig(d) == doctest::Approx(1.0));
  const auto peak = std::max_element(d.density.begin(), d.density.end()) - d.density.begin();
  CHECK(std::abs(d.axis[static_cast<std::size_t>(peak)] - 1.0) <= std::sqrt(d.variance) / 4);
  CHECK(density_mass(d) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("weights sum to one and the smoothed density has unit mass") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd A = random_symmetric(60, seed);
    SlqOptions opt;
    opt.steps = 25;
    opt.seed = seed;
    const SpectralDensity d = slq(dense(A), 60, opt);
    for (const auto& w : d.weights) CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double mass = density_mass(d);
    CHECK(mass >= 0.98);
    CHECK(mass <= 1.02);
    CHECK(d.variance == doctest::Approx(4e-5 * std::max(1.0, max_eig(d) - [&] {
                                          double lo = INFINITY;
                                          for (const auto& n : d.nodes) lo = std::min(lo, n.front());
                                          return lo;
                                        }())));
  }
}

TEST_CASE("Ritz values stay inside the spectrum") {
  const Eigen::MatrixXd A = random_symmetric(80, 9);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  SlqOptions opt;
  opt.steps = 30;
  opt.probes = 6;
  const SpectralDensity d = slq(dense(A), 80, opt);
  for (const auto& nodes : d.nodes) {
    for (double x : nodes) {
      CHECK(x >= lo - 1e-10);
      CHECK(x <= hi + 1e-10);
    }
  }
  // Extreme eigenvalues converge first.
  CHECK(max_eig(d) == doctest::Approx(hi).epsilon(1e-3));
}

TEST_CASE("estimates are reproducible per seed and independent of threading") {
  const Eigen::MatrixXd A = random_symmetric(40, 4);
  SlqOptions opt;
  opt.steps = 15;
  opt.seed = 123;
  const SpectralDensity a = slq(dense(A), 40, opt);
  opt.threads = 4;
  const SpectralDensity b = slq(dense(A), 40, opt);
  CHECK(a.nodes == b.nodes);
  CHECK(a.weights == b.weights);
  CHECK(a.density == b.density);
  opt.seed = 124;
  CHECK(slq(dense(A), 40, opt).nodes != a.nodes);
}

TEST_CASE("option errors") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(5, 5);
  SlqOptions opt;
  opt.steps = 6;
  CHECK_THROWS_AS(slq(dense(A), 5, opt), UsageError);
  opt.steps = 0;
  CHECK_THROWS_AS(slq(dense(A), 5, opt), UsageError);
  opt.steps = 3;
  opt.probes = 0;
  CHECK_THROWS_AS(slq(dense(A), 5, opt), UsageError);
  opt.probes = 1;
  opt.variance = 0;
  CHECK_THROWS_AS(slq(dense(A), 5, opt), UsageError);
}

TEST_CASE("network loss Hessian: top Ritz value against a dense finite-difference Hessian") {
  const std::vector<int> sizes{2, 5, 5, 1};
  const MlpParams base = init_xavier(sizes, 2);
  const InputScaling id = InputScaling::identity(2);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 12; ++k) pts.push_back({0.1 * k - 0.5, std::sin(0.9 * k)});
  auto value = [&](const std::vector<double>& th) {
    MlpParams p = base;
    p.values = th;
    double s = 0;
    for (const auto& q : pts) s += std::pow(forward(p, id, q) - q[0] * q[1], 2);
    return s;
  };
  const ad::GradientFn loss = [&](std::span<const double> x, std::span<double> g) {
    ad::Tape tape;
    const auto p = tape.variables(x);
    ad::Var s(0.0);
    for (const auto& q : pts) {
      const ad::Var d = forward_jet<ad::Var>(sizes, p, id, q, -1).v - ad::Var(q[0] * q[1]);
      s += d * d;
    }
    const auto gv = ad::grad(s, p);
    std::copy(gv.begin(), gv.end(), g.begin());
    return s.value();
  };
  const auto n = base.size();
  const auto H = oracle::hessian(value, base.values);
  const Eigen::Map<const Eigen::MatrixXd> Hm(H.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Hm).eigenvalues().maxCoeff();
  SlqOptions opt;
  opt.steps = static_cast<int>(n);
  opt.probes = 2;
  const SpectralDensity d = slq(loss, base.values, opt);
  CHECK(std::abs(max_eig(d) - top) <= 0.05 * std::abs(top));
  CHECK(std::abs(max_eig(d) - top) <= 1e-4 * std::abs(top));
}

TEST_CASE("density export") {
  SlqOptions opt;
  opt.steps = 2;
  const SpectralDensity d = slq(dense(Eigen::Vector2d(1, 4).asDiagonal()), 2, opt);
  const auto path = std::filesystem::temp_directory_path() / "pinnproj_density.csv";
  write_density_csv(d, path, "cafe");
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line == "# config_hash: cafe");
  std::getline(is, line);
  CHECK(line == "eigenvalue,density");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == d.axis.size());
}
