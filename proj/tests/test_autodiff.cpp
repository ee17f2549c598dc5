#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pinnproj/autodiff/hvp.hpp"
#include "pinnproj/autodiff/jet.hpp"
#include "pinnproj/mlp.hpp"

using namespace pinnproj;
using namespace pinnproj::ad;

namespace {

void check_lanes(const Jet<double>& j, const std::function<double(double)>& f, double x, double tol12 = 1e-6,
                 double tol3 = 1e-4) {
  const double scale = std::max(1.0, std::abs(j.v));
  CHECK(j.v == doctest::Approx(f(x)).epsilon(1e-14));
  CHECK(std::abs(j.d1 - oracle::d1(f, x)) <= tol12 * std::max(scale, std::abs(j.d1)));
  CHECK(std::abs(j.d2 - oracle::d2(f, x)) <= tol12 * 10 * std::max(scale, std::abs(j.d2)));
  CHECK(std::abs(j.d3 - oracle::d3(f, x)) <= tol3 * std::max(scale, std::abs(j.d3)));
}

}  // namespace

TEST_CASE("square of a seeded input") {
  const Jet<double> j = jet_eval([](const Jet<double>& x) { return x * x; }, 3.0);
  CHECK(j.v == 9.0);
  CHECK(j.d1 == 6.0);
  CHECK(j.d2 == 2.0);
  CHECK(j.d3 == 0.0);
}

TEST_CASE("tanh at the origin follows its Maclaurin series") {
  const Jet<double> j = jet_eval([](const Jet<double>& x) { return tanh(x); }, 0.0);
  CHECK(j.v == 0.0);
  CHECK(j.d1 == 1.0);
  CHECK(j.d2 == 0.0);
  CHECK(j.d3 == -2.0);
}

TEST_CASE("seeds and constants") {
  const auto s = Jet<double>::seed(1.5);
  CHECK(s.d1 == 1.0);
  CHECK(s.d2 == 0.0);
  const auto c = Jet<double>::constant(1.5);
  CHECK(c.d1 == 0.0);
  CHECK(c.d3 == 0.0);
}

TEST_CASE("every elementary op matches finite differences on random operands") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.3, 2.0);
  std::uniform_real_distribution<double> any(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = pos(rng);
    const double a = any(rng);
    const double b = any(rng);
    const double p = any(rng) * 2;
    check_lanes(jet_eval([&](const Jet<double>& u) { return u * u * u + Jet<double>(a) * u + b; }, x),
                [&](double u) { return u * u * u + a * u + b; }, x);
    check_lanes(jet_eval([&](const Jet<double>& u) { return (u + a) / (u * u + 1.0); }, x),
                [&](double u) { return (u + a) / (u * u + 1.0); }, x);
    check_lanes(jet_eval([&](const Jet<double>& u) { return tanh(u * a + b); }, x),
                [&](double u) { return std::tanh(u * a + b); }, x);
    check_lanes(jet_eval([&](const Jet<double>& u) { return exp(u * a); }, x),
                [&](double u) { return std::exp(u * a); }, x);
    check_lanes(jet_eval([&](const Jet<double>& u) { return sqrt(u); }, x), [](double u) { return std::sqrt(u); }, x);
    check_lanes(jet_eval([&](const Jet<double>& u) { return pow(u, p); }, x),
                [&](double u) { return std::pow(u, p); }, x);
    check_lanes(jet_eval([&](const Jet<double>& u) { return u - Jet<double>(a) * exp(-u); }, x),
                [&](double u) { return u - a * std::exp(-u); }, x);
  }
}

TEST_CASE("product and quotient rules hold lane by lane") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 50; ++k) {
    const Jet<double> a(n(rng), n(rng), n(rng), n(rng));
    const Jet<double> b(n(rng) + 3.0, n(rng), n(rng), n(rng));
    const Jet<double> p = a * b;
    CHECK(p.d1 == doctest::Approx(a.d1 * b.v + a.v * b.d1));
    CHECK(p.d2 == doctest::Approx(a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2));
    CHECK(p.d3 == doctest::Approx(a.d3 * b.v + 3 * a.d2 * b.d1 + 3 * a.d1 * b.d2 + a.v * b.d3));
    const Jet<double> q = (a / b) * b;
    CHECK(q.v == doctest::Approx(a.v));
    CHECK(q.d1 == doctest::Approx(a.d1));
    CHECK(q.d2 == doctest::Approx(a.d2));
    CHECK(q.d3 == doctest::Approx(a.d3));
  }
}

TEST_CASE("domain errors name the operation") {
  const auto zero = Jet<double>::seed(0.0);
  CHECK_THROWS_AS(Jet<double>(1.0) / zero, DomainError);
  CHECK_THROWS_AS(sqrt(Jet<double>::seed(-1.0)), DomainError);
  CHECK_THROWS_WITH_AS(sqrt(Jet<double>::seed(-1.0)), doctest::Contains("sqrt"), DomainError);
  CHECK_THROWS_WITH_AS(Jet<double>(1.0) / zero, doctest::Contains("division"), DomainError);
  CHECK_THROWS_AS(pow(Jet<double>::seed(-2.0), 0.5), DomainError);
}

TEST_CASE("gradient of a sum of squares is twice the input") {
  Tape tape;
  const std::vector<double> theta{0.5, -1.25, 3.0, 0.0};
  const std::vector<Var> p = tape.variables(theta);
  Var loss(0.0);
  for (const Var& v : p) loss += v * v;
  const std::vector<double> g = grad(loss, p);
  for (std::size_t i = 0; i < theta.size(); ++i) CHECK(g[i] == 2 * theta[i]);
}

TEST_CASE("a constant loss has zero gradient") {
  Tape tape;
  const std::vector<Var> p = tape.variables(std::vector<double>{1.0, 2.0});
  const Var loss = p[0] * Var(0.0) + p[1] * Var(0.0);
  for (double g : grad(loss, p)) CHECK(g == 0.0);
}

TEST_CASE("gradient usage errors") {
  Tape tape;
  CHECK_THROWS_AS(tape.adjoints(Var(1.0)), UsageError);
  const Var x = tape.variable(2.0);
  Tape other;
  other.variable(1.0);
  CHECK_THROWS_AS(other.adjoints(x), UsageError);
  CHECK_THROWS_AS(grad(Var(3.0), std::vector<Var>{x}), UsageError);
}

TEST_CASE("every recorded node receives exactly one adjoint") {
  Tape tape;
  const Var a = tape.variable(0.3);
  const Var b = tape.variable(-0.7);
  const Var y = tanh(a * b) + exp(a) / (b * b);
  CHECK(tape.adjoints(y).size() == tape.size());
}

TEST_CASE("gradient through an input-derivative lane of a one-unit network") {
  const std::vector<int> sizes{1, 1, 1};
  const std::vector<double> theta{0.8, -0.3, 1.7, 0.2};
  const InputScaling id = InputScaling::identity(1);
  const double x = 0.37;
  auto loss_of = [&](const std::vector<double>& th) {
    auto j = forward_jet<double>(sizes, th, id, std::span<const double>(&x, 1), 0);
    return j.d1 * j.d1;
  };
  Tape tape;
  const std::vector<Var> p = tape.variables(theta);
  const auto j = forward_jet<Var>(sizes, p, id, std::span<const double>(&x, 1), 0);
  const Var loss = j.d1 * j.d1;
  const std::vector<double> g = grad(loss, p);
  CHECK(oracle::rel_err(g, oracle::gradient(loss_of, theta)) <= 1e-5);
}

TEST_CASE("gradient is linear in the loss") {
  const std::vector<double> theta{0.4, -0.9, 1.3};
  auto build = [&](double alpha, double beta) {
    Tape tape;
    const std::vector<Var> p = tape.variables(theta);
    const Var l1 = tanh(p[0] * p[1]) + p[2] * p[2];
    const Var l2 = exp(p[0]) * p[1] - p[2];
    return grad(Var(alpha) * l1 + Var(beta) * l2, p);
  };
  const auto g1 = build(1, 0);
  const auto g2 = build(0, 1);
  const auto gc = build(2.5, -0.75);
  for (int i = 0; i < 3; ++i) CHECK(gc[i] == doctest::Approx(2.5 * g1[i] - 0.75 * g2[i]).epsilon(1e-13));
}

TEST_CASE("hvp of a quadratic form is the matrix product") {
  Eigen::Matrix3d A;
  A << 4, 1, 0.5, 1, 3, -0.2, 0.5, -0.2, 2;
  const GradientFn loss = [&](std::span<const double> x, std::span<double> g) {
    const Eigen::Map<const Eigen::Vector3d> xv(x.data());
    const Eigen::Vector3d ax = A * xv;
    if (!g.empty()) Eigen::Map<Eigen::Vector3d>(g.data()) = ax;
    return 0.5 * xv.dot(ax);
  };
  const std::vector<double> x{0.3, -1.0, 2.0};
  const std::vector<double> v{1.0, 0.5, -0.25};
  const auto hv = hvp(loss, x, v);
  const Eigen::Vector3d expected = A * Eigen::Map<const Eigen::Vector3d>(v.data());
  for (int i = 0; i < 3; ++i) CHECK(hv[static_cast<std::size_t>(i)] == doctest::Approx(expected(i)).epsilon(1e-8));
  for (double h : hvp(loss, x, std::vector<double>{0, 0, 0})) CHECK(h == 0.0);
  CHECK_THROWS_AS(hvp(loss, x, std::vector<double>{1, 2}), UsageError);
}

TEST_CASE("hvp of a small network loss matches a value-only Hessian") {
  const std::vector<int> sizes{2, 3, 1};
  const MlpParams base = init_xavier(sizes, 9);
  const InputScaling id = InputScaling::identity(2);
  const std::vector<std::array<double, 2>> pts{{0.1, 0.2}, {0.7, -0.4}, {-0.3, 0.9}};
  auto value = [&](const std::vector<double>& th) {
    MlpParams p = base;
    p.values = th;
    double s = 0;
    for (const auto& q : pts) {
      const double u = forward(p, id, q);
      s += (u - q[0]) * (u - q[0]);
    }
    return s;
  };
  const GradientFn loss = [&](std::span<const double> x, std::span<double> g) {
    Tape tape;
    const std::vector<Var> p = tape.variables(x);
    Var s(0.0);
    for (const auto& q : pts) {
      const Var u = forward_jet<Var>(sizes, p, id, q, -1).v;
      s += (u - Var(q[0])) * (u - Var(q[0]));
    }
    const auto gv = grad(s, p);
    std::copy(gv.begin(), gv.end(), g.begin());
    return s.value();
  };
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<double> v(base.size());
  for (double& e : v) e = n(rng);
  const auto H = oracle::hessian(value, base.values);
  std::vector<double> hv_oracle(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) hv_oracle[i] += H[i * v.size() + j] * v[j];
  }
  CHECK(oracle::rel_err(hvp(loss, base.values, v), hv_oracle) <= 1e-4);
}
