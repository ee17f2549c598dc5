#include "pinnproj/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

#include "pinnproj/errors.hpp"
#include "pinnproj/evaluation.hpp"

namespace pinnproj {
namespace {

struct ProbeResult {
  std::vector<double> nodes;
  std::vector<double> weights;
};

ProbeResult lanczos(const MatVec& matvec, std::size_t n, int steps, std::uint64_t seed) {
  using Vec = Eigen::VectorXd;
  const auto dim = static_cast<Eigen::Index>(n);
  std::mt19937_64 rng(seed);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = (rng() & 1U) ? 1.0 : -1.0;
  v /= v.norm();

  Eigen::MatrixXd basis(dim, steps);
  std::vector<double> alpha;
  std::vector<double> beta;
  double scale = 0.0;
  for (int j = 0; j < steps; ++j) {
    basis.col(j) = v;
    const std::vector<double> av = matvec(std::span<const double>(v.data(), n));
    if (av.size() != n) throw UsageError("slq: matvec returned the wrong length");
    Vec w = Eigen::Map<const Vec>(av.data(), dim);
    const double a = w.dot(v);
    alpha.push_back(a);
    scale = std::max({scale, std::abs(a), beta.empty() ? 0.0 : beta.back()});
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(j + 1);
      w -= q * (q.transpose() * w);
    }
    if (j + 1 == steps) break;
    const double b = w.norm();
    if (!(b > 1e-10 * std::max(1.0, scale))) break;
    beta.push_back(b);
    v = w / b;
  }

  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
  ProbeResult r;
  for (Eigen::Index i = 0; i < m; ++i) {
    r.nodes.push_back(eig.eigenvalues()(i));
    const double c = eig.eigenvectors()(0, i);
    r.weights.push_back(c * c);
  }
  return r;
}

void smooth(SpectralDensity& out, const SlqOptions& opt) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& p : out.nodes) {
    for (double x : p) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  out.variance = opt.variance * std::max(1.0, hi - lo);
  const double sigma = std::sqrt(out.variance);
  const double a = lo - 8.0 * sigma;
  const double b = hi + 8.0 * sigma;
  const int samples = std::clamp(static_cast<int>(std::ceil((b - a) / (sigma / 8.0))) + 1, 2, opt.max_samples);
  const double h = (b - a) / (samples - 1);
  out.axis.resize(static_cast<std::size_t>(samples));
  out.density.assign(out.axis.size(), 0.0);
  for (int s = 0; s < samples; ++s) out.axis[static_cast<std::size_t>(s)] = a + s * h;
  const double norm = 1.0 / (static_cast<double>(out.nodes.size()) * sigma * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t p = 0; p < out.nodes.size(); ++p) {
    for (std::size_t i = 0; i < out.nodes[p].size(); ++i) {
      const double mu = out.nodes[p][i];
      const double w = out.weights[p][i] * norm;
      const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((mu - 8.0 * sigma - a) / h)));
      const auto last = std::min(out.axis.size() - 1, static_cast<std::size_t>(std::ceil((mu + 8.0 * sigma - a) / h)));
      for (std::size_t s = first; s <= last; ++s) {
        const double z = (out.axis[s] - mu) / sigma;
        out.density[s] += w * std::exp(-0.5 * z * z);
      }
    }
  }
}

}  // namespace

SpectralDensity slq(const MatVec& matvec, std::size_t n, const SlqOptions& opt) {
  if (opt.steps < 1 || static_cast<std::size_t>(opt.steps) > n) throw UsageError("slq: steps must lie in [1, n]");
  if (opt.probes < 1) throw UsageError("slq: at least one probe is required");
  if (!(opt.variance > 0.0)) throw UsageError("slq: variance must be positive");
  SpectralDensity out;
  out.probes = opt.probes;
  out.steps = opt.steps;
  std::vector<ProbeResult> results(static_cast<std::size_t>(opt.probes));
  std::seed_seq seq{opt.seed};
  std::vector<std::uint64_t> seeds(results.size());
  {
    std::vector<std::uint32_t> raw(2 * results.size());
    seq.generate(raw.begin(), raw.end());
    for (std::size_t p = 0; p < seeds.size(); ++p) seeds[p] = (std::uint64_t{raw[2 * p]} << 32) | raw[2 * p + 1];
  }
  auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t p = begin; p < results.size(); p += stride) results[p] = lanczos(matvec, n, opt.steps, seeds[p]);
  };
  const auto threads = static_cast<std::size_t>(std::clamp(opt.threads, 1, opt.probes));
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker, k, threads);
  }
  for (auto& r : results) {
    out.nodes.push_back(std::move(r.nodes));
    out.weights.push_back(std::move(r.weights));
  }
  smooth(out, opt);
  return out;
}

SpectralDensity slq(const ad::GradientFn& loss, std::span<const double> params, const SlqOptions& opt) {
  const std::vector<double> x(params.begin(), params.end());
  const MatVec mv = [&](std::span<const double> v) { return ad::hvp(loss, x, v, opt.hvp_step); };
  return slq(mv, x.size(), opt);
}

double max_eig(const SpectralDensity& d) {
  double m = -INFINITY;
  for (const auto& p : d.nodes) {
    for (double x : p) m = std::max(m, x);
  }
  return m;
}

double density_mass(const SpectralDensity& d) {
  double s = 0.0;
  for (std::size_t i = 1; i < d.axis.size(); ++i) s += 0.5 * (d.density[i] + d.density[i - 1]) * (d.axis[i] - d.axis[i - 1]);
  return s;
}

void write_density_csv(const SpectralDensity& d, const std::filesystem::path& path, const std::string& config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# config_hash: " << config_hash << "\neigenvalue,density\n";
  for (std::size_t i = 0; i < d.axis.size(); ++i) os << format_number(d.axis[i]) << ',' << format_number(d.density[i]) << '\n';
}

}  // namespace pinnproj
