#include "pinnproj/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "pinnproj/errors.hpp"

namespace pinnproj {

Eigen::MatrixXd lhs(std::size_t n, std::span<const double> lo, std::span<const double> hi, std::uint64_t seed) {
  if (lo.size() != hi.size()) throw UsageError("lhs: bound dimensions differ");
  const auto d = static_cast<Eigen::Index>(lo.size());
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(n));
  if (n == 0) return pts;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> perm(n);
  for (Eigen::Index axis = 0; axis < d; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const double width = (hi[a] - lo[a]) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = lo[a] + (static_cast<double>(perm[k]) + unit(rng)) * width;
      pts(axis, static_cast<Eigen::Index>(k)) = std::min(v, hi[a]);
    }
  }
  return pts;
}

namespace {

std::vector<std::size_t> eligible_nodes(const Grid& g, DataSelection selection) {
  std::vector<std::size_t> out;
  if (selection == DataSelection::FullGrid) {
    out.resize(g.total_points());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  for (int n = 0; n < g.nt; ++n) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const bool edge = i == 0 || i == g.nx - 1 || (g.dims == 2 && (j == 0 || j == g.ny - 1));
        if (n == 0 || edge) {
          out.push_back((static_cast<std::size_t>(n) * g.ny + static_cast<std::size_t>(j)) * g.nx +
                        static_cast<std::size_t>(i));
        }
      }
    }
  }
  return out;
}

}  // namespace

TrainingSet make_training_set(const Field& field, std::size_t n_data, std::size_t n_colloc, std::uint64_t seed,
                              DataSelection selection) {
  const Grid& g = field.grid;
  const std::vector<std::size_t> nodes = eligible_nodes(g, selection);
  if (n_data > nodes.size()) {
    throw UsageError("make_training_set: requested " + std::to_string(n_data) + " data points but only " +
                     std::to_string(nodes.size()) + " grid nodes are eligible");
  }
  TrainingSet set;
  set.dims = g.dims + 1;
  set.seed = seed;
  std::mt19937_64 rng(seed);
  set.data_index.reserve(n_data);
  std::sample(nodes.begin(), nodes.end(), std::back_inserter(set.data_index), static_cast<std::ptrdiff_t>(n_data),
              rng);
  std::sort(set.data_index.begin(), set.data_index.end());

  set.data_points.resize(set.dims, static_cast<Eigen::Index>(n_data));
  set.data_values.resize(static_cast<Eigen::Index>(n_data));
  for (std::size_t k = 0; k < n_data; ++k) {
    const std::vector<double> p = g.coordinates(set.data_index[k]);
    const auto col = static_cast<Eigen::Index>(k);
    for (int d = 0; d < set.dims; ++d) set.data_points(d, col) = p[static_cast<std::size_t>(d)];
    set.data_values[col] = field.values[set.data_index[k]];
  }
  const std::vector<double> lo = g.lower();
  const std::vector<double> hi = g.upper();
  set.collocation = lhs(n_colloc, lo, hi, rng());
  return set;
}

void write_training_set(const TrainingSet& set, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << (set.dims == 3 ? "kind,x,y,t,u\n" : "kind,x,t,u\n");
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (Eigen::Index k = 0; k < set.data_points.cols(); ++k) {
    os << "data";
    for (int d = 0; d < set.dims; ++d) {
      os << ',';
      put(set.data_points(d, k));
    }
    os << ',';
    put(set.data_values[k]);
    os << '\n';
  }
  for (Eigen::Index k = 0; k < set.collocation.cols(); ++k) {
    os << "collocation";
    for (int d = 0; d < set.dims; ++d) {
      os << ',';
      put(set.collocation(d, k));
    }
    os << ",\n";
  }
}

}  // namespace pinnproj
