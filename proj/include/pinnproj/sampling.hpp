#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pinnproj/pde.hpp"

namespace pinnproj {

/// Latin hypercube design of n points in the box [lo, hi]. Each axis is cut
/// into n equal strata, each stratum receives one uniform draw, and the
/// stratum order is permuted independently per axis. Points are the columns
/// of the returned d × n matrix.
Eigen::MatrixXd lhs(std::size_t n, std::span<const double> lo, std::span<const double> hi, std::uint64_t seed);

enum class DataSelection {
  /// Uniform over every space–time grid node.
  FullGrid,
  /// Only the initial slice and the spatial boundary nodes.
  InitialBoundary,
};

struct TrainingSet {
  /// Input dimension (x[, y], t).
  int dims = 2;
  /// Flat grid indices of the data points, ascending.
  std::vector<std::size_t> data_index;
  /// dims × N_u coordinates and the matching field values.
  Eigen::MatrixXd data_points;
  Eigen::VectorXd data_values;
  /// dims × N_f collocation coordinates.
  Eigen::MatrixXd collocation;
  std::uint64_t seed = 0;
};

/// Data points drawn without replacement from the grid nodes, collocation
/// points from `lhs` over the grid's space–time box. Throws UsageError when
/// n_data exceeds the number of eligible nodes.
TrainingSet make_training_set(const Field& field, std::size_t n_data, std::size_t n_colloc, std::uint64_t seed,
                              DataSelection selection = DataSelection::FullGrid);

/// CSV with columns kind,x[,y],t,u ("data" rows carry u, "collocation" rows leave it empty).
void write_training_set(const TrainingSet& set, const std::filesystem::path& path);

}  // namespace pinnproj
