#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinnproj/mlp.hpp"
#include "pinnproj/pde.hpp"
#include "pinnproj/projection.hpp"
#include "pinnproj/training.hpp"

namespace pinnproj {

/// Conservation error of one quantity over the grid times: the time mean
/// (1/n_t)·Σ_t |c(t) − ĉ(t)| (the reported figure) and the plain sum.
struct ConservationError {
  double mean = 0.0;
  double sum = 0.0;
};

struct Metrics {
  double error_u = 0.0;
  std::optional<ConservationError> error_cL;
  std::optional<ConservationError> error_cQ;
  double epochs = 0.0;
  double wall_seconds = 0.0;
};

/// Network prediction on every grid node, each time slice passed through the
/// projection `kind` with targets from the problem's series.
Field predict_field(const MlpParams& params, const InputScaling& scaling, const Problem& problem,
                    ProjectionKind kind);

/// ‖pred − truth‖₂ / ‖truth‖₂ over all space–time nodes. Throws
/// UndefinedMetric when truth is identically zero.
double error_u(const Field& pred, const Field& truth);

/// (1/n_t)·Σ_t |c(t) − ĉ(t)| and Σ_t |c(t) − ĉ(t)|, with ĉ the integral of
/// `kind` over each predicted slice.
ConservationError error_c(const Field& pred, const ConservedSeries& series, ConservedKind kind);

/// Per-time integral of the predicted field, for plotting.
std::vector<double> c_trajectory(const Field& pred, ConservedKind kind);

/// Arithmetic mean of every field; optional fields average over the trials
/// that carry them. Throws UsageError on an empty list.
Metrics aggregate(std::span<const Metrics> trials);

/// Metrics of a trained network against the reference field.
Metrics evaluate_model(const MlpParams& params, const InputScaling& scaling, const Problem& problem,
                       const Field& truth, ProjectionKind kind);

struct ResultRow {
  std::string pde;
  std::string variant;
  std::string quantity;
  Metrics metrics;
  int trials = 1;
};

/// Results table with columns pde, variant, quantity, error_u, error_cL,
/// error_cQ, error_cL_sum, error_cQ_sum, epochs, seconds, trials. The first
/// line is "# config_hash: <hash>". With `include_seconds` false the seconds
/// column is left empty so the file depends only on the configuration.
void write_results_csv(std::span<const ResultRow> rows, const std::filesystem::path& path,
                       const std::string& config_hash, bool include_seconds);

/// Columns t followed by one column per named series.
void write_trajectory_csv(std::span<const double> times, std::span<const std::pair<std::string, std::vector<double>>> columns,
                          const std::filesystem::path& path, const std::string& config_hash);

/// "%.17g" formatting shared by the CSV writers.
std::string format_number(double v);

}  // namespace pinnproj
