#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinnproj/autodiff/hvp.hpp"
#include "pinnproj/lbfgs.hpp"
#include "pinnproj/mlp.hpp"
#include "pinnproj/pde.hpp"
#include "pinnproj/projection.hpp"
#include "pinnproj/sampling.hpp"

namespace pinnproj {

enum class ModelTag { Pinn, PinnSC, PinnProj };

std::string_view to_string(ModelTag tag);
ModelTag parse_model_tag(std::string_view text);

/// Which model to train. `kind` names the constrained quantities: the
/// penalised ones for PinnSC, the projected ones for PinnProj.
struct ModelVariant {
  ModelTag tag = ModelTag::Pinn;
  ProjectionKind kind = ProjectionKind::None;
  double lambda = 10.0;

  static ModelVariant pinn() { return {}; }
  static ModelVariant soft(ProjectionKind kind, double lambda = 10.0) { return {ModelTag::PinnSC, kind, lambda}; }
  static ModelVariant projected(ProjectionKind kind) { return {ModelTag::PinnProj, kind, 0.0}; }

  /// Throws ConfigError unless kind is None exactly for Pinn and λ ≥ 0 for PinnSC.
  void validate() const;
};

/// How the collocation residual of PinnProj sees the projection.
enum class ResidualMode {
  /// Residual of the projected surrogate; slice statistics enter the value
  /// and scale the derivative lanes, but their time derivatives are dropped.
  Frozen,
  /// As Frozen, plus the time derivatives of the slice statistics and c(t).
  Full,
  /// Residual of the raw network.
  Raw,
};

std::string_view to_string(ResidualMode mode);
ResidualMode parse_residual_mode(std::string_view text);

/// Source of the slice statistics in a Frozen residual. Full mode always
/// evaluates exact slices.
enum class StatisticsMode {
  /// A full spatial slice at every collocation time.
  Exact,
  /// Full slices at the grid times, linearly interpolated to each
  /// collocation time.
  Interpolated,
};

std::string_view to_string(StatisticsMode mode);
StatisticsMode parse_statistics_mode(std::string_view text);

/// PDE, grid and prescribed integral series shared by every model.
struct Problem {
  PdeSpec spec;
  Grid grid;
  std::optional<ConservedSeries> linear;
  std::optional<ConservedSeries> quadratic;

  /// Series taken from a reference field: Constant (time mean) for conserved
  /// systems, TimeVarying otherwise.
  static Problem from_field(const PdeSpec& spec, const Field& field);

  const ConservedSeries* series(ConservedKind kind) const;
  ProjectionSpec projection(ProjectionKind kind) const;
};

struct LossBreakdown {
  double data = 0.0;
  double residual = 0.0;
  /// λ-weighted soft-constraint penalty (PinnSC only).
  double constraint = 0.0;

  double total() const noexcept { return data + residual + constraint; }
};

struct LossOptions {
  ResidualMode residual_mode = ResidualMode::Frozen;
  StatisticsMode statistics = StatisticsMode::Interpolated;
  /// Map the space–time box onto [-1, 1] before the first layer.
  bool scale_inputs = true;
  /// Network points per batched evaluation of full slices.
  std::size_t chunk = 8192;
};

/// Training loss of one model variant:
///   (1/N_u)Σ|ũ(x_i,t_i) − u_i|² + (1/N_f)Σ|f(x_j,t_j)|² [+ λ(1/T)Σ_t Σ_q |c_q(t) − ĉ_q(t)|²],
/// where ũ is the projected network for PinnProj and the raw one otherwise.
/// Projected predictions are obtained by evaluating the network on the full
/// spatial slice at every time the loss touches.
class LossFunction {
 public:
  LossFunction(Problem problem, TrainingSet train, ModelVariant variant, LossOptions options = {});

  /// Loss at `params`; when `grad` is non-empty it receives dLoss/dθ.
  LossBreakdown evaluate(const MlpParams& params, std::span<double> grad) const;

  /// Adapter for optimisers and Hessian probes over the flat vector.
  ad::GradientFn gradient_fn(std::vector<int> layer_sizes) const;

  const InputScaling& scaling() const noexcept { return scaling_; }
  const Problem& problem() const noexcept { return problem_; }
  const TrainingSet& training_set() const noexcept { return train_; }
  const ModelVariant& variant() const noexcept { return variant_; }
  const LossOptions& options() const noexcept { return options_; }

 private:
  bool residual_needs_statistics() const;

  Problem problem_;
  TrainingSet train_;
  ModelVariant variant_;
  LossOptions options_;
  InputScaling scaling_;
};

/// Input scaling used for a grid (identity when disabled).
InputScaling make_scaling(const Grid& grid, bool scale_inputs);

struct EpochLoss {
  double data = 0.0;
  double residual = 0.0;
  double constraint = 0.0;
};

struct TrainRecord {
  int epochs = 0;
  int evaluations = 0;
  double wall_seconds = 0.0;
  std::vector<EpochLoss> trace;
  std::string stop_reason;
  double final_grad_inf = 0.0;
  double final_loss = 0.0;
  std::uint64_t init_seed = 0;
};

struct TrainOptions {
  LbfgsOptions lbfgs;
  std::vector<int> layer_sizes;  // empty: the standard 9×20 network
};

struct TrainResult {
  MlpParams params;
  TrainRecord record;
};

/// Xavier-initialises a network with `init_seed` and minimises the loss with
/// L-BFGS. Throws TrainingDiverged on a non-finite loss.
TrainResult train(const LossFunction& loss, std::uint64_t init_seed, const TrainOptions& options = {});

void write_record(const TrainRecord& record, const std::filesystem::path& path);
TrainRecord read_record(const std::filesystem::path& path);

}  // namespace pinnproj
