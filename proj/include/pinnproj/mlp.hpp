#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pinnproj/autodiff/jet.hpp"

namespace pinnproj {

/// Per-input affine map applied before the first layer:
///   normalized[d] = (x[d] - shift[d]) * scale[d].
/// Jet lanes pick up the factor scale[d] through the chain rule.
struct InputScaling {
  std::vector<double> shift;
  std::vector<double> scale;

  static InputScaling identity(std::size_t dims);
  /// Maps the box [lo, hi] onto [-1, 1] along every axis.
  static InputScaling unit_box(std::span<const double> lo, std::span<const double> hi);

  std::size_t dims() const noexcept { return shift.size(); }
  double normalize(std::size_t axis, double x) const { return (x - shift[axis]) * scale[axis]; }
  double denormalize(std::size_t axis, double xi) const { return xi / scale[axis] + shift[axis]; }
};

/// Fully connected tanh network stored as one flat vector.
///
/// Layer l contributes its weight matrix (out × in, column-major) followed by
/// its bias vector. Hidden layers apply tanh; the last layer is affine.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return values.size(); }
};

/// [input_dim, width × hidden_layers, 1]; the defaults give the 9×20 network.
std::vector<int> standard_layer_sizes(int input_dim, int hidden_layers = 9, int width = 20);

/// Σ (in·out + out) over consecutive layer pairs.
std::size_t parameter_count(std::span<const int> layer_sizes);

/// Xavier-normal weights (variance 2/(fan_in + fan_out)), zero biases.
MlpParams init_xavier(std::vector<int> layer_sizes, std::uint64_t seed);

/// Zero-filled parameters of the right length.
MlpParams zero_params(std::vector<int> layer_sizes);

double forward(const MlpParams& params, const InputScaling& scaling, std::span<const double> point);

/// Network output and its first three derivatives with respect to input
/// `seed_axis`, for any scalar type (double for evaluation, ad::Var when the
/// parameters are taped).
template <class T>
ad::Jet<T> forward_jet(std::span<const int> layer_sizes, std::span<const T> weights,
                       const InputScaling& scaling, std::span<const double> point, int seed_axis) {
  using J = ad::Jet<T>;
  const std::size_t in0 = static_cast<std::size_t>(layer_sizes.front());
  std::vector<J> act(in0);
  for (std::size_t d = 0; d < in0; ++d) {
    act[d] = J::constant(T(scaling.normalize(d, point[d])));
    if (static_cast<int>(d) == seed_axis) act[d].d1 = T(scaling.scale[d]);
  }
  std::size_t offset = 0;
  const std::size_t layers = layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(layer_sizes[l + 1]);
    const std::size_t bias = offset + in * out;
    std::vector<J> next(out);
    for (std::size_t j = 0; j < out; ++j) {
      J z = J::constant(weights[bias + j]);
      for (std::size_t i = 0; i < in; ++i) z = z + act[i] * weights[offset + i * out + j];
      next[j] = (l + 1 < layers) ? tanh(z) : z;
    }
    act = std::move(next);
    offset = bias + out;
  }
  return act.front();
}

ad::Jet<double> forward_jets(const MlpParams& params, const InputScaling& scaling,
                             std::span<const double> point, int seed_axis);

/// Batched jet evaluation with a stored trace for reverse accumulation.
///
/// Evaluates the network on the columns of `points` (dims × B), propagating
/// derivative lanes up to `order` (0..3) along input `seed_axis` (ignored when
/// order is 0). `accumulate_gradient` then adds Σ_b Σ_k adjoint(k,b) ·
/// ∂outputs(k,b)/∂θ into `grad`. The parameter vector must outlive this object.
class BatchEvaluation {
 public:
  BatchEvaluation(const MlpParams& params, const InputScaling& scaling, const Eigen::MatrixXd& points,
                  int seed_axis, int order);

  int order() const noexcept { return order_; }
  Eigen::Index size() const noexcept { return outputs_.cols(); }
  /// (order+1) × B; row k is the k-th derivative lane.
  const Eigen::MatrixXd& outputs() const noexcept { return outputs_; }

  void accumulate_gradient(const Eigen::MatrixXd& adjoint, std::span<double> grad) const;

 private:
  struct LayerTrace {
    std::array<Eigen::MatrixXd, 4> input;  // activation lanes entering the layer
    std::array<Eigen::MatrixXd, 4> pre;    // pre-activation lanes 1..3 (hidden layers)
  };

  const MlpParams* params_;
  int order_;
  std::vector<LayerTrace> trace_;
  Eigen::MatrixXd outputs_;
};

/// Checkpoint file: binary (bit-exact) or JSON. Format is chosen by extension
/// (".json" selects JSON, anything else binary).
void save_checkpoint(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace pinnproj
