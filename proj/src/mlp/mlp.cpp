#include "pinnproj/mlp.hpp"

#include <cmath>
#include <random>

#include "pinnproj/errors.hpp"

namespace pinnproj {

InputScaling InputScaling::identity(std::size_t dims) {
  return {std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0)};
}

InputScaling InputScaling::unit_box(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw UsageError("unit_box: bound dimensions differ");
  InputScaling s;
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (!(hi[d] > lo[d])) throw UsageError("unit_box: empty interval");
    s.shift.push_back(0.5 * (lo[d] + hi[d]));
    s.scale.push_back(2.0 / (hi[d] - lo[d]));
  }
  return s;
}

std::vector<int> standard_layer_sizes(int input_dim, int hidden_layers, int width) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), static_cast<std::size_t>(hidden_layers), width);
  sizes.push_back(1);
  return sizes;
}

std::size_t parameter_count(std::span<const int> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += static_cast<std::size_t>(layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1]);
  }
  return n;
}

MlpParams zero_params(std::vector<int> layer_sizes) {
  if (layer_sizes.size() < 2) throw UsageError("network needs at least an input and output layer");
  MlpParams p;
  p.values.assign(parameter_count(layer_sizes), 0.0);
  p.layer_sizes = std::move(layer_sizes);
  return p;
}

MlpParams init_xavier(std::vector<int> layer_sizes, std::uint64_t seed) {
  MlpParams p = zero_params(std::move(layer_sizes));
  p.seed = seed;
  std::mt19937_64 rng(seed);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    const int in = p.layer_sizes[l];
    const int out = p.layer_sizes[l + 1];
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / (in + out)));
    for (int k = 0; k < in * out; ++k) p.values[offset++] = normal(rng);
    offset += static_cast<std::size_t>(out);
  }
  return p;
}

double forward(const MlpParams& params, const InputScaling& scaling, std::span<const double> point) {
  const auto& sizes = params.layer_sizes;
  std::vector<double> act(static_cast<std::size_t>(sizes.front()));
  for (std::size_t d = 0; d < act.size(); ++d) act[d] = scaling.normalize(d, point[d]);
  std::vector<double> next;
  std::size_t offset = 0;
  const std::size_t layers = sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(sizes[l]);
    const std::size_t out = static_cast<std::size_t>(sizes[l + 1]);
    const double* w = params.values.data() + offset;
    const double* b = w + in * out;
    next.assign(b, b + out);
    for (std::size_t i = 0; i < in; ++i) {
      const double a = act[i];
      for (std::size_t j = 0; j < out; ++j) next[j] += w[i * out + j] * a;
    }
    if (l + 1 < layers) {
      for (double& z : next) z = std::tanh(z);
    }
    act.swap(next);
    offset += in * out + out;
  }
  return act.front();
}

ad::Jet<double> forward_jets(const MlpParams& params, const InputScaling& scaling,
                             std::span<const double> point, int seed_axis) {
  return forward_jet<double>(params.layer_sizes, params.values, scaling, point, seed_axis);
}

// ---------------------------------------------------------------------------
// Batched evaluation

namespace {

using Eigen::MatrixXd;
using ConstMap = Eigen::Map<const MatrixXd>;

}  // namespace

BatchEvaluation::BatchEvaluation(const MlpParams& params, const InputScaling& scaling,
                                 const MatrixXd& points, int seed_axis, int order)
    : params_(&params), order_(order) {
  if (order < 0 || order > 3) throw UsageError("BatchEvaluation: order must be in 0..3");
  const auto& sizes = params.layer_sizes;
  if (points.rows() != sizes.front()) throw UsageError("BatchEvaluation: point dimension mismatch");
  if (order > 0 && (seed_axis < 0 || seed_axis >= sizes.front())) {
    throw UsageError("BatchEvaluation: seed axis out of range");
  }
  const Eigen::Index batch = points.cols();
  const std::size_t layers = sizes.size() - 1;
  trace_.resize(layers);

  auto& first = trace_[0].input;
  first[0].resize(points.rows(), batch);
  for (Eigen::Index d = 0; d < points.rows(); ++d) {
    const auto du = static_cast<std::size_t>(d);
    first[0].row(d) = (points.row(d).array() - scaling.shift[du]) * scaling.scale[du];
  }
  for (int k = 1; k <= order; ++k) first[static_cast<std::size_t>(k)] = MatrixXd::Zero(points.rows(), batch);
  if (order >= 1) first[1].row(seed_axis).setConstant(scaling.scale[static_cast<std::size_t>(seed_axis)]);

  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    ConstMap w(params.values.data() + offset, out, in);
    Eigen::Map<const Eigen::VectorXd> b(params.values.data() + offset + in * out, out);
    offset += static_cast<std::size_t>(in * out + out);

    auto& tr = trace_[l];
    std::array<MatrixXd, 4> z;
    z[0].noalias() = w * tr.input[0];
    z[0].colwise() += b;
    for (int k = 1; k <= order; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      z[ku].noalias() = w * tr.input[ku];
    }
    if (l + 1 == layers) {
      outputs_.resize(order + 1, batch);
      for (int k = 0; k <= order; ++k) outputs_.row(k) = z[static_cast<std::size_t>(k)].row(0);
      break;
    }

    auto& nxt = trace_[l + 1].input;
    nxt[0] = z[0].unaryExpr([](double v) { return std::tanh(v); });
    if (order >= 1) {
      const auto y = nxt[0].array();
      const Eigen::ArrayXXd t1 = 1.0 - y.square();
      nxt[1] = (t1 * z[1].array()).matrix();
      if (order >= 2) {
        const Eigen::ArrayXXd t2 = -2.0 * y * t1;
        const auto z1 = z[1].array();
        nxt[2] = (t2 * z1.square() + t1 * z[2].array()).matrix();
        if (order >= 3) {
          const Eigen::ArrayXXd t3 = -2.0 * t1.square() + 4.0 * y.square() * t1;
          nxt[3] = (t3 * z1.cube() + 3.0 * t2 * z1 * z[2].array() + t1 * z[3].array()).matrix();
        }
      }
      for (int k = 1; k <= order; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        tr.pre[ku] = std::move(z[ku]);
      }
    }
  }
}

void BatchEvaluation::accumulate_gradient(const MatrixXd& adjoint, std::span<double> grad) const {
  const auto& sizes = params_->layer_sizes;
  if (adjoint.rows() != order_ + 1 || adjoint.cols() != size()) {
    throw UsageError("accumulate_gradient: adjoint shape mismatch");
  }
  if (grad.size() != params_->values.size()) throw UsageError("accumulate_gradient: gradient size mismatch");
  const std::size_t layers = sizes.size() - 1;

  // Offsets of each layer inside the flat vector.
  std::vector<std::size_t> offsets(layers);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    offset += static_cast<std::size_t>(sizes[l] * sizes[l + 1] + sizes[l + 1]);
  }

  // Adjoints of the pre-activation lanes of the current layer.
  std::array<MatrixXd, 4> zbar;
  for (int k = 0; k <= order_; ++k) zbar[static_cast<std::size_t>(k)] = adjoint.row(k);

  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    double* gw = grad.data() + offsets[l];
    Eigen::Map<MatrixXd> gwm(gw, out, in);
    Eigen::Map<Eigen::VectorXd> gb(gw + in * out, out);
    const auto& tr = trace_[l];
    for (int k = 0; k <= order_; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      gwm.noalias() += zbar[ku] * tr.input[ku].transpose();
    }
    gb += zbar[0].rowwise().sum();
    if (l == 0) break;

    ConstMap w(params_->values.data() + offsets[l], out, in);
    std::array<Eigen::ArrayXXd, 4> ybar;
    for (int k = 0; k <= order_; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      ybar[ku] = (w.transpose() * zbar[ku]).array();
    }

    // Back through tanh: tr.input[0] of this layer is y = tanh(z) of layer l-1.
    const auto& prev = trace_[l - 1];
    const auto y = tr.input[0].array();
    const Eigen::ArrayXXd t1 = 1.0 - y.square();
    if (order_ == 0) {
      zbar[0] = (ybar[0] * t1).matrix();
      continue;
    }
    const Eigen::ArrayXXd t2 = -2.0 * y * t1;
    const auto z1 = prev.pre[1].array();
    Eigen::ArrayXXd zb0 = ybar[0] * t1 + ybar[1] * z1 * t2;
    Eigen::ArrayXXd zb1 = ybar[1] * t1;
    Eigen::ArrayXXd zb2;
    Eigen::ArrayXXd zb3;
    if (order_ >= 2) {
      const Eigen::ArrayXXd t3 = -2.0 * t1.square() + 4.0 * y.square() * t1;
      const auto z2 = prev.pre[2].array();
      zb0 += ybar[2] * (t3 * z1.square() + t2 * z2);
      zb1 += ybar[2] * 2.0 * t2 * z1;
      zb2 = ybar[2] * t1;
      if (order_ >= 3) {
        const Eigen::ArrayXXd t4 = -4.0 * t1 * t2 + 8.0 * y * t1.square() + 4.0 * y.square() * t2;
        const auto z3 = prev.pre[3].array();
        zb0 += ybar[3] * (t4 * z1.cube() + 3.0 * t3 * z1 * z2 + t2 * z3);
        zb1 += ybar[3] * (3.0 * t3 * z1.square() + 3.0 * t2 * z2);
        zb2 += ybar[3] * 3.0 * t2 * z1;
        zb3 = ybar[3] * t1;
      }
    }
    zbar[0] = zb0.matrix();
    zbar[1] = zb1.matrix();
    if (order_ >= 2) zbar[2] = zb2.matrix();
    if (order_ >= 3) zbar[3] = zb3.matrix();
  }
}

}  // namespace pinnproj
