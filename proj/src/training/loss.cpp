#include <algorithm>
#include <cmath>
#include <memory>

#include "pinnproj/errors.hpp"
#include "pinnproj/training.hpp"

namespace pinnproj {

using ad::Jet;
using ad::Tape;
using ad::Var;
using Eigen::Index;
using Eigen::MatrixXd;

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::Pinn: return "pinn";
    case ModelTag::PinnSC: return "pinn-sc";
    case ModelTag::PinnProj: return "pinn-proj";
  }
  return "pinn";
}

ModelTag parse_model_tag(std::string_view text) {
  if (text == "pinn" || text == "PINN") return ModelTag::Pinn;
  if (text == "pinn-sc" || text == "sc" || text == "PINN-SC") return ModelTag::PinnSC;
  if (text == "pinn-proj" || text == "proj" || text == "PINN-Proj") return ModelTag::PinnProj;
  throw ConfigError("unknown model variant: " + std::string(text));
}

std::string_view to_string(ResidualMode mode) {
  switch (mode) {
    case ResidualMode::Frozen: return "frozen";
    case ResidualMode::Full: return "full";
    case ResidualMode::Raw: return "raw";
  }
  return "frozen";
}

std::string_view to_string(StatisticsMode mode) {
  return mode == StatisticsMode::Exact ? "exact" : "interpolated";
}

StatisticsMode parse_statistics_mode(std::string_view text) {
  if (text == "exact") return StatisticsMode::Exact;
  if (text == "interpolated") return StatisticsMode::Interpolated;
  throw ConfigError("unknown statistics mode: " + std::string(text));
}

ResidualMode parse_residual_mode(std::string_view text) {
  if (text == "frozen") return ResidualMode::Frozen;
  if (text == "full") return ResidualMode::Full;
  if (text == "raw") return ResidualMode::Raw;
  throw ConfigError("unknown residual mode: " + std::string(text));
}

void ModelVariant::validate() const {
  if ((tag == ModelTag::Pinn) != (kind == ProjectionKind::None)) {
    throw ConfigError("model variant: a conserved quantity must be chosen exactly for PINN-SC and PINN-Proj");
  }
  if (tag == ModelTag::PinnSC && !(lambda >= 0.0)) throw ConfigError("model variant: lambda must be >= 0");
}

Problem Problem::from_field(const PdeSpec& spec, const Field& field) {
  Problem p;
  p.spec = spec;
  p.grid = field.grid;
  const SeriesMode mode = spec.conserved ? SeriesMode::Constant : SeriesMode::TimeVarying;
  p.linear = conserved_series(field, ConservedKind::Linear, mode);
  p.quadratic = conserved_series(field, ConservedKind::Quadratic, mode);
  return p;
}

const ConservedSeries* Problem::series(ConservedKind kind) const {
  const auto& s = kind == ConservedKind::Linear ? linear : quadratic;
  return s ? &*s : nullptr;
}

ProjectionSpec Problem::projection(ProjectionKind kind) const {
  return {kind, grid.cell_volume(), grid.spatial_points()};
}

InputScaling make_scaling(const Grid& grid, bool scale_inputs) {
  const std::vector<double> lo = grid.lower();
  const std::vector<double> hi = grid.upper();
  return scale_inputs ? InputScaling::unit_box(lo, hi) : InputScaling::identity(lo.size());
}

namespace {

/// Network lanes of one batch, registered as tape leaves (lane-major).
struct TapedBatch {
  std::unique_ptr<BatchEvaluation> eval;
  std::vector<Var> vars;

  TapedBatch(Tape& tape, const MlpParams& params, const InputScaling& scaling, const MatrixXd& points, int axis,
             int order)
      : eval(std::make_unique<BatchEvaluation>(params, scaling, points, axis, order)) {
    const MatrixXd& out = eval->outputs();
    vars.reserve(static_cast<std::size_t>(out.size()));
    for (Index k = 0; k < out.rows(); ++k) {
      for (Index b = 0; b < out.cols(); ++b) vars.push_back(tape.variable(out(k, b)));
    }
  }

  const Var& at(int k, Index b) const {
    return vars[static_cast<std::size_t>(k * eval->size() + b)];
  }

  Jet<Var> jet(Index b) const {
    Jet<Var> j;
    j.v = at(0, b);
    if (eval->order() >= 1) j.d1 = at(1, b);
    if (eval->order() >= 2) j.d2 = at(2, b);
    if (eval->order() >= 3) j.d3 = at(3, b);
    return j;
  }

  void backward(const std::vector<double>& adj, std::span<double> grad) const {
    MatrixXd a(eval->order() + 1, eval->size());
    for (Index k = 0; k < a.rows(); ++k) {
      for (Index b = 0; b < a.cols(); ++b) a(k, b) = adj[static_cast<std::size_t>(at(static_cast<int>(k), b).index())];
    }
    eval->accumulate_gradient(a, grad);
  }
};

/// Sums Σu and Σu² (with time-derivative lanes up to `order`) of the network
/// over full spatial slices at a list of times, plus the values of selected
/// slice entries. Large groups are processed in chunks and re-evaluated on
/// the backward pass.
class SliceGroup {
 public:
  SliceGroup(const Grid& grid, std::vector<double> times, int order, std::vector<std::vector<std::size_t>> keep,
             std::size_t chunk)
      : grid_(grid), times_(std::move(times)), order_(order), keep_(std::move(keep)), chunk_(chunk) {
    keep_.resize(times_.size());
    m_ = grid_.spatial_points();
    slot_.assign(times_.size(), {});
    for (std::size_t k = 0; k < times_.size(); ++k) {
      for (std::size_t r = 0; r < keep_[k].size(); ++r) slot_[k].emplace_back(keep_[k][r], r);
      std::sort(slot_[k].begin(), slot_[k].end());
    }
  }

  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<Jet<double>>& s1() const noexcept { return s1_; }
  const std::vector<Jet<double>>& s2() const noexcept { return s2_; }
  double kept(std::size_t slice, std::size_t r) const { return kept_[slice][r]; }

  void forward(const MlpParams& params, const InputScaling& scaling) {
    s1_.assign(times_.size(), Jet<double>(0.0));
    s2_.assign(times_.size(), Jet<double>(0.0));
    kept_.assign(times_.size(), {});
    for (std::size_t k = 0; k < times_.size(); ++k) kept_[k].assign(keep_[k].size(), 0.0);
    cache_.clear();
    const std::size_t total = times_.size() * m_;
    const bool keep_trace = total <= chunk_ * 4;
    for (std::size_t start = 0; start < total; start += chunk_) {
      const std::size_t len = std::min(chunk_, total - start);
      auto eval = std::make_unique<BatchEvaluation>(params, scaling, points(start, len), time_axis(), order_);
      const MatrixXd& out = eval->outputs();
      for (std::size_t q = 0; q < len; ++q) {
        const std::size_t k = (start + q) / m_;
        const Jet<double> u = lanes(out, static_cast<Index>(q));
        s1_[k] = s1_[k] + u;
        s2_[k] = s2_[k] + u * u;
      }
      collect_kept(out, start, len);
      if (keep_trace) cache_.push_back(std::move(eval));
    }
  }

  /// Adds the parameter gradient given adjoints of the sum lanes and of the
  /// kept entries.
  void backward(const MlpParams& params, const InputScaling& scaling, const std::vector<Jet<double>>& a1,
                const std::vector<Jet<double>>& a2, const std::vector<std::vector<double>>& akept,
                std::span<double> grad) const {
    const std::size_t total = times_.size() * m_;
    std::size_t c = 0;
    for (std::size_t start = 0; start < total; start += chunk_, ++c) {
      const std::size_t len = std::min(chunk_, total - start);
      std::unique_ptr<BatchEvaluation> fresh;
      const BatchEvaluation* eval;
      if (c < cache_.size()) {
        eval = cache_[c].get();
      } else {
        fresh = std::make_unique<BatchEvaluation>(params, scaling, points(start, len), time_axis(), order_);
        eval = fresh.get();
      }
      const MatrixXd& out = eval->outputs();
      MatrixXd adj = MatrixXd::Zero(order_ + 1, static_cast<Index>(len));
      for (std::size_t q = 0; q < len; ++q) {
        const std::size_t k = (start + q) / m_;
        const auto col = static_cast<Index>(q);
        const Jet<double> u = lanes(out, col);
        const Jet<double>& x = a1[k];
        const Jet<double>& y = a2[k];
        // Adjoints through s1 = Σu and s2 = Σu·u (jet product).
        adj(0, col) = x.v + 2.0 * (u.v * y.v + u.d1 * y.d1 + u.d2 * y.d2 + u.d3 * y.d3);
        if (order_ >= 1) adj(1, col) = x.d1 + 2.0 * (u.v * y.d1 + 2.0 * u.d1 * y.d2 + 3.0 * u.d2 * y.d3);
        if (order_ >= 2) adj(2, col) = x.d2 + 2.0 * (u.v * y.d2 + 3.0 * u.d1 * y.d3);
        if (order_ >= 3) adj(3, col) = x.d3 + 2.0 * u.v * y.d3;
      }
      for_each_kept(start, len, [&](std::size_t k, std::size_t r, Index col) { adj(0, col) += akept[k][r]; });
      eval->accumulate_gradient(adj, grad);
    }
  }

 private:
  int time_axis() const { return grid_.dims; }

  MatrixXd points(std::size_t start, std::size_t len) const {
    MatrixXd p(grid_.dims + 1, static_cast<Index>(len));
    for (std::size_t q = 0; q < len; ++q) {
      const std::size_t g = start + q;
      const std::size_t k = g / m_;
      const std::size_t s = g % m_;
      const auto col = static_cast<Index>(q);
      const int i = static_cast<int>(s % static_cast<std::size_t>(grid_.nx));
      const int j = static_cast<int>(s / static_cast<std::size_t>(grid_.nx));
      p(0, col) = grid_.x(i);
      if (grid_.dims == 2) p(1, col) = grid_.y(j);
      p(grid_.dims, col) = times_[k];
    }
    return p;
  }

  Jet<double> lanes(const MatrixXd& out, Index col) const {
    Jet<double> u(out(0, col));
    if (order_ >= 1) u.d1 = out(1, col);
    if (order_ >= 2) u.d2 = out(2, col);
    if (order_ >= 3) u.d3 = out(3, col);
    return u;
  }

  template <class F>
  void for_each_kept(std::size_t start, std::size_t len, F&& f) const {
    const std::size_t k_first = start / m_;
    const std::size_t k_last = (start + len - 1) / m_;
    for (std::size_t k = k_first; k <= k_last; ++k) {
      for (const auto& [s, r] : slot_[k]) {
        const std::size_t g = k * m_ + s;
        if (g >= start && g < start + len) f(k, r, static_cast<Index>(g - start));
      }
    }
  }

  void collect_kept(const MatrixXd& out, std::size_t start, std::size_t len) {
    for_each_kept(start, len, [&](std::size_t k, std::size_t r, Index col) { kept_[k][r] = out(0, col); });
  }

  const Grid& grid_;
  std::vector<double> times_;
  int order_;
  std::vector<std::vector<std::size_t>> keep_;
  std::size_t chunk_;
  std::size_t m_ = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> slot_;
  std::vector<Jet<double>> s1_;
  std::vector<Jet<double>> s2_;
  std::vector<std::vector<double>> kept_;
  std::vector<std::unique_ptr<BatchEvaluation>> cache_;
};

/// Tape leaves for the sum lanes of every slice in a group.
struct TapedSums {
  std::vector<Jet<Var>> s1;
  std::vector<Jet<Var>> s2;

  TapedSums(Tape& tape, const SliceGroup& group, int order) {
    auto leaf = [&](const Jet<double>& j) {
      Jet<Var> v(tape.variable(j.v));
      if (order >= 1) v.d1 = tape.variable(j.d1);
      if (order >= 2) v.d2 = tape.variable(j.d2);
      if (order >= 3) v.d3 = tape.variable(j.d3);
      return v;
    };
    for (std::size_t k = 0; k < group.size(); ++k) {
      s1.push_back(leaf(group.s1()[k]));
      s2.push_back(leaf(group.s2()[k]));
    }
  }

  static Jet<double> adjoint(const std::vector<double>& adj, const Jet<Var>& j) {
    auto a = [&](const Var& v) { return v.on_tape() ? adj[static_cast<std::size_t>(v.index())] : 0.0; };
    return {a(j.v), a(j.d1), a(j.d2), a(j.d3)};
  }

  void adjoints(const std::vector<double>& adj, std::vector<Jet<double>>& a1, std::vector<Jet<double>>& a2) const {
    a1.clear();
    a2.clear();
    for (std::size_t k = 0; k < s1.size(); ++k) {
      a1.push_back(adjoint(adj, s1[k]));
      a2.push_back(adjoint(adj, s2[k]));
    }
  }
};

/// Projection map of one slice from its sums; c values are jets in time.
SliceMap<Jet<Var>> map_from_sums(ProjectionKind kind, const Jet<Var>& s1, const Jet<Var>& s2, std::size_t n,
                                 const Jet<Var>& c_linear, const Jet<Var>& c_quadratic, double cell_volume) {
  switch (kind) {
    case ProjectionKind::None: return {};
    case ProjectionKind::Linear: return linear_map_from(s1, n, c_linear, cell_volume);
    case ProjectionKind::Quadratic: return quadratic_map_from(s2, c_quadratic, cell_volume);
    case ProjectionKind::Both: {
      const Jet<Var> nd(Var(static_cast<double>(n)));
      const Jet<Var> mean = s1 / nd;
      const Jet<Var> spread = s2 - s1 * mean;
      return combined_map_from(mean, spread, n, c_quadratic, c_linear, cell_volume);
    }
  }
  return {};
}

Jet<Var> c_jet(const ConservedSeries* series, double t, bool with_rate) {
  if (!series) return Jet<Var>(Var(0.0));
  Jet<Var> c(Var(c_at(*series, t)));
  if (with_rate) c.d1 = Var(c_rate_at(*series, t));
  return c;
}

}  // namespace

LossFunction::LossFunction(Problem problem, TrainingSet train, ModelVariant variant, LossOptions options)
    : problem_(std::move(problem)),
      train_(std::move(train)),
      variant_(variant),
      options_(options),
      scaling_(make_scaling(problem_.grid, options.scale_inputs)) {
  variant_.validate();
  problem_.grid.validate();
  if (train_.dims != problem_.grid.dims + 1) throw UsageError("training set dimension does not match the grid");
  if (options_.chunk == 0) throw UsageError("loss options: chunk must be positive");
  if (variant_.tag != ModelTag::Pinn) {
    const ProjectionSpec ps = problem_.projection(variant_.kind);
    ps.validate();
    for (ConservedKind k : {ConservedKind::Linear, ConservedKind::Quadratic}) {
      if (ps.uses(k) && !problem_.series(k)) {
        throw ConfigError("missing " + std::string(to_string(k)) + " conserved series for the chosen variant");
      }
    }
  }
}

bool LossFunction::residual_needs_statistics() const {
  if (variant_.tag != ModelTag::PinnProj || options_.residual_mode == ResidualMode::Raw) return false;
  if (options_.residual_mode == ResidualMode::Full) return true;
  // A shift leaves residuals without a u term unchanged.
  const PdeKind pde = problem_.spec.kind;
  const bool shift_invariant = pde == PdeKind::Advection1D || pde == PdeKind::Advection2D || pde == PdeKind::Wave;
  return !(variant_.kind == ProjectionKind::Linear && shift_invariant);
}

LossBreakdown LossFunction::evaluate(const MlpParams& params, std::span<double> grad) const {
  const Grid& grid = problem_.grid;
  const PdeSpec& spec = problem_.spec;
  const std::size_t m = grid.spatial_points();
  const double cv = grid.cell_volume();
  const bool proj = variant_.tag == ModelTag::PinnProj;
  const bool soft = variant_.tag == ModelTag::PinnSC;
  const ConservedSeries* lin = problem_.series(ConservedKind::Linear);
  const ConservedSeries* quad = problem_.series(ConservedKind::Quadratic);
  const ProjectionSpec pspec = problem_.projection(variant_.kind);
  if (!grad.empty() && grad.size() != params.size()) throw UsageError("loss: gradient buffer size mismatch");

  Tape tape;
  LossBreakdown out;
  Var data_term(0.0);
  Var residual_term(0.0);
  Var constraint_term(0.0);

  // Full grid slices: the data times for PinnProj, every time for PinnSC.
  const std::size_t n_data = train_.data_index.size();
  std::vector<int> steps;
  std::vector<std::vector<std::size_t>> keep;
  std::vector<std::pair<std::size_t, std::size_t>> data_slot(n_data);  // (slice, kept slot)
  if (proj && n_data > 0) {
    for (std::size_t d = 0; d < n_data; ++d) {
      const int step = static_cast<int>(train_.data_index[d] / m);
      if (steps.empty() || steps.back() != step) {
        steps.push_back(step);
        keep.emplace_back();
      }
      data_slot[d] = {steps.size() - 1, keep.back().size()};
      keep.back().push_back(train_.data_index[d] % m);
    }
  } else if (soft) {
    for (int n = 0; n < grid.nt; ++n) steps.push_back(n);
  }
  std::vector<double> step_times;
  for (int n : steps) step_times.push_back(grid.t(n));
  SliceGroup slices(grid, step_times, 0, keep, options_.chunk);
  std::unique_ptr<TapedSums> slice_sums;
  if (!steps.empty()) {
    slices.forward(params, scaling_);
    slice_sums = std::make_unique<TapedSums>(tape, slices, 0);
  }

  // Data term.
  std::unique_ptr<TapedBatch> data_batch;
  std::vector<std::vector<Var>> kept_vars(slices.size());
  if (n_data > 0) {
    Var sum(0.0);
    if (proj) {
      std::vector<SliceMap<Jet<Var>>> maps;
      for (std::size_t k = 0; k < slices.size(); ++k) {
        const double t = step_times[k];
        maps.push_back(map_from_sums(variant_.kind, slice_sums->s1[k], slice_sums->s2[k], m, c_jet(lin, t, false),
                                     c_jet(quad, t, false), cv));
        kept_vars[k].resize(keep[k].size());
      }
      for (std::size_t d = 0; d < n_data; ++d) {
        const auto [k, r] = data_slot[d];
        const Var u = tape.variable(slices.kept(k, r));
        kept_vars[k][r] = u;
        const SliceMap<Jet<Var>>& map = maps[k];
        const Var pred = map.offset.v + map.scale.v * (u - map.centre.v);
        const Var diff = pred - Var(train_.data_values[static_cast<Index>(d)]);
        sum += diff * diff;
      }
    } else {
      data_batch = std::make_unique<TapedBatch>(tape, params, scaling_, train_.data_points, 0, 0);
      for (std::size_t d = 0; d < n_data; ++d) {
        const Var diff = data_batch->at(0, static_cast<Index>(d)) - Var(train_.data_values[static_cast<Index>(d)]);
        sum += diff * diff;
      }
    }
    data_term = sum / Var(static_cast<double>(n_data));
  }

  // Soft-constraint penalty over the grid times.
  if (soft) {
    Var sum(0.0);
    for (std::size_t k = 0; k < slices.size(); ++k) {
      const double t = step_times[k];
      if (pspec.uses(ConservedKind::Linear)) {
        const Var d = Var(c_at(*lin, t)) - Var(cv) * slice_sums->s1[k].v;
        sum += d * d;
      }
      if (pspec.uses(ConservedKind::Quadratic)) {
        const Var d = Var(c_at(*quad, t)) - Var(cv) * slice_sums->s2[k].v;
        sum += d * d;
      }
    }
    constraint_term = Var(variant_.lambda) * sum / Var(static_cast<double>(slices.size()));
  }

  // Collocation residuals.
  const Index n_colloc = train_.collocation.cols();
  std::unique_ptr<TapedBatch> bx;
  std::unique_ptr<TapedBatch> bt;
  std::unique_ptr<TapedBatch> by;
  std::unique_ptr<SliceGroup> stats;
  std::unique_ptr<TapedSums> stat_sums;
  if (n_colloc > 0) {
    const int time_axis = grid.dims;
    bx = std::make_unique<TapedBatch>(tape, params, scaling_, train_.collocation, 0, spec.space_order());
    bt = std::make_unique<TapedBatch>(tape, params, scaling_, train_.collocation, time_axis, spec.time_order());
    if (grid.dims == 2) by = std::make_unique<TapedBatch>(tape, params, scaling_, train_.collocation, 1, 1);
    const bool full = options_.residual_mode == ResidualMode::Full;
    const bool interpolate = !full && options_.statistics == StatisticsMode::Interpolated && grid.nt > 1;
    if (residual_needs_statistics()) {
      std::vector<double> times;
      if (interpolate) {
        for (int n = 0; n < grid.nt; ++n) times.push_back(grid.t(n));
      } else {
        for (Index j = 0; j < n_colloc; ++j) times.push_back(train_.collocation(time_axis, j));
      }
      const int order = full ? spec.time_order() : 0;
      stats = std::make_unique<SliceGroup>(grid, std::move(times), order, std::vector<std::vector<std::size_t>>{},
                                           options_.chunk);
      stats->forward(params, scaling_);
      stat_sums = std::make_unique<TapedSums>(tape, *stats, order);
    }
    Var sum(0.0);
    for (Index j = 0; j < n_colloc; ++j) {
      PointJets<Var> pj;
      pj.along_x = bx->jet(j);
      pj.along_t = bt->jet(j);
      if (by) pj.along_y = by->jet(j);
      if (stats) {
        const double t = train_.collocation(time_axis, j);
        Jet<Var> s1;
        Jet<Var> s2;
        if (interpolate) {
          const int n = std::clamp(static_cast<int>(std::floor(t / grid.dt)), 0, grid.nt - 2);
          const Var w((t - grid.t(n)) / grid.dt);
          const Var one_minus = Var(1.0) - w;
          const auto a = static_cast<std::size_t>(n);
          s1 = Jet<Var>(one_minus * stat_sums->s1[a].v + w * stat_sums->s1[a + 1].v);
          s2 = Jet<Var>(one_minus * stat_sums->s2[a].v + w * stat_sums->s2[a + 1].v);
        } else {
          const auto ju = static_cast<std::size_t>(j);
          s1 = stat_sums->s1[ju];
          s2 = stat_sums->s2[ju];
        }
        const SliceMap<Jet<Var>> map =
            map_from_sums(variant_.kind, s1, s2, m, c_jet(lin, t, full), c_jet(quad, t, full), cv);
        const Var& s = map.scale.v;
        auto scale_lanes = [&](Jet<Var>& jt) {
          jt.d1 = s * jt.d1;
          jt.d2 = s * jt.d2;
          jt.d3 = s * jt.d3;
        };
        scale_lanes(pj.along_x);
        if (by) scale_lanes(pj.along_y);
        pj.along_x.v = map.offset.v + s * (pj.along_x.v - map.centre.v);
        if (full) {
          pj.along_t = map.offset + map.scale * (pj.along_t - map.centre);
        } else {
          scale_lanes(pj.along_t);
        }
      }
      const Var f = residual_from_jets(spec, pj);
      sum += f * f;
    }
    residual_term = sum / Var(static_cast<double>(n_colloc));
  }

  const Var total = data_term + residual_term + constraint_term;
  out.data = data_term.value();
  out.residual = residual_term.value();
  out.constraint = constraint_term.value();

  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
    if (!total.on_tape()) return out;
    const std::vector<double> adj = tape.adjoints(total);
    if (data_batch) data_batch->backward(adj, grad);
    if (bx) bx->backward(adj, grad);
    if (bt) bt->backward(adj, grad);
    if (by) by->backward(adj, grad);
    std::vector<Jet<double>> a1;
    std::vector<Jet<double>> a2;
    if (slice_sums) {
      slice_sums->adjoints(adj, a1, a2);
      std::vector<std::vector<double>> akept(slices.size());
      for (std::size_t k = 0; k < kept_vars.size(); ++k) {
        for (const Var& v : kept_vars[k]) akept[k].push_back(adj[static_cast<std::size_t>(v.index())]);
      }
      slices.backward(params, scaling_, a1, a2, akept, grad);
    }
    if (stats) {
      stat_sums->adjoints(adj, a1, a2);
      stats->backward(params, scaling_, a1, a2, std::vector<std::vector<double>>(stats->size()), grad);
    }
  }
  return out;
}

ad::GradientFn LossFunction::gradient_fn(std::vector<int> layer_sizes) const {
  return [this, sizes = std::move(layer_sizes)](std::span<const double> x, std::span<double> g) {
    MlpParams p;
    p.layer_sizes = sizes;
    p.values.assign(x.begin(), x.end());
    return evaluate(p, g).total();
  };
}

}  // namespace pinnproj
