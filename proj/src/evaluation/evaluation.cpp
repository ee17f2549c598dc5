#include "pinnproj/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pinnproj/errors.hpp"

namespace pinnproj {

Field predict_field(const MlpParams& params, const InputScaling& scaling, const Problem& problem,
                    ProjectionKind kind) {
  const Grid& g = problem.grid;
  Field out(g);
  const std::size_t m = g.spatial_points();
  Eigen::MatrixXd pts(g.dims + 1, static_cast<Eigen::Index>(m));
  const ProjectionSpec spec = problem.projection(kind);
  for (int n = 0; n < g.nt; ++n) {
    for (std::size_t s = 0; s < m; ++s) {
      const auto col = static_cast<Eigen::Index>(s);
      pts(0, col) = g.x(static_cast<int>(s % static_cast<std::size_t>(g.nx)));
      if (g.dims == 2) pts(1, col) = g.y(static_cast<int>(s / static_cast<std::size_t>(g.nx)));
      pts(g.dims, col) = g.t(n);
    }
    const BatchEvaluation eval(params, scaling, pts, 0, 0);
    std::vector<double> raw(eval.outputs().data(), eval.outputs().data() + m);
    const std::vector<double> y =
        project_field(raw, spec, problem.series(ConservedKind::Linear), problem.series(ConservedKind::Quadratic), g.t(n));
    std::copy(y.begin(), y.end(), out.slice(n).begin());
  }
  return out;
}

double error_u(const Field& pred, const Field& truth) {
  if (pred.values.size() != truth.values.size()) throw UsageError("error_u: fields have different shapes");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < truth.values.size(); ++k) {
    const double d = pred.values[k] - truth.values[k];
    num += d * d;
    den += truth.values[k] * truth.values[k];
  }
  if (den == 0.0) throw UndefinedMetric("error_u: reference field is identically zero");
  return std::sqrt(num / den);
}

ConservationError error_c(const Field& pred, const ConservedSeries& series, ConservedKind kind) {
  const std::vector<double> chat = integral_series(pred, kind);
  ConservationError e;
  for (std::size_t n = 0; n < chat.size(); ++n) {
    e.sum += std::abs(c_at(series, pred.grid.t(static_cast<int>(n))) - chat[n]);
  }
  e.mean = chat.empty() ? 0.0 : e.sum / static_cast<double>(chat.size());
  return e;
}

std::vector<double> c_trajectory(const Field& pred, ConservedKind kind) { return integral_series(pred, kind); }

Metrics aggregate(std::span<const Metrics> trials) {
  if (trials.empty()) throw UsageError("aggregate: no trials");
  Metrics mean;
  const double n = static_cast<double>(trials.size());
  auto avg = [](std::span<const Metrics> ts, auto member) -> std::optional<ConservationError> {
    ConservationError acc;
    int count = 0;
    for (const Metrics& t : ts) {
      if (const auto& e = t.*member) {
        acc.mean += e->mean;
        acc.sum += e->sum;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    acc.mean /= count;
    acc.sum /= count;
    return acc;
  };
  for (const Metrics& t : trials) {
    mean.error_u += t.error_u / n;
    mean.epochs += t.epochs / n;
    mean.wall_seconds += t.wall_seconds / n;
  }
  mean.error_cL = avg(trials, &Metrics::error_cL);
  mean.error_cQ = avg(trials, &Metrics::error_cQ);
  return mean;
}

Metrics evaluate_model(const MlpParams& params, const InputScaling& scaling, const Problem& problem,
                       const Field& truth, ProjectionKind kind) {
  const Field pred = predict_field(params, scaling, problem, kind);
  Metrics m;
  m.error_u = error_u(pred, truth);
  if (const auto* s = problem.series(ConservedKind::Linear)) m.error_cL = error_c(pred, *s, ConservedKind::Linear);
  if (const auto* s = problem.series(ConservedKind::Quadratic)) {
    m.error_cQ = error_c(pred, *s, ConservedKind::Quadratic);
  }
  return m;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_results_csv(std::span<const ResultRow> rows, const std::filesystem::path& path,
                       const std::string& config_hash, bool include_seconds) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# config_hash: " << config_hash << '\n';
  os << "pde,variant,quantity,error_u,error_cL,error_cQ,error_cL_sum,error_cQ_sum,epochs,seconds,trials\n";
  auto opt = [](const std::optional<ConservationError>& e, bool sum) {
    return e ? format_number(sum ? e->sum : e->mean) : std::string();
  };
  for (const ResultRow& r : rows) {
    const Metrics& m = r.metrics;
    os << r.pde << ',' << r.variant << ',' << r.quantity << ',' << format_number(m.error_u) << ','
       << opt(m.error_cL, false) << ',' << opt(m.error_cQ, false) << ',' << opt(m.error_cL, true) << ','
       << opt(m.error_cQ, true) << ',' << format_number(m.epochs) << ','
       << (include_seconds ? format_number(m.wall_seconds) : std::string()) << ',' << r.trials << '\n';
  }
}

void write_trajectory_csv(std::span<const double> times,
                          std::span<const std::pair<std::string, std::vector<double>>> columns,
                          const std::filesystem::path& path, const std::string& config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# config_hash: " << config_hash << '\n' << 't';
  for (const auto& c : columns) os << ',' << c.first;
  os << '\n';
  for (std::size_t n = 0; n < times.size(); ++n) {
    os << format_number(times[n]);
    for (const auto& c : columns) os << ',' << format_number(c.second.at(n));
    os << '\n';
  }
}

}  // namespace pinnproj
