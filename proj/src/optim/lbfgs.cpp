#include "pinnproj/lbfgs.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "pinnproj/errors.hpp"

namespace pinnproj {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientTolerance: return "gradient_tolerance";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::LineSearchFailed: return "line_search_failed";
    case StopReason::Stalled: return "stalled";
  }
  return "unknown";
}

namespace {

using Eigen::VectorXd;
using Map = Eigen::Map<VectorXd>;

/// Minimiser of the cubic matching (a, fa, ga) and (b, fb, gb), clamped to [lo, hi].
double cubic_min(double a, double fa, double ga, double b, double fb, double gb, double lo, double hi) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (lo + hi);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double t = b - (b - a) * ((gb + d2 - d1) / (gb - ga + 2.0 * d2));
  if (!std::isfinite(t)) return 0.5 * (lo + hi);
  return std::clamp(t, lo, hi);
}

struct Trial {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // g(x + αd)·d
  VectorXd g;
};

class LineSearch {
 public:
  LineSearch(const ad::GradientFn& fn, const VectorXd& x, const VectorXd& d, const LbfgsOptions& opt, int& evals)
      : fn_(fn), x_(x), d_(d), opt_(opt), evals_(evals), xt_(x.size()) {}

  Trial eval(double alpha) {
    Trial t;
    t.alpha = alpha;
    t.g.resize(x_.size());
    xt_ = x_ + alpha * d_;
    t.f = fn_(std::span<const double>(xt_.data(), static_cast<std::size_t>(xt_.size())),
              std::span<double>(t.g.data(), static_cast<std::size_t>(t.g.size())));
    ++evals_;
    ++used_;
    last_ = alpha;
    t.slope = std::isfinite(t.f) ? t.g.dot(d_) : std::numeric_limits<double>::quiet_NaN();
    return t;
  }

  /// Returns the accepted trial, or nothing when the search failed. On
  /// success the accepted trial is the most recent evaluation.
  std::optional<Trial> run(const Trial& zero, double alpha0) {
    Trial prev = zero;
    double alpha = alpha0;
    while (used_ < opt_.max_line_search) {
      Trial cur = eval(alpha);
      if (approximately_wolfe(zero, cur)) return cur;
      if (!std::isfinite(cur.f) || cur.f > zero.f + opt_.c1 * alpha * zero.slope ||
          (used_ > 1 && cur.f >= prev.f)) {
        return zoom(zero, prev, cur);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * zero.slope) return cur;
      if (cur.slope >= 0.0) return zoom(zero, cur, prev);
      const double lo = alpha + 0.01 * (alpha - prev.alpha);
      const double hi = alpha * 10.0;
      const double next = cubic_min(prev.alpha, prev.f, prev.slope, cur.alpha, cur.f, cur.slope, lo, hi);
      prev = std::move(cur);
      alpha = next;
    }
    return std::nullopt;
  }

 private:
  /// Curvature holds and f has not risen beyond rounding. Near a minimiser
  /// f differences drop below the floating-point resolution of f, so the
  /// sufficient-decrease test alone can no longer accept any step.
  bool approximately_wolfe(const Trial& zero, const Trial& cur) const {
    if (!std::isfinite(cur.f) || !std::isfinite(cur.slope)) return false;
    const double fuzz = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(zero.f);
    return cur.f <= zero.f + fuzz && std::abs(cur.slope) <= -opt_.c2 * zero.slope;
  }

  std::optional<Trial> zoom(const Trial& zero, Trial lo, Trial hi) {
    while (used_ < opt_.max_line_search) {
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      const double width = b - a;
      if (width * d_.lpNorm<Eigen::Infinity>() < 1e-14 * std::max(1.0, x_.lpNorm<Eigen::Infinity>())) break;
      double alpha;
      if (std::isfinite(hi.f) && std::isfinite(hi.slope)) {
        alpha = cubic_min(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope, a + 0.1 * width, b - 0.1 * width);
      } else {
        alpha = 0.5 * (a + b);
      }
      Trial cur = eval(alpha);
      if (approximately_wolfe(zero, cur)) return cur;
      if (!std::isfinite(cur.f) || cur.f > zero.f + opt_.c1 * alpha * zero.slope || cur.f >= lo.f) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opt_.c2 * zero.slope) return cur;
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    // Fall back to the best point found if it still decreases f; it must be
    // re-evaluated so that it is the most recent evaluation.
    if (lo.alpha > 0.0 && lo.f < zero.f) {
      if (lo.alpha != last_) lo = eval(lo.alpha);
      return lo;
    }
    return std::nullopt;
  }

  const ad::GradientFn& fn_;
  const VectorXd& x_;
  const VectorXd& d_;
  const LbfgsOptions& opt_;
  int& evals_;
  int used_ = 0;
  double last_ = 0.0;
  VectorXd xt_;
};

}  // namespace

LbfgsResult minimize(const ad::GradientFn& fn, std::vector<double> x0, const LbfgsOptions& opt,
                     const IterationCallback& callback) {
  if (opt.history < 1) throw UsageError("lbfgs: history must be positive");
  const auto n = static_cast<Eigen::Index>(x0.size());
  LbfgsResult res;
  VectorXd x = Map(x0.data(), n);
  VectorXd g(n);
  double f = fn(std::span<const double>(x.data(), x0.size()), std::span<double>(g.data(), x0.size()));
  res.evaluations = 1;
  if (!std::isfinite(f) || !g.allFinite()) throw TrainingDiverged("lbfgs: objective is not finite at the start");

  std::deque<VectorXd> s_hist;
  std::deque<VectorXd> y_hist;
  std::deque<double> rho;
  std::vector<double> alpha_buf(static_cast<std::size_t>(opt.history));

  auto finish = [&](StopReason reason) {
    res.x.assign(x.data(), x.data() + n);
    res.f = f;
    res.grad_inf = g.lpNorm<Eigen::Infinity>();
    res.reason = reason;
    return res;
  };

  if (g.lpNorm<Eigen::Infinity>() <= opt.grad_tol) return finish(StopReason::GradientTolerance);

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    // Two-loop recursion for d = -H g.
    VectorXd q = g;
    const std::size_t m = s_hist.size();
    for (std::size_t i = m; i-- > 0;) {
      alpha_buf[i] = rho[i] * s_hist[i].dot(q);
      q -= alpha_buf[i] * y_hist[i];
    }
    if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho[i] * y_hist[i].dot(q);
      q += (alpha_buf[i] - beta) * s_hist[i];
    }
    VectorXd d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / g.lpNorm<1>()) : 1.0;

    Trial zero;
    zero.f = f;
    zero.slope = slope;
    LineSearch ls(fn, x, d, opt, res.evaluations);
    std::optional<Trial> acc = ls.run(zero, alpha0);
    if (!acc) {
      res.iterations = iter - 1;
      return finish(StopReason::LineSearchFailed);
    }
    VectorXd s = acc->alpha * d;
    VectorXd y = acc->g - g;
    const double f_prev = f;
    x += s;
    f = acc->f;
    g = std::move(acc->g);
    res.iterations = iter;

    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm()) {
      if (static_cast<int>(s_hist.size()) == opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho.push_back(1.0 / sy);
    }

    const double ginf = g.lpNorm<Eigen::Infinity>();
    if (callback && !callback(iter, f, ginf)) return finish(StopReason::MaxIterations);
    if (ginf <= opt.grad_tol) return finish(StopReason::GradientTolerance);
    const double step = acc->alpha * d.lpNorm<Eigen::Infinity>();
    if (std::abs(f - f_prev) <= opt.change_tol * std::max(1.0, std::abs(f)) || step == 0.0) {
      return finish(StopReason::Stalled);
    }
  }
  return finish(StopReason::MaxIterations);
}

}  // namespace pinnproj
