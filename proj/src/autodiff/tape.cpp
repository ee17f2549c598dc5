#include "pinnproj/autodiff/tape.hpp"

#include <cmath>
#include <limits>

#include "pinnproj/errors.hpp"

namespace pinnproj::ad {

Var Tape::variable(double value) {
  nodes_.push_back({-1, -1, 0.0, 0.0});
  return Var(value, this, static_cast<std::int32_t>(nodes_.size() - 1));
}

std::vector<Var> Tape::variables(std::span<const double> values) {
  std::vector<Var> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(variable(v));
  return out;
}

Var Tape::record(double value, const Var& a, double da) {
  nodes_.push_back({a.index_, -1, da, 0.0});
  return Var(value, this, static_cast<std::int32_t>(nodes_.size() - 1));
}

Var Tape::record(double value, const Var& a, double da, const Var& b, double db) {
  nodes_.push_back({a.index_, b.index_, da, db});
  return Var(value, this, static_cast<std::int32_t>(nodes_.size() - 1));
}

std::vector<double> Tape::adjoints(const Var& output) const {
  if (nodes_.empty()) throw UsageError("adjoints: tape is empty");
  if (output.tape_ != this || output.index_ < 0 ||
      static_cast<std::size_t>(output.index_) >= nodes_.size()) {
    throw UsageError("adjoints: output is not recorded on this tape");
  }
  std::vector<double> adj(nodes_.size(), 0.0);
  adj[static_cast<std::size_t>(output.index_)] = 1.0;
  for (std::int32_t i = output.index_; i >= 0; --i) {
    const double g = adj[static_cast<std::size_t>(i)];
    if (g == 0.0) continue;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.a >= 0) adj[static_cast<std::size_t>(n.a)] += g * n.da;
    if (n.b >= 0) adj[static_cast<std::size_t>(n.b)] += g * n.db;
  }
  return adj;
}

std::vector<double> grad(const Var& loss, std::span<const Var> wrt) {
  if (!loss.on_tape()) throw UsageError("grad: loss is not on a tape");
  const std::vector<double> adj = loss.tape()->adjoints(loss);
  std::vector<double> out(wrt.size(), 0.0);
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    if (wrt[i].tape() == loss.tape()) out[i] = adj[static_cast<std::size_t>(wrt[i].index())];
  }
  return out;
}

double value_of(const Var& v) noexcept { return v.value(); }

namespace {

Tape* common_tape(const Var& a, const Var& b) {
  Tape* ta = a.tape();
  Tape* tb = b.tape();
  if (ta && tb && ta != tb) throw UsageError("operands recorded on different tapes");
  return ta ? ta : tb;
}

Var binary(double value, const Var& a, double da, const Var& b, double db) {
  Tape* t = common_tape(a, b);
  if (!t) return Var(value);
  if (!a.on_tape()) return t->record(value, b, db);
  if (!b.on_tape()) return t->record(value, a, da);
  return t->record(value, a, da, b, db);
}

Var unary(double value, const Var& a, double da) {
  if (!a.on_tape()) return Var(value);
  return a.tape()->record(value, a, da);
}

}  // namespace

Var operator+(const Var& a, const Var& b) { return binary(a.value() + b.value(), a, 1.0, b, 1.0); }
Var operator-(const Var& a, const Var& b) { return binary(a.value() - b.value(), a, 1.0, b, -1.0); }
Var operator*(const Var& a, const Var& b) {
  return binary(a.value() * b.value(), a, b.value(), b, a.value());
}
Var operator/(const Var& a, const Var& b) {
  if (b.value() == 0.0) throw DomainError("division by zero");
  const double q = a.value() / b.value();
  return binary(q, a, 1.0 / b.value(), b, -q / b.value());
}
Var operator-(const Var& a) { return unary(-a.value(), a, -1.0); }

Var tanh(const Var& a) {
  const double y = std::tanh(a.value());
  return unary(y, a, 1.0 - y * y);
}

Var exp(const Var& a) {
  const double y = std::exp(a.value());
  return unary(y, a, y);
}

Var sqrt(const Var& a) {
  if (a.value() < 0.0) throw DomainError("sqrt of negative value");
  const double y = std::sqrt(a.value());
  if (y == 0.0 && a.on_tape()) throw DomainError("sqrt: derivative undefined at 0");
  return unary(y, a, a.on_tape() ? 0.5 / y : 0.0);
}

Var pow(const Var& a, double p) {
  const double x = a.value();
  if (x < 0.0 && std::trunc(p) != p) throw DomainError("pow: negative base with fractional exponent");
  if (x == 0.0 && p < 1.0 && a.on_tape()) throw DomainError("pow: derivative undefined at 0");
  return unary(std::pow(x, p), a, p * std::pow(x, p - 1.0));
}

Var abs(const Var& a) { return unary(std::abs(a.value()), a, a.value() < 0.0 ? -1.0 : 1.0); }

}  // namespace pinnproj::ad
