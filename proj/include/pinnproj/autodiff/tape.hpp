#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pinnproj::ad {

class Tape;

/// A scalar that is either a plain constant or a node on a Tape.
///
/// Arithmetic between two taped values requires both to live on the same
/// tape. Constants mix freely with either.
class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)

  double value() const noexcept { return value_; }
  bool on_tape() const noexcept { return tape_ != nullptr; }
  std::int32_t index() const noexcept { return index_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  friend class Tape;
  Var(double value, Tape* tape, std::int32_t index) : value_(value), tape_(tape), index_(index) {}

  double value_ = 0.0;
  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
};

/// Append-only record of scalar operations for reverse accumulation.
///
/// Each node stores up to two parents with their local partial derivatives.
/// A tape must be cleared (or a fresh one used) between loss evaluations.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void reserve(std::size_t nodes) { nodes_.reserve(nodes); }
  void clear() noexcept { nodes_.clear(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// New independent variable.
  Var variable(double value);
  std::vector<Var> variables(std::span<const double> values);

  Var record(double value, const Var& a, double da);
  Var record(double value, const Var& a, double da, const Var& b, double db);

  /// Adjoint of every node with respect to `output` (one per recorded node).
  /// Throws UsageError if the tape is empty or `output` is not on this tape.
  std::vector<double> adjoints(const Var& output) const;

 private:
  struct Node {
    std::int32_t a;
    std::int32_t b;
    double da;
    double db;
  };
  std::vector<Node> nodes_;
};

/// d(loss)/d(wrt[i]) for each entry of `wrt`. Entries not on the tape get 0.
std::vector<double> grad(const Var& loss, std::span<const Var> wrt);

double value_of(const Var& v) noexcept;
inline double value_of(double v) noexcept { return v; }
inline float value_of(float v) noexcept { return v; }

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

Var tanh(const Var& a);
Var exp(const Var& a);
Var sqrt(const Var& a);
Var pow(const Var& a, double p);
Var abs(const Var& a);

inline bool operator<(const Var& a, const Var& b) { return a.value() < b.value(); }
inline bool operator>(const Var& a, const Var& b) { return a.value() > b.value(); }
inline bool operator<=(const Var& a, const Var& b) { return a.value() <= b.value(); }
inline bool operator>=(const Var& a, const Var& b) { return a.value() >= b.value(); }

}  // namespace pinnproj::ad
