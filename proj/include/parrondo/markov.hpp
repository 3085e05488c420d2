#pragma once

// Finite discrete-time Markov chains: validated transition matrices and
// probability vectors, evolution, classification and stationary vectors.
//
// States are indexed 0..n-1. Both value types are immutable once built and
// every free function is pure, so they can be shared across threads freely.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "parrondo/error.hpp"

namespace parrondo::markov {

/// Tolerance on row sums (matrices) and total mass (vectors).
inline constexpr double kSumTolerance = 1e-12;

using RawMatrix = std::vector<std::vector<double>>;

/// Square row-stochastic matrix, stored row-major.
class TransitionMatrix {
 public:
  /// Validates `raw` and renormalizes rows whose sum is within
  /// kSumTolerance of 1. Throws NonSquare, NegativeEntry, NonFiniteEntry or
  /// RowSumError.
  static TransitionMatrix from_rows(const RawMatrix& raw);
  static TransitionMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }
  double min_entry() const;
  RawMatrix to_rows() const;

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  TransitionMatrix(std::size_t n, std::vector<double> data)
      : n_(n), data_(std::move(data)) {}
  static TransitionMatrix from_flat(std::size_t n, std::vector<double> data);

  friend TransitionMatrix multiply(const TransitionMatrix&, const TransitionMatrix&);

  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Nonnegative vector with unit mass.
class ProbabilityVector {
 public:
  /// Validates entries in [0, 1] and a total within kSumTolerance of 1, then
  /// renormalizes. Throws InvalidProbabilityVector.
  explicit ProbabilityVector(std::vector<double> probs);
  static ProbabilityVector uniform(std::size_t n);
  static ProbabilityVector point_mass(std::size_t n, std::size_t state);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

 private:
  std::vector<double> probs_;
};

enum class StationaryMethod { DirectSolve, PowerIteration };

struct ConvergenceReport {
  StationaryMethod method = StationaryMethod::DirectSolve;
  std::size_t iterations = 0;
  // Spread max - min of the iterated components at the last step.
  double final_gap = 0.0;
  // 1 - 2d, only when every entry of the matrix is positive.
  std::optional<double> contraction_factor_bound;
  // ||wP - w||_inf of the returned vector; unused by contraction_diagnostics.
  double residual = 0.0;
  // Gap after each step, starting with the initial spread.
  std::vector<double> gaps;
  // Whether every recorded gap sits under the (1 - 2d)^k envelope.
  bool within_envelope = true;
};

struct StationaryResult {
  ProbabilityVector distribution;
  ConvergenceReport report;
};

TransitionMatrix validate_stochastic(const RawMatrix& raw);

TransitionMatrix multiply(const TransitionMatrix& lhs, const TransitionMatrix& rhs);

/// P^n by binary exponentiation; P^0 is the identity.
TransitionMatrix matrix_power(const TransitionMatrix& p, unsigned long long n);

/// q P^n by n successive vector-matrix products.
ProbabilityVector evolve(const ProbabilityVector& q, const TransitionMatrix& p,
                         unsigned long long n);

/// Strong connectivity of the positivity graph.
bool is_irreducible(const TransitionMatrix& p);

/// Some power P^k with k <= (n-1)^2 + 1 is strictly positive. Works on
/// boolean patterns so small entries cannot underflow.
bool is_regular(const TransitionMatrix& p);

/// Fixed probability vector w = wP of an irreducible chain.
///
/// Solves (P^T - I) w^T = 0 with the last equation replaced by sum(w) = 1.
/// When that system is numerically singular, regular chains fall back to
/// stationary_by_power_iteration; periodic chains raise SingularSystem.
StationaryResult stationary(const TransitionMatrix& p);

/// Iterates P^k until the column spread of every column falls below
/// `gap_tolerance`; the common row is the limit vector. Requires a regular
/// chain (NotIrreducible / SingularSystem otherwise).
StationaryResult stationary_by_power_iteration(const TransitionMatrix& p,
                                               std::size_t max_iterations = 100000,
                                               double gap_tolerance = 1e-12);

/// Iterates y <- P y and records the spread max(y) - min(y) after each of
/// `steps` steps against the envelope (1 - 2d)^k (M_0 - m_0), d = min entry.
/// Throws ZeroEntry if some entry of P is not strictly positive.
ConvergenceReport contraction_diagnostics(const TransitionMatrix& p,
                                          std::span<const double> y,
                                          std::size_t steps);

/// ||wP - w||_inf for an arbitrary row vector w.
double fixed_point_residual(std::span<const double> w, const TransitionMatrix& p);

}  // namespace parrondo::markov
