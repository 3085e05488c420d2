#include "parrondo/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

namespace parrondo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::InvalidProbabilityVector: return "InvalidProbabilityVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NotMonotone: return "NotMonotone";
  }
  return "Unknown";
}

}  // namespace parrondo

namespace parrondo::markov {

namespace {

// Residual allowed on a direct solve before it is treated as degenerate.
constexpr double kResidualTolerance = 1e-10;
constexpr double kPivotTolerance = 1e-13;

using BoolPattern = std::vector<char>;

BoolPattern positivity_pattern(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  BoolPattern pattern(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pattern[i * n + j] = p(i, j) > 0.0;
  return pattern;
}

BoolPattern boolean_product(const BoolPattern& a, const BoolPattern& b, std::size_t n) {
  BoolPattern out(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (!a[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (b[k * n + j]) out[i * n + j] = 1;
    }
  return out;
}

// Vertices reachable from `start` following edges of `pattern`, transposed
// when `reverse` is set.
std::vector<char> reachable(const BoolPattern& pattern, std::size_t n,
                            std::size_t start, bool reverse) {
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      const bool edge = reverse ? pattern[v * n + u] : pattern[u * n + v];
      if (edge && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

double column_spread(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  double gap = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double lo = p(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, p(i, j));
      hi = std::max(hi, p(i, j));
    }
    gap = std::max(gap, hi - lo);
  }
  return gap;
}

std::vector<double> clamp_and_normalize(std::vector<double> w) {
  for (double& x : w)
    if (x < 0.0 && x > -kSumTolerance) x = 0.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total > 0.0)
    for (double& x : w) x /= total;
  return w;
}

// Gaussian elimination with partial pivoting on a dense n x n system.
// Returns nullopt when a pivot falls below kPivotTolerance.
std::optional<std::vector<double>> solve_dense(std::vector<double> a,
                                               std::vector<double> b,
                                               std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < kPivotTolerance) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t c = i + 1; c < n; ++c) sum -= a[i * n + c] * x[c];
    x[i] = sum / a[i * n + i];
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// TransitionMatrix

TransitionMatrix TransitionMatrix::from_rows(const RawMatrix& raw) {
  const std::size_t n = raw.size();
  if (n == 0) throw Error(ErrorCode::NonSquare, "transition matrix must have at least one state");
  std::vector<double> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i].size() != n)
      throw Error(ErrorCode::NonSquare,
                  fmt::format("row {} has {} entries, expected {}", i, raw[i].size(), n));
    flat.insert(flat.end(), raw[i].begin(), raw[i].end());
  }
  return from_flat(n, std::move(flat));
}

TransitionMatrix TransitionMatrix::from_flat(std::size_t n, std::vector<double> data) {
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = data[i * n + j];
      if (!std::isfinite(x))
        throw Error(ErrorCode::NonFiniteEntry,
                    fmt::format("entry ({}, {}) is not finite", i, j), i, j, x);
      if (x < 0.0)
        throw Error(ErrorCode::NegativeEntry,
                    fmt::format("entry ({}, {}) = {} is negative", i, j, x), i, j, x);
      sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw Error(ErrorCode::RowSumError,
                  fmt::format("row {} sums to {:.17g}, expected 1", i, sum), i, 0, sum);
    if (sum != 1.0)
      for (std::size_t j = 0; j < n; ++j) data[i * n + j] /= sum;
  }
  return TransitionMatrix(n, std::move(data));
}

TransitionMatrix TransitionMatrix::identity(std::size_t n) {
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
  return TransitionMatrix(n, std::move(data));
}

double TransitionMatrix::min_entry() const {
  return *std::min_element(data_.begin(), data_.end());
}

RawMatrix TransitionMatrix::to_rows() const {
  RawMatrix rows(n_);
  for (std::size_t i = 0; i < n_; ++i) rows[i].assign(row(i).begin(), row(i).end());
  return rows;
}

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty())
    throw Error(ErrorCode::InvalidProbabilityVector, "probability vector must be nonempty");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double x = probs_[i];
    if (!std::isfinite(x) || x < 0.0 || x > 1.0 + kSumTolerance)
      throw Error(ErrorCode::InvalidProbabilityVector,
                  fmt::format("component {} = {} is not a probability", i, x), i, 0, x);
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw Error(ErrorCode::InvalidProbabilityVector,
                fmt::format("components sum to {:.17g}, expected 1", sum), 0, 0, sum);
  if (sum != 1.0)
    for (double& x : probs_) x /= sum;
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t n, std::size_t state) {
  if (state >= n) throw Error(ErrorCode::InvalidArgument, "point mass state out of range");
  std::vector<double> v(n, 0.0);
  v[state] = 1.0;
  return ProbabilityVector(std::move(v));
}

// ---------------------------------------------------------------------------
// Operations

TransitionMatrix validate_stochastic(const RawMatrix& raw) {
  return TransitionMatrix::from_rows(raw);
}

TransitionMatrix multiply(const TransitionMatrix& lhs, const TransitionMatrix& rhs) {
  const std::size_t n = lhs.size();
  if (rhs.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("cannot multiply {0}x{0} by {1}x{1}", n, rhs.size()));
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a * rhs(k, j);
    }
  return TransitionMatrix::from_flat(n, std::move(out));
}

TransitionMatrix matrix_power(const TransitionMatrix& p, unsigned long long n) {
  TransitionMatrix result = TransitionMatrix::identity(p.size());
  TransitionMatrix base = p;
  bool first = true;
  while (n > 0) {
    if (n & 1ULL) {
      result = first ? base : multiply(result, base);
      first = false;
    }
    n >>= 1;
    if (n > 0) base = multiply(base, base);
  }
  return result;
}

ProbabilityVector evolve(const ProbabilityVector& q, const TransitionMatrix& p,
                         unsigned long long n) {
  const std::size_t size = p.size();
  if (q.size() != size)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("vector of length {} against {}-state matrix", q.size(), size));
  std::vector<double> current(q.values().begin(), q.values().end());
  std::vector<double> next(size);
  for (unsigned long long step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      const double qi = current[i];
      if (qi == 0.0) continue;
      for (std::size_t j = 0; j < size; ++j) next[j] += qi * p(i, j);
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& x : next) x /= total;
    current.swap(next);
  }
  return ProbabilityVector(std::move(current));
}

bool is_irreducible(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  const BoolPattern pattern = positivity_pattern(p);
  const auto forward = reachable(pattern, n, 0, false);
  const auto backward = reachable(pattern, n, 0, true);
  return std::all_of(forward.begin(), forward.end(), [](char c) { return c != 0; }) &&
         std::all_of(backward.begin(), backward.end(), [](char c) { return c != 0; });
}

bool is_regular(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  const BoolPattern base = positivity_pattern(p);
  const std::size_t bound = (n - 1) * (n - 1) + 1;
  BoolPattern power = base;
  for (std::size_t k = 1; k <= bound; ++k) {
    if (std::all_of(power.begin(), power.end(), [](char c) { return c != 0; })) return true;
    if (k < bound) power = boolean_product(power, base, n);
  }
  return false;
}

double fixed_point_residual(std::span<const double> w, const TransitionMatrix& p) {
  const std::size_t n = p.size();
  if (w.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "residual: vector length does not match matrix");
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += w[i] * p(i, j);
    worst = std::max(worst, std::abs(sum - w[j]));
  }
  return worst;
}

StationaryResult stationary_by_power_iteration(const TransitionMatrix& p,
                                               std::size_t max_iterations,
                                               double gap_tolerance) {
  if (!is_irreducible(p))
    throw Error(ErrorCode::NotIrreducible, "stationary: chain is not irreducible");
  if (!is_regular(p))
    throw Error(ErrorCode::SingularSystem,
                "power iteration does not converge for a periodic chain");
  const std::size_t n = p.size();
  ConvergenceReport report;
  report.method = StationaryMethod::PowerIteration;
  if (const double d = p.min_entry(); d > 0.0) report.contraction_factor_bound = 1.0 - 2.0 * d;

  TransitionMatrix power = p;
  double gap = column_spread(power);
  report.gaps.push_back(gap);
  std::size_t iterations = 1;
  while (gap > gap_tolerance && iterations < max_iterations) {
    power = multiply(power, p);
    gap = column_spread(power);
    report.gaps.push_back(gap);
    ++iterations;
  }
  if (gap > gap_tolerance)
    throw Error(ErrorCode::SingularSystem,
                fmt::format("power iteration did not converge in {} iterations (gap {:.3g})",
                            max_iterations, gap));

  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[j] += power(i, j) / static_cast<double>(n);
  w = clamp_and_normalize(std::move(w));
  report.iterations = iterations;
  report.final_gap = gap;
  report.residual = fixed_point_residual(w, p);
  return {ProbabilityVector(std::move(w)), std::move(report)};
}

StationaryResult stationary(const TransitionMatrix& p) {
  if (!is_irreducible(p))
    throw Error(ErrorCode::NotIrreducible, "stationary: chain is not irreducible");
  const std::size_t n = p.size();

  // Rows of the system are the columns of P - I; the last one is replaced by
  // the normalization constraint.
  std::vector<double> a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      a[r * n + c] = p(c, r) - (r == c ? 1.0 : 0.0);
  for (std::size_t c = 0; c < n; ++c) a[(n - 1) * n + c] = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;

  if (auto solution = solve_dense(std::move(a), std::move(b), n)) {
    auto w = clamp_and_normalize(std::move(*solution));
    const bool nonnegative = std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0; });
    const double residual = nonnegative ? fixed_point_residual(w, p) : 1.0;
    if (nonnegative && residual <= kResidualTolerance) {
      ConvergenceReport report;
      report.method = StationaryMethod::DirectSolve;
      report.residual = residual;
      return {ProbabilityVector(std::move(w)), std::move(report)};
    }
  }
  if (!is_regular(p))
    throw Error(ErrorCode::SingularSystem,
                "stationary: linear system is degenerate and the chain is periodic");
  return stationary_by_power_iteration(p);
}

ConvergenceReport contraction_diagnostics(const TransitionMatrix& p,
                                          std::span<const double> y,
                                          std::size_t steps) {
  const std::size_t n = p.size();
  if (y.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("vector of length {} against {}-state matrix", y.size(), n));
  if (steps == 0) throw Error(ErrorCode::InvalidArgument, "steps must be positive");
  const double d = p.min_entry();
  if (d <= 0.0)
    throw Error(ErrorCode::ZeroEntry, "contraction bound requires every entry to be positive");

  const auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };

  ConvergenceReport report;
  report.contraction_factor_bound = 1.0 - 2.0 * d;
  std::vector<double> current(y.begin(), y.end());
  std::vector<double> next(n);
  const double initial = spread(current);
  report.gaps.push_back(initial);
  double envelope = initial;
  for (std::size_t k = 1; k <= steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += p(i, j) * current[j];
      next[i] = sum;
    }
    current.swap(next);
    const double gap = spread(current);
    envelope *= *report.contraction_factor_bound;
    // Rounding slack scaled by the data.
    if (gap > envelope + 1e-14 * (1.0 + initial)) report.within_envelope = false;
    report.gaps.push_back(gap);
  }
  report.iterations = steps;
  report.final_gap = report.gaps.back();
  return report;
}

}  // namespace parrondo::markov
