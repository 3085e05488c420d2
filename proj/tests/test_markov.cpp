#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "parrondo/markov.hpp"

using namespace parrondo;
using namespace parrondo::markov;

namespace {

const RawMatrix kBookstore{{0.25, 0.5, 0.25}, {0.0, 0.5, 0.5}, {0.33, 0.33, 0.34}};
const RawMatrix kFlip{{0.0, 1.0}, {1.0, 0.0}};

void expect_rows_near(const TransitionMatrix& got, const RawMatrix& expected, double tol) {
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    for (std::size_t j = 0; j < expected.size(); ++j)
      EXPECT_NEAR(got(i, j), expected[i][j], tol) << "entry (" << i << ", " << j << ")";
}

void expect_vector_near(std::span<const double> got, const std::vector<double>& expected,
                        double tol) {
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(got[i], expected[i], tol) << i;
}

ErrorCode error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected parrondo::Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

// =============================================================================
// validate_stochastic
// =============================================================================

TEST(ValidateStochastic, AcceptsIdentityAndBookstore) {
  EXPECT_EQ(validate_stochastic({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), TransitionMatrix::identity(3));
  const auto book = validate_stochastic(kBookstore);
  EXPECT_EQ(book.size(), 3u);
  EXPECT_DOUBLE_EQ(book(2, 2), 0.34);
}

TEST(ValidateStochastic, RejectsRowSumWithLocation) {
  try {
    validate_stochastic({{0.5, 0.6}, {0.2, 0.8}});
    FAIL() << "accepted a row summing to 1.1";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RowSumError);
    EXPECT_EQ(e.row(), 0u);
    EXPECT_NEAR(e.value(), 1.1, 1e-15);
  }
}

TEST(ValidateStochastic, RejectsShapeAndSignErrors) {
  EXPECT_EQ(error_of([] { validate_stochastic({{0.5, 0.5}, {1.0}}); }), ErrorCode::NonSquare);
  EXPECT_EQ(error_of([] { validate_stochastic({}); }), ErrorCode::NonSquare);
  EXPECT_EQ(error_of([] { validate_stochastic({{1.2, -0.2}, {0.5, 0.5}}); }),
            ErrorCode::NegativeEntry);
  EXPECT_EQ(error_of([] { validate_stochastic({{NAN, 1.0}, {0.5, 0.5}}); }),
            ErrorCode::NonFiniteEntry);
}

TEST(ValidateStochastic, RenormalizesWithinTolerance) {
  const auto p = validate_stochastic({{0.5 + 4e-13, 0.5}, {0.25, 0.75}});
  EXPECT_NEAR(p(0, 0) + p(0, 1), 1.0, 1e-15);
  EXPECT_EQ(error_of([] { validate_stochastic({{0.5 + 4e-12, 0.5}, {0.25, 0.75}}); }),
            ErrorCode::RowSumError);
}

TEST(ProbabilityVectorTest, Validates) {
  EXPECT_NO_THROW(ProbabilityVector({0.2, 0.8}));
  EXPECT_EQ(error_of([] { ProbabilityVector({0.2, 0.7}); }), ErrorCode::InvalidProbabilityVector);
  EXPECT_EQ(error_of([] { ProbabilityVector({-0.1, 1.1}); }),
            ErrorCode::InvalidProbabilityVector);
  EXPECT_EQ(error_of([] { ProbabilityVector(std::vector<double>{}); }),
            ErrorCode::InvalidProbabilityVector);
}

// =============================================================================
// matrix_power / evolve
// =============================================================================

TEST(MatrixPower, BookstoreSquare) {
  expect_rows_near(matrix_power(validate_stochastic(kBookstore), 2),
                   {{0.145, 0.4575, 0.3975}, {0.165, 0.415, 0.42}, {0.1947, 0.4422, 0.3631}},
                   1e-12);
}

TEST(MatrixPower, ZeroAndOne) {
  const auto p = validate_stochastic(kBookstore);
  EXPECT_EQ(matrix_power(p, 0), TransitionMatrix::identity(3));
  EXPECT_EQ(matrix_power(p, 1), p);
}

TEST(MatrixPower, MatchesNaivePowers) {
  const auto p = validate_stochastic(kBookstore);
  for (unsigned k : {3u, 7u, 16u, 33u})
    expect_rows_near(matrix_power(p, k), oracle::naive_power(kBookstore, k), 1e-13);
}

TEST(Evolve, BookstoreOneDay) {
  const auto q = evolve(ProbabilityVector({0.0, 0.5, 0.5}), validate_stochastic(kBookstore), 1);
  expect_vector_near(q.values(), {0.165, 0.415, 0.420}, 1e-12);
}

TEST(Evolve, ZeroStepsAndTwoCycle) {
  const ProbabilityVector q({0.3, 0.3, 0.4});
  EXPECT_EQ(evolve(q, validate_stochastic(kBookstore), 0), q);
  const auto flipped = evolve(ProbabilityVector({1.0, 0.0}), validate_stochastic(kFlip), 3);
  expect_vector_near(flipped.values(), {0.0, 1.0}, 0.0);
}

TEST(Evolve, DimensionMismatch) {
  EXPECT_EQ(error_of([] { evolve(ProbabilityVector({1.0, 0.0}), validate_stochastic(kBookstore), 1); }),
            ErrorCode::DimensionMismatch);
}

TEST(Evolve, AgreesWithMatrixPowerOnRandomChains) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto raw = oracle::random_stochastic(n, 0.3, rng);
    const auto p = validate_stochastic(raw);
    std::vector<double> start(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sum = 0.0;
    for (auto& x : start) sum += (x = u(rng));
    for (auto& x : start) x /= sum;
    const ProbabilityVector q(start);
    const unsigned steps = trial % 21;
    const auto by_steps = evolve(q, p, steps);
    const auto power = matrix_power(p, steps);
    std::vector<double> by_power(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) by_power[j] += q[i] * power(i, j);
    expect_vector_near(by_steps.values(), by_power, 1e-10);
  }
}

// =============================================================================
// Classification
// =============================================================================

TEST(Classification, BookstoreAndTwoCycle) {
  const auto book = validate_stochastic(kBookstore);
  EXPECT_TRUE(is_irreducible(book));
  EXPECT_TRUE(is_regular(book));
  const auto flip = validate_stochastic(kFlip);
  EXPECT_TRUE(is_irreducible(flip));
  EXPECT_FALSE(is_regular(flip));
  const auto absorbing = validate_stochastic({{1.0, 0.0}, {0.5, 0.5}});
  EXPECT_FALSE(is_irreducible(absorbing));
  EXPECT_FALSE(is_regular(TransitionMatrix::identity(2)));
  EXPECT_TRUE(is_regular(TransitionMatrix::identity(1)));
}

TEST(Classification, WielandtExtremalChainNeedsTheFullBound) {
  // Wielandt's matrix: primitive with exponent exactly (n-1)^2 + 1.
  const std::size_t n = 5;
  RawMatrix raw(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) raw[i][i + 1] = 1.0;
  raw[n - 1][0] = 0.5;
  raw[n - 1][1] = 0.5;
  const auto p = validate_stochastic(raw);
  EXPECT_TRUE(is_regular(p));
  EXPECT_TRUE(is_irreducible(p));
}

TEST(Classification, RegularImpliesIrreducibleOnRandomSparseChains) {
  std::mt19937_64 rng(11);
  int regular = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 3 : 4;
    const auto raw = oracle::random_stochastic(n, 0.55, rng);
    const auto p = validate_stochastic(raw);
    const bool reg = is_regular(p);
    EXPECT_EQ(is_irreducible(p), oracle::strongly_connected(raw)) << "trial " << trial;
    EXPECT_EQ(reg, oracle::some_power_positive(raw)) << "trial " << trial;
    if (reg) {
      ++regular;
      EXPECT_TRUE(is_irreducible(p)) << "trial " << trial;
    }
  }
  // Both classes must be exercised.
  EXPECT_GT(regular, 50);
  EXPECT_LT(regular, 950);
}

// =============================================================================
// stationary
// =============================================================================

TEST(Stationary, TwoCycleUsesDirectSolve) {
  const auto [w, report] = stationary(validate_stochastic(kFlip));
  expect_vector_near(w.values(), {0.5, 0.5}, 1e-15);
  EXPECT_EQ(report.method, StationaryMethod::DirectSolve);
}

TEST(Stationary, GameBAtZeroBias) {
  // P_B(0): closed form (5/13, 2/13, 6/13).
  const auto p = validate_stochastic({{0, 0.1, 0.9}, {0.25, 0, 0.75}, {0.75, 0.25, 0}});
  const auto [w, report] = stationary(p);
  expect_vector_near(w.values(), {5.0 / 13, 2.0 / 13, 6.0 / 13}, 1e-12);
  EXPECT_LE(report.residual, 1e-10);
}

TEST(Stationary, RejectsReducibleChains) {
  EXPECT_EQ(error_of([] { stationary(validate_stochastic({{1.0, 0.0}, {0.5, 0.5}})); }),
            ErrorCode::NotIrreducible);
  EXPECT_EQ(error_of([] { stationary(TransitionMatrix::identity(3)); }), ErrorCode::NotIrreducible);
}

TEST(Stationary, FixedPointAndPositivityOnRandomChains) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto raw = oracle::random_stochastic(n, 0.4, rng);
    const auto p = validate_stochastic(raw);
    if (!is_irreducible(p)) continue;
    ++checked;
    const auto [w, report] = stationary(p);
    EXPECT_LE(fixed_point_residual(w.values(), p), 1e-10);
    expect_vector_near(w.values(), oracle::lazy_chain_stationary(raw), 1e-9);
    if (is_regular(p))
      for (double x : w.values()) EXPECT_GT(x, 0.0);
  }
  EXPECT_GT(checked, 100);
}

TEST(Stationary, LimitOfEvolutionForRegularChains) {
  const auto p = validate_stochastic(kBookstore);
  const auto w = stationary(p).distribution;
  for (const auto& start : {ProbabilityVector::point_mass(3, 0), ProbabilityVector::point_mass(3, 2),
                            ProbabilityVector({0.2, 0.3, 0.5})}) {
    expect_vector_near(evolve(start, p, 1000).values(),
                       std::vector<double>(w.values().begin(), w.values().end()), 1e-8);
  }
}

TEST(Stationary, PowerIterationFallbackAgrees) {
  const auto p = validate_stochastic(kBookstore);
  const auto direct = stationary(p);
  const auto power = stationary_by_power_iteration(p);
  EXPECT_EQ(power.report.method, StationaryMethod::PowerIteration);
  EXPECT_LE(power.report.final_gap, 1e-12);
  EXPECT_GT(power.report.iterations, 1u);
  EXPECT_LE(power.report.residual, 1e-10);
  expect_vector_near(power.distribution.values(),
                     std::vector<double>(direct.distribution.values().begin(),
                                         direct.distribution.values().end()),
                     1e-11);
  // Column spreads of P^k never grow.
  for (std::size_t k = 1; k < power.report.gaps.size(); ++k)
    EXPECT_LE(power.report.gaps[k], power.report.gaps[k - 1] + 1e-16);
}

TEST(Stationary, PowerIterationRefusesPeriodicChains) {
  EXPECT_EQ(error_of([] { stationary_by_power_iteration(validate_stochastic(kFlip)); }),
            ErrorCode::SingularSystem);
  EXPECT_EQ(error_of([] {
              stationary_by_power_iteration(validate_stochastic(kBookstore), 3, 1e-12);
            }),
            ErrorCode::SingularSystem);
}

// =============================================================================
// contraction_diagnostics
// =============================================================================

TEST(Contraction, ConstantVectorHasNoGap) {
  const auto p = matrix_power(validate_stochastic(kBookstore), 2);
  const std::vector<double> y{2.0, 2.0, 2.0};
  const auto report = contraction_diagnostics(p, y, 4);
  for (double gap : report.gaps) EXPECT_EQ(gap, 0.0);
}

TEST(Contraction, BookstoreSquareEnvelope) {
  const auto p = matrix_power(validate_stochastic(kBookstore), 2);
  const std::vector<double> y{1.0, 0.0, 0.0};
  const auto report = contraction_diagnostics(p, y, 5);
  ASSERT_TRUE(report.contraction_factor_bound.has_value());
  EXPECT_NEAR(*report.contraction_factor_bound, 0.71, 1e-12);
  ASSERT_EQ(report.gaps.size(), 6u);
  EXPECT_TRUE(report.within_envelope);
  for (std::size_t k = 0; k < report.gaps.size(); ++k)
    EXPECT_LE(report.gaps[k], std::pow(0.71, k) + 1e-15);
  // Direct iteration of y <- P^2 y.
  EXPECT_NEAR(report.gaps[1], 0.0497, 1e-12);
  EXPECT_NEAR(report.gaps[2], 0.00228393, 1e-12);
}

TEST(Contraction, RankOneMatrixCollapsesInOneStep) {
  const auto p = validate_stochastic({{0.5, 0.5}, {0.5, 0.5}});
  const std::vector<double> y{3.0, -1.0};
  const auto report = contraction_diagnostics(p, y, 3);
  EXPECT_EQ(report.gaps[0], 4.0);
  EXPECT_EQ(report.gaps[1], 0.0);
}

TEST(Contraction, RequiresPositiveEntries) {
  const std::vector<double> y{1.0, 0.0, 0.0};
  EXPECT_EQ(error_of([&] { contraction_diagnostics(validate_stochastic(kBookstore), y, 3); }),
            ErrorCode::ZeroEntry);
}

TEST(Contraction, EnvelopeOnRandomPositiveMatrices) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = validate_stochastic(oracle::random_stochastic(3, 0.0, rng));
    std::vector<double> y(3);
    for (auto& x : y) x = normal(rng);
    const auto report = contraction_diagnostics(p, y, 30);
    EXPECT_TRUE(report.within_envelope) << "trial " << trial;
    for (std::size_t k = 1; k < report.gaps.size(); ++k)
      EXPECT_LE(report.gaps[k], report.gaps[k - 1] + 1e-15);
  }
}
