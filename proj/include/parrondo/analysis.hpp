#pragma once

// Long-run win rates from stationary distributions, periodic patterns
// through lifted chains, and the fairness threshold in alpha.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "parrondo/games.hpp"
#include "parrondo/markov.hpp"

namespace parrondo::analysis {

/// Nonempty periodic sequence over {A, B}, played cyclically from index 0.
class PatternPolicy {
 public:
  /// Throws InvalidArgument ("invalid pattern character 'X'") on bad input.
  explicit PatternPolicy(std::string_view sequence);

  const std::string& sequence() const noexcept { return sequence_; }
  std::size_t period() const noexcept { return sequence_.size(); }
  games::Game game_at(std::size_t play_index) const;

  friend bool operator==(const PatternPolicy&, const PatternPolicy&) = default;

 private:
  std::string sequence_;
};

struct WinRateResult {
  double win_probability = 0.0;
  // 2 * win_probability - 1
  double expected_profit_per_play = 0.0;
  markov::ProbabilityVector stationary_used;
};

WinRateResult long_run_win_rate(const markov::TransitionMatrix& p,
                                const games::WinProbabilityVector& wins);

WinRateResult game_win_rate(const games::GameParams& params, const games::Game& game);

/// Chain on (residue, pattern index), state index = t * M + residue.
struct LiftedChain {
  markov::TransitionMatrix matrix;
  std::vector<double> wins;
};

LiftedChain lift_pattern(const PatternPolicy& pattern, const games::GameParams& params);
LiftedChain lift_pattern(const PatternPolicy& pattern, const markov::TransitionMatrix& game_a,
                         const markov::TransitionMatrix& game_b,
                         const games::WinProbabilityVector& wins_a,
                         const games::WinProbabilityVector& wins_b);

/// stationary_used is over the lifted states.
WinRateResult pattern_win_rate(const PatternPolicy& pattern, const games::GameParams& params);

/// Sums a lifted distribution over pattern positions.
markov::ProbabilityVector marginalize_residues(const markov::ProbabilityVector& lifted,
                                               int modulus);

struct ThresholdResult {
  double alpha = 0.0;
  double lower = 0.0;  // final bracket, f(lower) > 0 > f(upper)
  double upper = 0.0;
  double residual = 0.0;  // win_rate(alpha) - 0.5
  int iterations = 0;
};

/// Largest bias of the gamma-mixture that is still fair: bisection of
/// win_rate(alpha) - 0.5 on [0, 0.1) after a 50-point monotonicity scan.
/// Throws NotMonotone or NoSignChange.
ThresholdResult critical_alpha(double gamma, int modulus, double tol = 1e-7);

/// The bisection behind critical_alpha, for any win rate as a function of
/// alpha on [0, 0.1).
ThresholdResult fairness_threshold(const std::function<double(double)>& win_rate,
                                   double tol = 1e-7);

struct SweepRow {
  double alpha = 0.0;
  double win_probability = 0.0;
  double profit_per_play = 0.0;
};

/// One row per grid point, in grid order, for the gamma-mixture.
std::vector<SweepRow> alpha_sweep(double gamma, int modulus, const std::vector<double>& grid);

/// Same for an arbitrary game.
std::vector<SweepRow> alpha_sweep(const games::Game& game, int modulus,
                                  const std::vector<double>& grid);

}  // namespace parrondo::analysis
