#pragma once

// Games A and B of the capital-dependent coin-tossing paradox, written as
// Markov chains on the capital residue mod M.
//
// Residue i moves to (i + 1) mod M on a win and (i - 1) mod M on a loss.
// Game A tosses one coin with win probability 0.5 - alpha. Game B tosses
// coin 1 (0.1 - alpha) at residue 0 and coin 2 (0.75 - alpha) elsewhere.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "parrondo/markov.hpp"

namespace parrondo::games {

class GameParams {
 public:
  /// Requires 0 <= alpha < 0.1 and modulus >= 2.
  GameParams(double alpha, int modulus);

  double alpha() const noexcept { return alpha_; }
  int modulus() const noexcept { return modulus_; }
  double coin_a_win() const noexcept { return 0.5 - alpha_; }
  double coin_b1_win() const noexcept { return 0.1 - alpha_; }
  double coin_b2_win() const noexcept { return 0.75 - alpha_; }

 private:
  double alpha_;
  int modulus_;
};

/// Mathematical residue in 0..M-1, valid for negative capital.
constexpr int residue(std::int64_t capital, int modulus) noexcept {
  const auto r = static_cast<int>(capital % modulus);
  return r < 0 ? r + modulus : r;
}

struct GameA {};
struct GameB {};
struct Mixture {
  double gamma;  // probability of choosing game A on each play
};
// Game A at residue 0, game B elsewhere.
struct Optimal {};

using Game = std::variant<GameA, GameB, Mixture, Optimal>;

std::string game_name(const Game& game);

/// Entry i is the one-play win probability when capital = i (mod M).
struct WinProbabilityVector {
  std::vector<double> per_state_win;
};

markov::TransitionMatrix game_a_matrix(const GameParams& params);
markov::TransitionMatrix game_b_matrix(const GameParams& params);
/// gamma * P_A + (1 - gamma) * P_B.
markov::TransitionMatrix mixture_matrix(const GameParams& params, double gamma);
markov::TransitionMatrix optimal_policy_matrix(const GameParams& params);
markov::TransitionMatrix game_matrix(const GameParams& params, const Game& game);

WinProbabilityVector win_vector(const GameParams& params, const Game& game);

/// Builds the matrix of a walk whose win probability at residue i is
/// wins[i]. Coinciding destinations (M = 2) have their masses summed.
markov::TransitionMatrix walk_matrix(const std::vector<double>& wins);

// Closed-form stationary vectors for M = 3, 0 <= alpha < 0.1.
markov::ProbabilityVector closed_form_stationary_b(double alpha);
/// Mixture with gamma = 1/2.
markov::ProbabilityVector closed_form_stationary_mix(double alpha);
/// Long-run win probability of the gamma = 1/2 mixture as a rational
/// function of alpha.
double closed_form_mixture_win_rate(double alpha);

}  // namespace parrondo::games
