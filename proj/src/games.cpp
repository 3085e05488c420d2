#include "parrondo/games.hpp"

#include <cmath>

#include <fmt/format.h>

namespace parrondo::games {

namespace {

void require_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha >= 0.1)
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("alpha out of range [0, 0.1): {}", alpha));
}

void require_gamma(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0)
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("gamma out of range [0, 1]: {}", gamma));
}

std::vector<double> constant_wins(int modulus, double win) {
  return std::vector<double>(static_cast<std::size_t>(modulus), win);
}

std::vector<double> game_b_wins(const GameParams& p) {
  auto wins = constant_wins(p.modulus(), p.coin_b2_win());
  wins[0] = p.coin_b1_win();
  return wins;
}

}  // namespace

GameParams::GameParams(double alpha, int modulus) : alpha_(alpha), modulus_(modulus) {
  require_alpha(alpha);
  if (modulus < 2)
    throw Error(ErrorCode::InvalidArgument, fmt::format("modulus must be >= 2: {}", modulus));
}

std::string game_name(const Game& game) {
  struct Visitor {
    std::string operator()(const GameA&) const { return "A"; }
    std::string operator()(const GameB&) const { return "B"; }
    std::string operator()(const Mixture& m) const { return fmt::format("mix:{}", m.gamma); }
    std::string operator()(const Optimal&) const { return "optimal"; }
  };
  return std::visit(Visitor{}, game);
}

markov::TransitionMatrix walk_matrix(const std::vector<double>& wins) {
  const std::size_t m = wins.size();
  markov::RawMatrix rows(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    rows[i][(i + 1) % m] += wins[i];
    rows[i][(i + m - 1) % m] += 1.0 - wins[i];
  }
  return markov::TransitionMatrix::from_rows(rows);
}

WinProbabilityVector win_vector(const GameParams& params, const Game& game) {
  struct Visitor {
    const GameParams& p;
    std::vector<double> operator()(const GameA&) const {
      return constant_wins(p.modulus(), p.coin_a_win());
    }
    std::vector<double> operator()(const GameB&) const { return game_b_wins(p); }
    std::vector<double> operator()(const Mixture& mix) const {
      require_gamma(mix.gamma);
      auto wins = game_b_wins(p);
      for (double& w : wins) w = mix.gamma * p.coin_a_win() + (1.0 - mix.gamma) * w;
      return wins;
    }
    std::vector<double> operator()(const Optimal&) const {
      auto wins = game_b_wins(p);
      wins[0] = p.coin_a_win();
      return wins;
    }
  };
  return {std::visit(Visitor{params}, game)};
}

markov::TransitionMatrix game_matrix(const GameParams& params, const Game& game) {
  if (const auto* mix = std::get_if<Mixture>(&game)) return mixture_matrix(params, mix->gamma);
  return walk_matrix(win_vector(params, game).per_state_win);
}

markov::TransitionMatrix game_a_matrix(const GameParams& params) {
  return game_matrix(params, GameA{});
}

markov::TransitionMatrix game_b_matrix(const GameParams& params) {
  return game_matrix(params, GameB{});
}

markov::TransitionMatrix optimal_policy_matrix(const GameParams& params) {
  return game_matrix(params, Optimal{});
}

markov::TransitionMatrix mixture_matrix(const GameParams& params, double gamma) {
  require_gamma(gamma);
  const auto a = game_a_matrix(params);
  const auto b = game_b_matrix(params);
  const std::size_t m = a.size();
  markov::RawMatrix rows(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) rows[i][j] = gamma * a(i, j) + (1.0 - gamma) * b(i, j);
  return markov::TransitionMatrix::from_rows(rows);
}

markov::ProbabilityVector closed_form_stationary_b(double alpha) {
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  const double d = 240.0 * a2 - 16.0 * alpha + 169.0;
  return markov::ProbabilityVector({5.0 * (16.0 * a2 - 8.0 * alpha + 13.0) / d,
                                    2.0 * (40.0 * a2 + 6.0 * alpha + 13.0) / d,
                                    2.0 * (40.0 * a2 + 6.0 * alpha + 39.0) / d});
}

markov::ProbabilityVector closed_form_stationary_mix(double alpha) {
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  const double d = 960.0 * a2 - 32.0 * alpha + 709.0;
  return markov::ProbabilityVector({(320.0 * a2 - 80.0 * alpha + 245.0) / d,
                                    (320.0 * a2 + 24.0 * alpha + 180.0) / d,
                                    (320.0 * a2 + 24.0 * alpha + 284.0) / d});
}

double closed_form_mixture_win_rate(double alpha) {
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  return (-1920.0 * a2 * alpha + 1056.0 * a2 - 1406.0 * alpha + 727.0) /
         (1920.0 * a2 - 64.0 * alpha + 1418.0);
}

}  // namespace parrondo::games
