#include "parrondo/analysis.hpp"

#include <cmath>

#include <fmt/format.h>

namespace parrondo::analysis {

namespace {

constexpr int kMonotoneGridPoints = 50;
// |win_rate - 0.5| below this counts as fair, not as a sign.
constexpr double kFairnessTolerance = 1e-12;

double alpha_upper_limit() { return std::nextafter(0.1, 0.0); }

}  // namespace

PatternPolicy::PatternPolicy(std::string_view sequence) : sequence_(sequence) {
  if (sequence_.empty()) throw Error(ErrorCode::InvalidArgument, "pattern must be nonempty");
  for (char c : sequence_)
    if (c != 'A' && c != 'B')
      throw Error(ErrorCode::InvalidArgument, fmt::format("invalid pattern character '{}'", c));
}

games::Game PatternPolicy::game_at(std::size_t play_index) const {
  if (sequence_[play_index % sequence_.size()] == 'A') return games::GameA{};
  return games::GameB{};
}

WinRateResult long_run_win_rate(const markov::TransitionMatrix& p,
                                const games::WinProbabilityVector& wins) {
  if (wins.per_state_win.size() != p.size())
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{} win probabilities for a {}-state chain",
                            wins.per_state_win.size(), p.size()));
  auto [w, report] = markov::stationary(p);
  double rate = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) rate += w[i] * wins.per_state_win[i];
  return {rate, 2.0 * rate - 1.0, std::move(w)};
}

WinRateResult game_win_rate(const games::GameParams& params, const games::Game& game) {
  return long_run_win_rate(games::game_matrix(params, game), games::win_vector(params, game));
}

LiftedChain lift_pattern(const PatternPolicy& pattern, const markov::TransitionMatrix& game_a,
                         const markov::TransitionMatrix& game_b,
                         const games::WinProbabilityVector& wins_a,
                         const games::WinProbabilityVector& wins_b) {
  const std::size_t m = game_a.size();
  if (game_b.size() != m || wins_a.per_state_win.size() != m || wins_b.per_state_win.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "lift_pattern: games disagree on the modulus");
  const std::size_t k = pattern.period();
  const std::size_t n = m * k;

  markov::RawMatrix rows(n, std::vector<double>(n, 0.0));
  std::vector<double> wins(n);
  for (std::size_t t = 0; t < k; ++t) {
    const bool play_a = pattern.sequence()[t] == 'A';
    const auto& game = play_a ? game_a : game_b;
    const auto& game_wins = play_a ? wins_a.per_state_win : wins_b.per_state_win;
    const std::size_t next_t = (t + 1) % k;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t from = t * m + i;
      wins[from] = game_wins[i];
      for (std::size_t j = 0; j < m; ++j) rows[from][next_t * m + j] += game(i, j);
    }
  }
  return {markov::TransitionMatrix::from_rows(rows), std::move(wins)};
}

LiftedChain lift_pattern(const PatternPolicy& pattern, const games::GameParams& params) {
  return lift_pattern(pattern, games::game_a_matrix(params), games::game_b_matrix(params),
                      games::win_vector(params, games::GameA{}),
                      games::win_vector(params, games::GameB{}));
}

WinRateResult pattern_win_rate(const PatternPolicy& pattern, const games::GameParams& params) {
  auto lifted = lift_pattern(pattern, params);
  return long_run_win_rate(lifted.matrix, {std::move(lifted.wins)});
}

markov::ProbabilityVector marginalize_residues(const markov::ProbabilityVector& lifted,
                                               int modulus) {
  const auto m = static_cast<std::size_t>(modulus);
  if (m == 0 || lifted.size() % m != 0)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{} lifted states do not split into residues mod {}",
                            lifted.size(), modulus));
  std::vector<double> out(m, 0.0);
  for (std::size_t s = 0; s < lifted.size(); ++s) out[s % m] += lifted[s];
  return markov::ProbabilityVector(std::move(out));
}

ThresholdResult fairness_threshold(const std::function<double(double)>& win_rate, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const auto excess = [&](double alpha) { return win_rate(alpha) - 0.5; };

  double lo = 0.0;
  double hi = alpha_upper_limit();

  double previous = excess(lo);
  const double f_lo = previous;
  for (int i = 1; i < kMonotoneGridPoints; ++i) {
    const double alpha = lo + (hi - lo) * i / (kMonotoneGridPoints - 1);
    const double current = excess(alpha);
    if (!(current < previous))
      throw Error(ErrorCode::NotMonotone,
                  fmt::format("win rate is not strictly decreasing near alpha={:.6g}", alpha));
    previous = current;
  }
  const double f_hi = previous;
  if (!(f_lo > kFairnessTolerance && f_hi < -kFairnessTolerance))
    throw Error(ErrorCode::NoSignChange,
                fmt::format("win rate does not cross 0.5 on [0, 0.1): win rate - 0.5 is "
                            "{:.3g} at 0 and {:.3g} near 0.1",
                            f_lo, f_hi));

  int iterations = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    ++iterations;
  }
  const double root = 0.5 * (lo + hi);
  return {root, lo, hi, excess(root), iterations};
}

ThresholdResult critical_alpha(double gamma, int modulus, double tol) {
  const games::Mixture mix{gamma};
  // Validate up front so bad input is not reported as a missing root.
  games::GameParams(0.0, modulus);
  games::win_vector(games::GameParams(0.0, modulus), mix);
  try {
    return fairness_threshold(
        [&](double alpha) {
          return game_win_rate(games::GameParams(alpha, modulus), mix).win_probability;
        },
        tol);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("mixture gamma={}, M={}: {}", gamma, modulus, e.what()));
  }
}

std::vector<SweepRow> alpha_sweep(const games::Game& game, int modulus,
                                  const std::vector<double>& grid) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const double alpha : grid) {
    try {
      const auto result = game_win_rate(games::GameParams(alpha, modulus), game);
      rows.push_back({alpha, result.win_probability, result.expected_profit_per_play});
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("alpha={}: {}", alpha, e.what()));
    }
  }
  return rows;
}

std::vector<SweepRow> alpha_sweep(double gamma, int modulus, const std::vector<double>& grid) {
  return alpha_sweep(games::Mixture{gamma}, modulus, grid);
}

}  // namespace parrondo::analysis
