#include "parrondo/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include <fmt/format.h>

namespace parrondo::sim {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

void require_gamma(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0)
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("gamma out of range [0, 1]: {}", gamma));
}

// Plays `n_plays` rounds; `coin_for(play, capital, rng)` returns the win
// probability of the coin tossed on that play, consuming any policy draws.
template <typename CoinFor>
SimResult play(std::uint64_t n_plays, std::uint64_t seed, bool record, CoinFor coin_for) {
  Xoshiro256StarStar rng(seed);
  SimResult result;
  result.n_plays = n_plays;
  result.seed = seed;
  std::vector<std::int64_t> trajectory;
  if (record) trajectory.reserve(n_plays);
  std::int64_t capital = 0;
  std::uint64_t wins = 0;
  for (std::uint64_t t = 0; t < n_plays; ++t) {
    const double p = coin_for(t, capital, rng);
    if (rng.bernoulli(p)) {
      ++capital;
      ++wins;
    } else {
      --capital;
    }
    if (record) trajectory.push_back(capital);
  }
  result.final_profit = capital;
  result.wins = wins;
  result.empirical_win_rate = static_cast<double>(wins) / static_cast<double>(n_plays);
  if (record) result.profit_trajectory = std::move(trajectory);
  return result;
}

}  // namespace

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += 0x9E3779B97F4A7C15ULL;
    word = mix64(x);
  }
}

Xoshiro256StarStar::result_type Xoshiro256StarStar::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

Policy parse_policy(std::string_view spec) {
  if (spec == "A") return PureA{};
  if (spec == "B") return PureB{};
  if (spec == "optimal") return CapitalAware{};
  if (spec.starts_with("pattern:")) return analysis::PatternPolicy(spec.substr(8));
  if (spec.starts_with("mix:")) {
    const auto text = spec.substr(4);
    double gamma = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), gamma);
    if (ec != std::errc{} || end != text.data() + text.size())
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("invalid mixture weight '{}'", text));
    require_gamma(gamma);
    return RandomMix{gamma};
  }
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("unknown policy '{}' (expected A, B, pattern:<AB...>, mix:<gamma> "
                          "or optimal)",
                          spec));
}

std::string policy_name(const Policy& policy) {
  struct Visitor {
    std::string operator()(const PureA&) const { return "A"; }
    std::string operator()(const PureB&) const { return "B"; }
    std::string operator()(const analysis::PatternPolicy& p) const {
      return "pattern:" + p.sequence();
    }
    std::string operator()(const RandomMix& m) const { return fmt::format("mix:{}", m.gamma); }
    std::string operator()(const CapitalAware&) const { return "optimal"; }
  };
  return std::visit(Visitor{}, policy);
}

SimResult simulate(const Policy& policy, const games::GameParams& params,
                   std::uint64_t n_plays, std::uint64_t seed, bool record_trajectory) {
  if (n_plays == 0) throw Error(ErrorCode::InvalidArgument, "n_plays must be positive");
  const int m = params.modulus();
  const double a = params.coin_a_win();
  const double b1 = params.coin_b1_win();
  const double b2 = params.coin_b2_win();
  const auto game_b = [=](std::int64_t capital) {
    return games::residue(capital, m) == 0 ? b1 : b2;
  };

  struct Visitor {
    std::uint64_t n;
    std::uint64_t seed;
    bool record;
    int m;
    double a;
    decltype(game_b) coin_b;

    SimResult operator()(const PureA&) const {
      return play(n, seed, record, [&](std::uint64_t, std::int64_t, auto&) { return a; });
    }
    SimResult operator()(const PureB&) const {
      return play(n, seed, record,
                  [&](std::uint64_t, std::int64_t c, auto&) { return coin_b(c); });
    }
    SimResult operator()(const analysis::PatternPolicy& pattern) const {
      const std::string& seq = pattern.sequence();
      const std::size_t k = seq.size();
      return play(n, seed, record, [&](std::uint64_t t, std::int64_t c, auto&) {
        return seq[t % k] == 'A' ? a : coin_b(c);
      });
    }
    SimResult operator()(const RandomMix& mix) const {
      require_gamma(mix.gamma);
      return play(n, seed, record, [&](std::uint64_t, std::int64_t c, auto& rng) {
        return rng.bernoulli(mix.gamma) ? a : coin_b(c);
      });
    }
    SimResult operator()(const CapitalAware&) const {
      return play(n, seed, record, [&](std::uint64_t, std::int64_t c, auto&) {
        return games::residue(c, m) == 0 ? a : coin_b(c);
      });
    }
  };
  return std::visit(Visitor{n_plays, seed, record_trajectory, m, a, game_b}, policy);
}

BatchSummary batch(const Policy& policy, const games::GameParams& params,
                   std::uint64_t n_plays, std::uint64_t n_runs, std::uint64_t seed,
                   bool record_trajectory, unsigned threads) {
  if (n_runs == 0) throw Error(ErrorCode::InvalidArgument, "n_runs must be positive");
  if (n_plays == 0) throw Error(ErrorCode::InvalidArgument, "n_plays must be positive");

  BatchSummary summary;
  summary.runs.resize(n_runs);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_runs));

  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t r = w; r < n_runs; r += workers)
            summary.runs[r] = simulate(policy, params, n_plays, run_seed(seed, r),
                                       record_trajectory);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  const auto runs = static_cast<double>(n_runs);
  double sum = 0.0;
  for (const auto& run : summary.runs) {
    sum += static_cast<double>(run.final_profit) / static_cast<double>(n_plays);
    summary.total_wins += run.wins;
  }
  summary.total_plays = n_plays * n_runs;
  summary.mean_profit_per_play = sum / runs;
  if (n_runs > 1) {
    double squares = 0.0;
    for (const auto& run : summary.runs) {
      const double x = static_cast<double>(run.final_profit) / static_cast<double>(n_plays);
      squares += (x - summary.mean_profit_per_play) * (x - summary.mean_profit_per_play);
    }
    summary.stddev_profit_per_play = std::sqrt(squares / (runs - 1.0));
  }
  return summary;
}

analysis::WinRateResult analytic_rate(const Policy& policy, const games::GameParams& params) {
  struct Visitor {
    const games::GameParams& p;
    analysis::WinRateResult operator()(const PureA&) const {
      return analysis::game_win_rate(p, games::GameA{});
    }
    analysis::WinRateResult operator()(const PureB&) const {
      return analysis::game_win_rate(p, games::GameB{});
    }
    analysis::WinRateResult operator()(const analysis::PatternPolicy& pattern) const {
      return analysis::pattern_win_rate(pattern, p);
    }
    analysis::WinRateResult operator()(const RandomMix& mix) const {
      return analysis::game_win_rate(p, games::Mixture{mix.gamma});
    }
    analysis::WinRateResult operator()(const CapitalAware&) const {
      return analysis::game_win_rate(p, games::Optimal{});
    }
  };
  return std::visit(Visitor{params}, policy);
}

Comparison empirical_vs_analytic(const Policy& policy, const games::GameParams& params,
                                 std::uint64_t n_plays, std::uint64_t n_runs,
                                 std::uint64_t seed) {
  const double expected = analytic_rate(policy, params).win_probability;
  const auto summary = batch(policy, params, n_plays, n_runs, seed);
  Comparison out;
  out.analytic_rate = expected;
  out.total_plays = summary.total_plays;
  out.empirical_rate =
      static_cast<double>(summary.total_wins) / static_cast<double>(summary.total_plays);
  const double sd =
      std::sqrt(expected * (1.0 - expected) / static_cast<double>(summary.total_plays));
  out.z_score = (out.empirical_rate - expected) / sd;
  return out;
}

}  // namespace parrondo::sim
