#pragma once

// Seeded Monte Carlo play of the coin games.
//
// Generator: xoshiro256** (Blackman & Vigna), its 256-bit state filled from
// four consecutive SplitMix64 outputs starting at the seed. A Bernoulli(p)
// draw consumes exactly one 64-bit output: u = (x >> 11) * 2^-53, success
// iff u < p. Per play the policy draw (RandomMix only) comes first, then the
// coin draw. Capital starts at 0 and is unbounded in both directions.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "parrondo/analysis.hpp"
#include "parrondo/games.hpp"

namespace parrondo::sim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of run `run_index` in a batch: mix64(seed + (run_index + 1) * golden).
constexpr std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index) noexcept {
  return mix64(seed + (run_index + 1) * 0x9E3779B97F4A7C15ULL);
}

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

struct PureA {};
struct PureB {};
struct RandomMix {
  double gamma;  // probability of playing A
};
struct CapitalAware {};

using Policy = std::variant<PureA, PureB, analysis::PatternPolicy, RandomMix, CapitalAware>;

/// Grammar: "A" | "B" | "pattern:<A/B string>" | "mix:<gamma>" | "optimal".
Policy parse_policy(std::string_view spec);
std::string policy_name(const Policy& policy);

struct SimResult {
  std::uint64_t n_plays = 0;
  std::uint64_t seed = 0;
  std::int64_t final_profit = 0;
  // Profit after each play, when recorded.
  std::optional<std::vector<std::int64_t>> profit_trajectory;
  std::uint64_t wins = 0;
  double empirical_win_rate = 0.0;
};

SimResult simulate(const Policy& policy, const games::GameParams& params,
                   std::uint64_t n_plays, std::uint64_t seed, bool record_trajectory = false);

struct BatchSummary {
  double mean_profit_per_play = 0.0;
  // Sample standard deviation of per-run profit per play; 0 for one run.
  double stddev_profit_per_play = 0.0;
  std::uint64_t total_wins = 0;
  std::uint64_t total_plays = 0;
  std::vector<SimResult> runs;  // indexed by run
};

/// Run r is simulate(policy, params, n_plays, run_seed(seed, r)). Runs are
/// spread over up to `threads` workers (0 = hardware concurrency).
BatchSummary batch(const Policy& policy, const games::GameParams& params,
                   std::uint64_t n_plays, std::uint64_t n_runs, std::uint64_t seed,
                   bool record_trajectory = false, unsigned threads = 0);

/// Exact long-run win probability of the policy.
analysis::WinRateResult analytic_rate(const Policy& policy, const games::GameParams& params);

struct Comparison {
  double analytic_rate = 0.0;
  double empirical_rate = 0.0;
  double z_score = 0.0;
  std::uint64_t total_plays = 0;
};

/// z = (empirical - analytic) / sqrt(analytic (1 - analytic) / (n_plays n_runs)).
Comparison empirical_vs_analytic(const Policy& policy, const games::GameParams& params,
                                 std::uint64_t n_plays, std::uint64_t n_runs,
                                 std::uint64_t seed);

}  // namespace parrondo::sim
