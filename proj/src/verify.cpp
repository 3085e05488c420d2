#include "parrondo/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "parrondo/analysis.hpp"
#include "parrondo/games.hpp"
#include "parrondo/markov.hpp"
#include "parrondo/simulation.hpp"

namespace parrondo::verify {

namespace {

using games::GameParams;
using markov::TransitionMatrix;

constexpr int kModulus = 3;
constexpr double kAlpha = 0.005;
constexpr double kReferenceThreshold = 0.013109;

// The game models under test. Without a fault these are the library
// constructors; with one, game B (and everything built from it) is mutated.
struct Models {
  Fault fault = Fault::None;

  std::vector<double> b_wins(const GameParams& p) const {
    auto wins = games::win_vector(p, games::GameB{}).per_state_win;
    if (fault == Fault::SwapCoinsB)
      for (auto& w : wins) w = (w == p.coin_b1_win()) ? p.coin_b2_win() : p.coin_b1_win();
    return wins;
  }
  TransitionMatrix a(const GameParams& p) const { return games::game_a_matrix(p); }
  TransitionMatrix b(const GameParams& p) const {
    if (fault == Fault::None) return games::game_b_matrix(p);
    return games::walk_matrix(b_wins(p));
  }
  TransitionMatrix mix(const GameParams& p, double gamma) const {
    if (fault == Fault::None) return games::mixture_matrix(p, gamma);
    const auto pa = a(p);
    const auto pb = b(p);
    markov::RawMatrix rows(pa.size(), std::vector<double>(pa.size()));
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t j = 0; j < pa.size(); ++j)
        rows[i][j] = gamma * pa(i, j) + (1.0 - gamma) * pb(i, j);
    return TransitionMatrix::from_rows(rows);
  }
  std::vector<double> mix_wins(const GameParams& p, double gamma) const {
    auto wins = b_wins(p);
    for (auto& w : wins) w = gamma * p.coin_a_win() + (1.0 - gamma) * w;
    return wins;
  }
  TransitionMatrix optimal(const GameParams& p) const {
    if (fault == Fault::None) return games::optimal_policy_matrix(p);
    auto wins = b_wins(p);
    wins[0] = p.coin_a_win();
    return games::walk_matrix(wins);
  }
  std::vector<double> optimal_wins(const GameParams& p) const {
    auto wins = b_wins(p);
    wins[0] = p.coin_a_win();
    return wins;
  }

  double rate_a(const GameParams& p) const {
    return analysis::long_run_win_rate(a(p), games::win_vector(p, games::GameA{}))
        .win_probability;
  }
  double rate_b(const GameParams& p) const {
    return analysis::long_run_win_rate(b(p), {b_wins(p)}).win_probability;
  }
  double rate_mix(const GameParams& p, double gamma) const {
    return analysis::long_run_win_rate(mix(p, gamma), {mix_wins(p, gamma)}).win_probability;
  }
  double rate_optimal(const GameParams& p) const {
    return analysis::long_run_win_rate(optimal(p), {optimal_wins(p)}).win_probability;
  }
  double rate_pattern(const std::string& pattern, const GameParams& p) const {
    auto lifted = analysis::lift_pattern(analysis::PatternPolicy(pattern), a(p), b(p),
                                         games::win_vector(p, games::GameA{}), {b_wins(p)});
    return analysis::long_run_win_rate(lifted.matrix, {std::move(lifted.wins)})
        .win_probability;
  }
  double rate(const sim::Policy& policy, const GameParams& p) const {
    struct Visitor {
      const Models& m;
      const GameParams& p;
      double operator()(const sim::PureA&) const { return m.rate_a(p); }
      double operator()(const sim::PureB&) const { return m.rate_b(p); }
      double operator()(const analysis::PatternPolicy& pat) const {
        return m.rate_pattern(pat.sequence(), p);
      }
      double operator()(const sim::RandomMix& mix) const { return m.rate_mix(p, mix.gamma); }
      double operator()(const sim::CapitalAware&) const { return m.rate_optimal(p); }
    };
    return std::visit(Visitor{*this, p}, policy);
  }
};

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? worst : INFINITY;
}

std::vector<double> alpha_grid(std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = 0.1 * static_cast<double>(i) / points;
  return grid;
}

class Suite {
 public:
  void near(std::string name, double expected, double got, double tol) {
    const bool pass = std::isfinite(got) && std::abs(got - expected) <= tol;
    report_.checks.push_back({std::move(name), Comparison::AbsDiff, expected, got, tol, pass, {}});
  }
  void less(std::string name, double got, double bound) {
    report_.checks.push_back({std::move(name), Comparison::LessThan, bound, got, 0.0, got < bound, {}});
  }
  void greater(std::string name, double got, double bound) {
    report_.checks.push_back(
        {std::move(name), Comparison::GreaterThan, bound, got, 0.0, got > bound, {}});
  }
  // Records a failing check for a computation that threw.
  template <typename Fn>
  void guarded(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report_.checks.push_back({name, Comparison::AbsDiff, NAN, NAN, 0.0, false, e.what()});
    }
  }
  Report take() { return std::move(report_); }

 private:
  Report report_;
};

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const char* to_string(Comparison comparison) {
  switch (comparison) {
    case Comparison::AbsDiff: return "abs_diff";
    case Comparison::LessThan: return "less_than";
    case Comparison::GreaterThan: return "greater_than";
  }
  return "unknown";
}

Report run(const Options& options) {
  const Models models{options.fault};
  Suite suite;

  for (const double alpha : {0.0, 0.005, 0.05, 0.099}) {
    const GameParams p(alpha, kModulus);
    suite.guarded(fmt::format("game_a_stationary_alpha_{}", alpha), [&] {
      const auto w = markov::stationary(models.a(p)).distribution;
      const std::vector<double> third(3, 1.0 / 3.0);
      suite.near(fmt::format("game_a_stationary_alpha_{}", alpha), 0.0,
                 max_abs_diff(w.values(), third), 1e-10);
    });
    suite.guarded(fmt::format("game_a_win_rate_alpha_{}", alpha), [&] {
      suite.near(fmt::format("game_a_win_rate_alpha_{}", alpha), 0.5 - alpha, models.rate_a(p),
                 1e-12);
    });
  }

  suite.guarded("game_b_closed_form", [&] {
    double worst = 0.0;
    double worst_losing = -INFINITY;
    for (const double alpha : alpha_grid(100)) {
      const GameParams p(alpha, kModulus);
      const auto numeric = markov::stationary(models.b(p)).distribution;
      worst = std::max(worst, max_abs_diff(numeric.values(),
                                           games::closed_form_stationary_b(alpha).values()));
      if (alpha > 0.0) worst_losing = std::max(worst_losing, models.rate_b(p));
    }
    suite.near("game_b_closed_form", 0.0, worst, 1e-10);
    suite.less("game_b_losing_for_positive_alpha", worst_losing, 0.5);
  });
  suite.guarded("game_b_fair_at_zero", [&] {
    suite.near("game_b_fair_at_zero", 0.5, models.rate_b(GameParams(0.0, kModulus)), 1e-12);
  });

  suite.guarded("mixture_closed_form", [&] {
    double worst = 0.0;
    for (const double alpha : alpha_grid(100)) {
      const auto numeric = markov::stationary(models.mix(GameParams(alpha, kModulus), 0.5));
      worst = std::max(worst, max_abs_diff(numeric.distribution.values(),
                                           games::closed_form_stationary_mix(alpha).values()));
    }
    suite.near("mixture_closed_form", 0.0, worst, 1e-10);
  });
  suite.guarded("mixture_win_rate_alpha_0.005", [&] {
    suite.near("mixture_win_rate_alpha_0.005", games::closed_form_mixture_win_rate(kAlpha),
               models.rate_mix(GameParams(kAlpha, kModulus), 0.5), 1e-10);
  });

  suite.guarded("critical_alpha", [&] {
    const auto threshold = analysis::fairness_threshold(
        [&](double alpha) { return models.rate_mix(GameParams(alpha, kModulus), 0.5); });
    suite.near("critical_alpha", kReferenceThreshold, threshold.alpha, 1e-4);
  });

  const GameParams p(kAlpha, kModulus);
  suite.guarded("paradox_signs", [&] {
    suite.less("rate_game_a_below_half", models.rate_a(p), 0.5);
    suite.less("rate_game_b_below_half", models.rate_b(p), 0.5);
    suite.less("rate_pattern_AB_below_half", models.rate_pattern("AB", p), 0.5);
    suite.less("rate_pattern_BBBA_below_half", models.rate_pattern("BBBA", p), 0.5);
    suite.greater("rate_pattern_AAB_above_half", models.rate_pattern("AAB", p), 0.5);
    suite.greater("rate_pattern_ABB_above_half", models.rate_pattern("ABB", p), 0.5);
    const double mix = models.rate_mix(p, 0.5);
    suite.greater("rate_mixture_above_half", mix, 0.5);
    suite.greater("rate_optimal_above_mixture", models.rate_optimal(p), mix);
  });

  const std::vector<sim::Policy> policies{sim::PureA{}, sim::PureB{},
                                          analysis::PatternPolicy("AAB"), sim::RandomMix{0.5},
                                          sim::CapitalAware{}};
  for (const auto& policy : policies) {
    const std::string name = "monte_carlo_z_" + sim::policy_name(policy);
    suite.guarded(name, [&] {
      const double analytic = models.rate(policy, p);
      const auto summary = sim::batch(policy, p, options.mc_plays, options.mc_runs, options.seed);
      const double n = static_cast<double>(summary.total_plays);
      const double z =
          (static_cast<double>(summary.total_wins) / n - analytic) /
          std::sqrt(analytic * (1.0 - analytic) / n);
      suite.near(name, 0.0, z, 4.0);
    });
  }

  suite.guarded("bookstore", [&] {
    const auto book = markov::validate_stochastic(
        {{0.25, 0.5, 0.25}, {0.0, 0.5, 0.5}, {0.33, 0.33, 0.34}});
    const auto q1 = markov::evolve(markov::ProbabilityVector({0.0, 0.5, 0.5}), book, 1);
    suite.near("bookstore_evolve_one_day", 0.0,
               max_abs_diff(q1.values(), std::vector<double>{0.165, 0.415, 0.420}), 1e-12);
    const auto sq = markov::matrix_power(book, 2);
    const std::vector<double> expected{0.145,  0.4575, 0.3975, 0.165, 0.415,
                                       0.42,   0.1947, 0.4422, 0.3631};
    std::vector<double> got;
    for (std::size_t i = 0; i < 3; ++i) got.insert(got.end(), sq.row(i).begin(), sq.row(i).end());
    suite.near("bookstore_square", 0.0, max_abs_diff(got, expected), 1e-12);
  });
  suite.guarded("two_cycle_classification", [&] {
    const auto flip = markov::validate_stochastic({{0.0, 1.0}, {1.0, 0.0}});
    const bool ok = markov::is_irreducible(flip) && !markov::is_regular(flip);
    suite.near("two_cycle_irreducible_not_regular", 1.0, ok ? 1.0 : 0.0, 0.0);
  });

  return suite.take();
}

}  // namespace parrondo::verify
