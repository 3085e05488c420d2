// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "parrondo/analysis.hpp"
#include "parrondo/cli.hpp"
#include "parrondo/games.hpp"
#include "parrondo/markov.hpp"
#include "parrondo/simulation.hpp"
#include "parrondo/verify.hpp"

using namespace parrondo;
using games::GameParams;

namespace {

// Collects the first few failure messages of a criterion.
class Criterion {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 5) notes_.push_back(what);
  }
  void near(double got, double expected, double tol, const std::string& what) {
    require(std::fabs(got - expected) <= tol,
            fmt::format("{}: got {:.15g}, expected {:.15g} +/- {:g}", what, got, expected, tol));
  }
  bool ok() const { return failures_ == 0; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

std::vector<double> alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(0.001 * i);
  return grid;
}

double rate(const GameParams& p, const games::Game& g) {
  return analysis::game_win_rate(p, g).win_probability;
}

double pattern_rate(const char* seq, const GameParams& p) {
  return analysis::pattern_win_rate(analysis::PatternPolicy(seq), p).win_probability;
}

void game_a_uniform(Criterion& c) {
  for (const double a : {0.0, 0.005, 0.05, 0.099}) {
    const GameParams p(a, 3);
    const auto w = markov::stationary(games::game_a_matrix(p)).distribution;
    for (std::size_t i = 0; i < 3; ++i)
      c.near(w[i], 1.0 / 3.0, 1e-10, fmt::format("alpha={} v[{}]", a, i));
    c.near(rate(p, games::GameA{}), 0.5 - a, 1e-12, fmt::format("alpha={} rate", a));
  }
}

void game_b_closed_form(Criterion& c) {
  for (const double a : alpha_grid()) {
    const GameParams p(a, 3);
    const auto w = markov::stationary(games::game_b_matrix(p)).distribution;
    const auto closed = games::closed_form_stationary_b(a);
    for (std::size_t i = 0; i < 3; ++i)
      c.near(w[i], closed[i], 1e-10, fmt::format("alpha={} v[{}]", a, i));
    const double r = rate(p, games::GameB{});
    if (a > 0.0)
      c.require(r < 0.5, fmt::format("alpha={} rate {:.15g} not losing", a, r));
    else
      c.near(r, 0.5, 1e-12, "alpha=0 rate");
  }
}

void mixture_closed_form(Criterion& c) {
  for (const double a : alpha_grid()) {
    const auto w = markov::stationary(games::mixture_matrix(GameParams(a, 3), 0.5)).distribution;
    const auto closed = games::closed_form_stationary_mix(a);
    for (std::size_t i = 0; i < 3; ++i)
      c.near(w[i], closed[i], 1e-10, fmt::format("alpha={} v[{}]", a, i));
  }
  c.near(rate(GameParams(0.005, 3), games::Mixture{0.5}), games::closed_form_mixture_win_rate(0.005),
         1e-10, "rate at alpha=0.005");
}

void critical_alpha(Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto t = analysis::critical_alpha(0.5, 3);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.near(t.alpha, 0.013109, 1e-4, "critical alpha");
  c.require(seconds < 1.0, fmt::format("runtime {:.3f} s", seconds));
}

void paradox_signs(Criterion& c) {
  const GameParams p(0.005, 3);
  const double mix = rate(p, games::Mixture{0.5});
  const struct {
    const char* name;
    double value;
    bool winning;
  } cases[] = {
      {"A", rate(p, games::GameA{}), false},
      {"B", rate(p, games::GameB{}), false},
      {"pattern AB", pattern_rate("AB", p), false},
      {"pattern BBBA", pattern_rate("BBBA", p), false},
      {"pattern AAB", pattern_rate("AAB", p), true},
      {"pattern ABB", pattern_rate("ABB", p), true},
      {"mix 0.5", mix, true},
  };
  for (const auto& k : cases)
    c.require(k.winning ? k.value > 0.5 : k.value < 0.5,
              fmt::format("{} rate {:.15g} has the wrong side of 0.5", k.name, k.value));
  const double opt = rate(p, games::Optimal{});
  c.require(opt > mix, fmt::format("optimal {:.15g} not above mix {:.15g}", opt, mix));
}

void monte_carlo(Criterion& c) {
  const GameParams p(0.005, 3);
  for (const char* spec : {"A", "B", "pattern:AAB", "mix:0.5", "optimal"}) {
    const auto cmp =
        sim::empirical_vs_analytic(sim::parse_policy(spec), p, 250000, 4, verify::kDefaultSeed);
    c.require(cmp.total_plays >= 1000000, fmt::format("{}: only {} plays", spec, cmp.total_plays));
    c.require(std::fabs(cmp.z_score) < 4.0,
              fmt::format("{}: z = {:.3f} (empirical {:.6f}, analytic {:.6f})", spec, cmp.z_score,
                          cmp.empirical_rate, cmp.analytic_rate));
  }
}

void markov_properties(Criterion& c) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto p = markov::validate_stochastic(oracle::random_stochastic(n, 0.3, rng));
    std::vector<double> start(n);
    double sum = 0.0;
    for (auto& x : start) sum += (x = u(rng));
    for (auto& x : start) x /= sum;
    const markov::ProbabilityVector q(start);
    const unsigned steps = static_cast<unsigned>(trial % 21);
    const auto stepped = markov::evolve(q, p, steps);
    const auto power = markov::matrix_power(p, steps);
    for (std::size_t j = 0; j < n; ++j) {
      double by_power = 0.0;
      for (std::size_t i = 0; i < n; ++i) by_power += q[i] * power(i, j);
      c.near(stepped[j], by_power, 1e-10, fmt::format("evolve trial {} state {}", trial, j));
    }
  }

  const auto book =
      markov::validate_stochastic({{0.25, 0.5, 0.25}, {0.0, 0.5, 0.5}, {0.33, 0.33, 0.34}});
  const auto day1 = markov::evolve(markov::ProbabilityVector({0.0, 0.5, 0.5}), book, 1);
  const double expected_day1[] = {0.165, 0.415, 0.420};
  for (std::size_t j = 0; j < 3; ++j) c.near(day1[j], expected_day1[j], 1e-12, "bookstore day 1");
  const double expected_sq[3][3] = {
      {0.145, 0.4575, 0.3975}, {0.165, 0.415, 0.42}, {0.1947, 0.4422, 0.3631}};
  const auto sq = markov::matrix_power(book, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      c.near(sq(i, j), expected_sq[i][j], 1e-12, fmt::format("bookstore square ({},{})", i, j));

  const auto flip = markov::validate_stochastic({{0.0, 1.0}, {1.0, 0.0}});
  c.require(markov::is_irreducible(flip) && !markov::is_regular(flip),
            "two-cycle should be irreducible but not regular");

  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = markov::validate_stochastic(oracle::random_stochastic(3, 0.0, rng));
    std::vector<double> y(3);
    for (auto& x : y) x = normal(rng);
    const auto report = markov::contraction_diagnostics(p, y, 20);
    const double factor = *report.contraction_factor_bound;
    bool ok = report.within_envelope;
    for (std::size_t k = 1; k < report.gaps.size(); ++k)
      ok = ok && report.gaps[k] <= factor * report.gaps[k - 1] + 1e-14 * (1.0 + report.gaps[0]);
    c.require(ok, fmt::format("contraction envelope broken on trial {}", trial));
  }
}

void mutation_sensitivity(Criterion& c) {
  verify::Options clean;
  c.require(verify::run(clean).passed(), "unmodified model fails verify");
  verify::Options faulty;
  faulty.fault = verify::Fault::SwapCoinsB;
  c.require(!verify::run(faulty).passed(), "swapped coins pass verify");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run({"verify", "--inject-fault", "swap-coins"}, out, err);
  c.require(code == 1, fmt::format("verify with swapped coins exited {}", code));
}

}  // namespace

int main() {
  const struct {
    const char* title;
    std::function<void(Criterion&)> body;
  } criteria[] = {
      {"game A stationary uniform and win rate 0.5 - alpha", game_a_uniform},
      {"game B stationary matches closed form; losing iff alpha > 0", game_b_closed_form},
      {"mixture stationary and win rate match closed forms", mixture_closed_form},
      {"critical alpha 0.013109 +/- 1e-4 in under 1 s", critical_alpha},
      {"paradox sign pattern at alpha = 0.005, M = 3", paradox_signs},
      {"Monte Carlo agreement |z| < 4 over 1e6 plays", monte_carlo},
      {"Markov core properties and fixtures", markov_properties},
      {"verify detects swapped coins in game B", mutation_sensitivity},
  };

  int failed = 0;
  int index = 0;
  for (const auto& criterion : criteria) {
    ++index;
    Criterion c;
    try {
      criterion.body(c);
    } catch (const std::exception& e) {
      c.require(false, fmt::format("exception: {}", e.what()));
    }
    std::cout << fmt::format("[{}] criterion {}: {}\n", c.ok() ? "PASS" : "FAIL", index,
                             criterion.title);
    for (const auto& note : c.notes()) std::cout << "       " << note << '\n';
    if (!c.ok()) ++failed;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
