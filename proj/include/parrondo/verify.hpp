#pragma once

// Self-check suite: closed forms against the solver, the fairness
// threshold, the sign pattern of the paradox, and Monte Carlo agreement.

#include <cstdint>
#include <string>
#include <vector>

namespace parrondo::verify {

inline constexpr std::uint64_t kDefaultSeed = 20240501;

enum class Fault {
  None,
  // Game B tosses coin 2 at residue 0 and coin 1 elsewhere.
  SwapCoinsB,
};

enum class Comparison { AbsDiff, LessThan, GreaterThan };

struct Check {
  std::string name;
  Comparison comparison = Comparison::AbsDiff;
  double expected = 0.0;
  double got = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // Set when the computation behind the check threw.
  std::string error;
};

struct Report {
  std::vector<Check> checks;
  bool passed() const;
};

struct Options {
  std::uint64_t seed = kDefaultSeed;
  Fault fault = Fault::None;
  // Plays per Monte Carlo check, split over `mc_runs` runs.
  std::uint64_t mc_plays = 250000;
  std::uint64_t mc_runs = 4;
};

Report run(const Options& options = {});

const char* to_string(Comparison comparison);

}  // namespace parrondo::verify
