#include "parrondo/cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "parrondo/analysis.hpp"
#include "parrondo/games.hpp"
#include "parrondo/simulation.hpp"
#include "parrondo/verify.hpp"

namespace parrondo::cli {

namespace {

using nlohmann::json;

enum class Format { Csv, Json };

struct RunConfig {
  double alpha = 0.005;
  int modulus = 3;
  double gamma = 0.5;
  std::string policy_spec = "mix:0.5";
  std::uint64_t n_plays = 50000;
  std::uint64_t n_runs = 1;
  std::uint64_t seed = verify::kDefaultSeed;
  Format format = Format::Csv;
  std::string output_path;

  // threshold
  double tol = 1e-7;
  // simulate
  bool trajectory = false;
  std::uint64_t every = 1;
  // sweep
  double start = 0.0;
  double stop = 0.095;
  std::size_t steps = 20;
  std::vector<double> grid;
  std::vector<std::string> games;
  // analyze
  std::vector<std::string> patterns;
  // verify
  std::string fault = "none";
};

std::string num(double x) { return fmt::format("{:.12g}", x); }

std::string format_name(Format f) { return f == Format::Csv ? "csv" : "json"; }

json config_json(const std::string& command, const RunConfig& c) {
  return {{"command", command}, {"alpha", c.alpha},       {"modulus", c.modulus},
          {"gamma", c.gamma},   {"policy", c.policy_spec}, {"n_plays", c.n_plays},
          {"n_runs", c.n_runs}, {"seed", c.seed},          {"format", format_name(c.format)}};
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::InvalidArgument, "cannot open output file: " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_json(std::ostream& os, const json& doc) { os << doc.dump(2) << '\n'; }

// --- analyze -------------------------------------------------------------

struct AnalyzeRow {
  std::string game;
  analysis::WinRateResult result;
  std::vector<double> stationary;  // over residues
};

int cmd_analyze(const RunConfig& c, std::ostream& out) {
  const games::GameParams params(c.alpha, c.modulus);
  std::vector<sim::Policy> policies{sim::PureA{}, sim::PureB{}, sim::RandomMix{c.gamma},
                                    sim::CapitalAware{}};
  for (const auto& pattern : c.patterns) policies.emplace_back(analysis::PatternPolicy(pattern));

  std::vector<AnalyzeRow> rows;
  for (const auto& policy : policies) {
    auto result = sim::analytic_rate(policy, params);
    auto marginal = std::holds_alternative<analysis::PatternPolicy>(policy)
                        ? analysis::marginalize_residues(result.stationary_used, c.modulus)
                        : result.stationary_used;
    std::vector<double> stationary(marginal.values().begin(), marginal.values().end());
    rows.push_back({sim::policy_name(policy), std::move(result), std::move(stationary)});
  }

  Output sink(c.output_path, out);
  if (c.format == Format::Csv) {
    *sink << "game,win_probability,profit_per_play";
    for (int i = 0; i < c.modulus; ++i) *sink << ",stationary_" << i;
    *sink << '\n';
    for (const auto& row : rows) {
      *sink << row.game << ',' << num(row.result.win_probability) << ','
            << num(row.result.expected_profit_per_play);
      for (const double x : row.stationary) *sink << ',' << num(x);
      *sink << '\n';
    }
  } else {
    json games = json::array();
    for (const auto& row : rows)
      games.push_back({{"game", row.game},
                       {"win_probability", row.result.win_probability},
                       {"profit_per_play", row.result.expected_profit_per_play},
                       {"stationary", row.stationary}});
    write_json(*sink, {{"config", config_json("analyze", c)}, {"games", games}});
  }
  return kExitOk;
}

// --- threshold -----------------------------------------------------------

int cmd_threshold(const RunConfig& c, std::ostream& out) {
  const auto t = analysis::critical_alpha(c.gamma, c.modulus, c.tol);
  Output sink(c.output_path, out);
  if (c.format == Format::Csv) {
    *sink << "gamma,modulus,critical_alpha,bracket_low,bracket_high,residual\n";
    *sink << num(c.gamma) << ',' << c.modulus << ',' << num(t.alpha) << ',' << num(t.lower)
          << ',' << num(t.upper) << ',' << num(t.residual) << '\n';
  } else {
    write_json(*sink, {{"config", config_json("threshold", c)},
                       {"critical_alpha", t.alpha},
                       {"bracket_low", t.lower},
                       {"bracket_high", t.upper},
                       {"residual", t.residual},
                       {"iterations", t.iterations}});
  }
  return kExitOk;
}

// --- simulate ------------------------------------------------------------

bool recorded_point(std::uint64_t play_index, std::uint64_t every, std::uint64_t n) {
  return play_index % every == 0 || play_index == n;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const auto policy = sim::parse_policy(c.policy_spec);
  const games::GameParams params(c.alpha, c.modulus);
  if (c.n_plays == 0) throw Error(ErrorCode::InvalidArgument, "n-plays must be positive");
  if (c.n_runs == 0) throw Error(ErrorCode::InvalidArgument, "n-runs must be positive");
  if (c.every == 0) throw Error(ErrorCode::InvalidArgument, "every must be positive");
  const auto summary = sim::batch(policy, params, c.n_plays, c.n_runs, c.seed, c.trajectory);

  Output sink(c.output_path, out);
  if (c.format == Format::Csv) {
    if (c.trajectory) {
      *sink << "run,seed,play_index,profit\n";
      for (std::size_t r = 0; r < summary.runs.size(); ++r) {
        const auto& run = summary.runs[r];
        const auto& traj = *run.profit_trajectory;
        for (std::uint64_t t = 1; t <= run.n_plays; ++t)
          if (recorded_point(t, c.every, run.n_plays))
            *sink << r << ',' << run.seed << ',' << t << ',' << traj[t - 1] << '\n';
      }
    } else {
      *sink << "run,seed,n_plays,wins,final_profit,empirical_win_rate,profit_per_play\n";
      for (std::size_t r = 0; r < summary.runs.size(); ++r) {
        const auto& run = summary.runs[r];
        *sink << r << ',' << run.seed << ',' << run.n_plays << ',' << run.wins << ','
              << run.final_profit << ',' << num(run.empirical_win_rate) << ','
              << num(static_cast<double>(run.final_profit) / static_cast<double>(run.n_plays))
              << '\n';
      }
    }
    return kExitOk;
  }

  json runs = json::array();
  for (std::size_t r = 0; r < summary.runs.size(); ++r) {
    const auto& run = summary.runs[r];
    json entry = {{"run", r},
                  {"seed", run.seed},
                  {"n_plays", run.n_plays},
                  {"wins", run.wins},
                  {"final_profit", run.final_profit},
                  {"empirical_win_rate", run.empirical_win_rate},
                  {"profit_per_play",
                   static_cast<double>(run.final_profit) / static_cast<double>(run.n_plays)}};
    if (run.profit_trajectory) {
      json index = json::array();
      json profit = json::array();
      for (std::uint64_t t = 1; t <= run.n_plays; ++t)
        if (recorded_point(t, c.every, run.n_plays)) {
          index.push_back(t);
          profit.push_back((*run.profit_trajectory)[t - 1]);
        }
      entry["trajectory"] = {{"play_index", std::move(index)}, {"profit", std::move(profit)}};
    }
    runs.push_back(std::move(entry));
  }
  write_json(*sink, {{"config", config_json("simulate", c)},
                     {"runs", std::move(runs)},
                     {"summary",
                      {{"mean_profit_per_play", summary.mean_profit_per_play},
                       {"stddev_profit_per_play", summary.stddev_profit_per_play},
                       {"total_plays", summary.total_plays},
                       {"total_wins", summary.total_wins}}}});
  return kExitOk;
}

// --- sweep ---------------------------------------------------------------

std::vector<double> sweep_grid(const RunConfig& c) {
  std::vector<double> grid = c.grid;
  if (grid.empty()) {
    if (c.steps == 0) throw Error(ErrorCode::InvalidArgument, "steps must be at least 1");
    if (!(c.start <= c.stop))
      throw Error(ErrorCode::InvalidArgument, "grid start must not exceed stop");
    grid.resize(c.steps);
    for (std::size_t i = 0; i < c.steps; ++i)
      grid[i] = c.steps == 1 ? c.start
                             : c.start + (c.stop - c.start) * static_cast<double>(i) /
                                             static_cast<double>(c.steps - 1);
  }
  for (const double alpha : grid)
    if (!(alpha >= 0.0 && alpha < 0.1))
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("grid value alpha={} out of range [0, 0.1)", alpha));
  return grid;
}

sim::Policy sweep_policy(const std::string& name, double gamma) {
  if (name == "mix") return sim::RandomMix{gamma};
  return sim::parse_policy(name);
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const auto grid = sweep_grid(c);
  std::vector<std::string> names = c.games;
  if (names.empty()) names = {"A", "B", "mix", "optimal"};
  std::vector<sim::Policy> policies;
  for (const auto& name : names) policies.push_back(sweep_policy(name, c.gamma));

  struct Row {
    double alpha;
    std::string game;
    analysis::WinRateResult result;
  };
  std::vector<Row> rows;
  for (const double alpha : grid) {
    const games::GameParams params(alpha, c.modulus);
    for (const auto& policy : policies) {
      try {
        rows.push_back({alpha, sim::policy_name(policy), sim::analytic_rate(policy, params)});
      } catch (const Error& e) {
        throw Error(e.code(), fmt::format("alpha={}: {}", alpha, e.what()));
      }
    }
  }

  Output sink(c.output_path, out);
  if (c.format == Format::Csv) {
    *sink << "alpha,game,win_probability,profit_per_play\n";
    for (const auto& row : rows)
      *sink << num(row.alpha) << ',' << row.game << ',' << num(row.result.win_probability) << ','
            << num(row.result.expected_profit_per_play) << '\n';
  } else {
    json table = json::array();
    for (const auto& row : rows)
      table.push_back({{"alpha", row.alpha},
                       {"game", row.game},
                       {"win_probability", row.result.win_probability},
                       {"profit_per_play", row.result.expected_profit_per_play}});
    write_json(*sink, {{"config", config_json("sweep", c)}, {"rows", table}});
  }
  return kExitOk;
}

// --- verify --------------------------------------------------------------

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  verify::Options options;
  options.seed = c.seed;
  if (c.fault == "swap-coins")
    options.fault = verify::Fault::SwapCoinsB;
  else if (c.fault != "none")
    throw Error(ErrorCode::InvalidArgument, "unknown fault '" + c.fault + "'");
  const auto report = verify::run(options);

  Output sink(c.output_path, out);
  if (c.format == Format::Csv) {
    *sink << "name,comparison,expected,got,tolerance,pass\n";
    for (const auto& check : report.checks)
      *sink << check.name << ',' << verify::to_string(check.comparison) << ','
            << num(check.expected) << ',' << num(check.got) << ',' << num(check.tolerance) << ','
            << (check.pass ? "true" : "false") << '\n';
  } else {
    json checks = json::array();
    for (const auto& check : report.checks)
      checks.push_back({{"name", check.name},
                        {"comparison", verify::to_string(check.comparison)},
                        {"expected", finite_or_null(check.expected)},
                        {"got", finite_or_null(check.got)},
                        {"tolerance", check.tolerance},
                        {"pass", check.pass},
                        {"error", check.error.empty() ? json(nullptr) : json(check.error)}});
    write_json(*sink, {{"seed", c.seed},
                       {"fault", c.fault},
                       {"passed", report.passed()},
                       {"checks", checks}});
  }
  if (report.passed()) return kExitOk;
  for (const auto& check : report.checks)
    if (!check.pass)
      err << "FAILED " << check.name << ": "
          << (check.error.empty()
                  ? fmt::format("got {}, expected {} {} (tolerance {})", num(check.got),
                                verify::to_string(check.comparison), num(check.expected),
                                num(check.tolerance))
                  : check.error)
          << '\n';
  return kExitVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capital-dependent coin games: exact Markov analysis and Monte Carlo",
               "parrondo"};
  app.require_subcommand(1);
  RunConfig c;
  const std::map<std::string, Format> formats{{"csv", Format::Csv}, {"json", Format::Json}};

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output format: csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--output,-o", c.output_path, "Write results to this file");
  };
  const auto add_game = [&](CLI::App* sub) {
    sub->add_option("--alpha", c.alpha, "Bias alpha in [0, 0.1)");
    sub->add_option("--modulus,-M", c.modulus, "Capital modulus M >= 2");
  };

  auto* analyze = app.add_subcommand("analyze", "Stationary analysis of A, B, mixture, optimal");
  add_game(analyze);
  analyze->add_option("--gamma", c.gamma, "Mixture weight of game A");
  analyze->add_option("--pattern", c.patterns, "Also analyze periodic patterns, e.g. AAB");
  add_common(analyze);

  auto* threshold = app.add_subcommand("threshold", "Critical alpha of the mixture game");
  threshold->add_option("--gamma", c.gamma, "Mixture weight of game A");
  threshold->add_option("--modulus,-M", c.modulus, "Capital modulus M >= 2");
  threshold->add_option("--tol", c.tol, "Bisection tolerance");
  add_common(threshold);

  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo play");
  add_game(simulate);
  simulate->add_option("--policy", c.policy_spec,
                       "A | B | pattern:<AB...> | mix:<gamma> | optimal");
  simulate->add_option("--n-plays", c.n_plays, "Plays per run");
  simulate->add_option("--n-runs", c.n_runs, "Independent runs");
  simulate->add_option("--seed", c.seed, "Base seed");
  simulate->add_flag("--trajectory", c.trajectory, "Emit the profit after each play");
  simulate->add_option("--every", c.every, "Keep every k-th trajectory point");
  add_common(simulate);

  auto* sweep = app.add_subcommand("sweep", "Analytic win rates over an alpha grid");
  sweep->add_option("--modulus,-M", c.modulus, "Capital modulus M >= 2");
  sweep->add_option("--gamma", c.gamma, "Mixture weight used by the 'mix' game");
  sweep->add_option("--start", c.start, "First alpha");
  sweep->add_option("--stop", c.stop, "Last alpha (inclusive)");
  sweep->add_option("--steps", c.steps, "Number of grid points");
  sweep->add_option("--grid", c.grid, "Explicit alpha values (overrides start/stop/steps)")
      ->delimiter(',');
  sweep->add_option("--games", c.games, "Games: A, B, mix, mix:<g>, optimal, pattern:<AB...>")
      ->delimiter(',');
  add_common(sweep);

  auto* verify_cmd = app.add_subcommand("verify", "Run the self-check suite");
  verify_cmd->add_option("--seed", c.seed, "Seed for the Monte Carlo checks");
  verify_cmd->add_option("--inject-fault", c.fault,
                         "Mutate the models to prove the suite catches it: none | swap-coins");
  add_common(verify_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  // The verify report defaults to JSON; everything else to CSV.
  if (verify_cmd->parsed() && verify_cmd->count("--format") == 0) c.format = Format::Json;

  try {
    if (analyze->parsed()) return cmd_analyze(c, out);
    if (threshold->parsed()) return cmd_threshold(c, out);
    if (simulate->parsed()) return cmd_simulate(c, out);
    if (sweep->parsed()) return cmd_sweep(c, out);
    return cmd_verify(c, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::NoSignChange:
      case ErrorCode::NotMonotone:
      case ErrorCode::NotIrreducible:
      case ErrorCode::SingularSystem:
        err << "(" << to_string(e.code()) << ")\n";
        return kExitNoResult;
      default:
        return kExitInvalidInput;
    }
  }
}

}  // namespace parrondo::cli
