#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parrondo/analysis.hpp"
#include "parrondo/error.hpp"
#include "parrondo/games.hpp"
#include "parrondo/markov.hpp"
#include "parrondo/simulation.hpp"
#include "parrondo/verify.hpp"

namespace py = pybind11;
using namespace parrondo;

namespace {

std::vector<double> to_list(const markov::ProbabilityVector& v) {
  return {v.values().begin(), v.values().end()};
}

py::dict report_dict(const markov::ConvergenceReport& r) {
  py::dict d;
  d["method"] = r.method == markov::StationaryMethod::DirectSolve ? "direct" : "power";
  d["iterations"] = r.iterations;
  d["final_gap"] = r.final_gap;
  d["contraction_factor_bound"] = r.contraction_factor_bound;
  d["residual"] = r.residual;
  d["gaps"] = r.gaps;
  d["within_envelope"] = r.within_envelope;
  return d;
}

py::dict rate_dict(const analysis::WinRateResult& r) {
  py::dict d;
  d["win_probability"] = r.win_probability;
  d["profit_per_play"] = r.expected_profit_per_play;
  d["stationary"] = to_list(r.stationary_used);
  return d;
}

py::dict sim_dict(const sim::SimResult& r) {
  py::dict d;
  d["n_plays"] = r.n_plays;
  d["seed"] = r.seed;
  d["final_profit"] = r.final_profit;
  d["wins"] = r.wins;
  d["empirical_win_rate"] = r.empirical_win_rate;
  d["trajectory"] = r.profit_trajectory;
  return d;
}

markov::TransitionMatrix matrix(const markov::RawMatrix& raw) {
  return markov::validate_stochastic(raw);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Markov chains and capital-dependent coin games";

  // args are (message, error code name).
  static PyObject* error = PyErr_NewException("parrondo._core.ParrondoError", PyExc_ValueError, nullptr);
  m.attr("ParrondoError") = py::handle(error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error, py::make_tuple(e.what(), to_string(e.code())).ptr());
    }
  });

  m.def("validate_stochastic",
        [](const markov::RawMatrix& raw) { return matrix(raw).to_rows(); }, py::arg("rows"));
  m.def("matrix_power",
        [](const markov::RawMatrix& raw, unsigned long long n) {
          return markov::matrix_power(matrix(raw), n).to_rows();
        },
        py::arg("rows"), py::arg("n"));
  m.def("evolve",
        [](const std::vector<double>& q, const markov::RawMatrix& raw, unsigned long long n) {
          return to_list(markov::evolve(markov::ProbabilityVector(q), matrix(raw), n));
        },
        py::arg("q"), py::arg("rows"), py::arg("n"));
  m.def("is_irreducible", [](const markov::RawMatrix& raw) { return markov::is_irreducible(matrix(raw)); });
  m.def("is_regular", [](const markov::RawMatrix& raw) { return markov::is_regular(matrix(raw)); });
  m.def("stationary",
        [](const markov::RawMatrix& raw) {
          const auto r = markov::stationary(matrix(raw));
          return py::make_tuple(to_list(r.distribution), report_dict(r.report));
        },
        py::arg("rows"));
  m.def("contraction_diagnostics",
        [](const markov::RawMatrix& raw, const std::vector<double>& y, std::size_t steps) {
          return report_dict(markov::contraction_diagnostics(matrix(raw), y, steps));
        },
        py::arg("rows"), py::arg("y"), py::arg("steps"));

  m.def("game_matrix",
        [](const std::string& game, double alpha, int modulus) {
          const games::GameParams params(alpha, modulus);
          const auto policy = sim::parse_policy(game);
          if (std::holds_alternative<sim::PureA>(policy)) return games::game_a_matrix(params).to_rows();
          if (std::holds_alternative<sim::PureB>(policy)) return games::game_b_matrix(params).to_rows();
          if (const auto* mix = std::get_if<sim::RandomMix>(&policy))
            return games::mixture_matrix(params, mix->gamma).to_rows();
          if (std::holds_alternative<sim::CapitalAware>(policy))
            return games::optimal_policy_matrix(params).to_rows();
          return analysis::lift_pattern(std::get<analysis::PatternPolicy>(policy), params)
              .matrix.to_rows();
        },
        py::arg("game"), py::arg("alpha") = 0.005, py::arg("modulus") = 3);
  m.def("closed_form_stationary_b", [](double a) { return to_list(games::closed_form_stationary_b(a)); });
  m.def("closed_form_stationary_mix", [](double a) { return to_list(games::closed_form_stationary_mix(a)); });
  m.def("closed_form_mixture_win_rate", &games::closed_form_mixture_win_rate);

  m.def("win_rate",
        [](const std::string& policy, double alpha, int modulus) {
          return rate_dict(sim::analytic_rate(sim::parse_policy(policy), games::GameParams(alpha, modulus)));
        },
        py::arg("policy"), py::arg("alpha") = 0.005, py::arg("modulus") = 3);
  m.def("critical_alpha",
        [](double gamma, int modulus, double tol) {
          const auto t = analysis::critical_alpha(gamma, modulus, tol);
          py::dict d;
          d["alpha"] = t.alpha;
          d["lower"] = t.lower;
          d["upper"] = t.upper;
          d["residual"] = t.residual;
          d["iterations"] = t.iterations;
          return d;
        },
        py::arg("gamma") = 0.5, py::arg("modulus") = 3, py::arg("tol") = 1e-7);
  m.def("alpha_sweep",
        [](double gamma, int modulus, const std::vector<double>& grid) {
          std::vector<std::pair<double, double>> rows;
          for (const auto& r : analysis::alpha_sweep(gamma, modulus, grid))
            rows.emplace_back(r.alpha, r.win_probability);
          return rows;
        },
        py::arg("gamma"), py::arg("modulus"), py::arg("grid"));

  m.def("simulate",
        [](const std::string& policy, double alpha, int modulus, std::uint64_t n_plays,
           std::uint64_t seed, bool record) {
          py::gil_scoped_release release;
          auto r = sim::simulate(sim::parse_policy(policy), games::GameParams(alpha, modulus),
                                 n_plays, seed, record);
          py::gil_scoped_acquire acquire;
          return sim_dict(r);
        },
        py::arg("policy"), py::arg("alpha") = 0.005, py::arg("modulus") = 3,
        py::arg("n_plays") = 50000, py::arg("seed") = verify::kDefaultSeed,
        py::arg("record_trajectory") = false);
  m.def("batch",
        [](const std::string& policy, double alpha, int modulus, std::uint64_t n_plays,
           std::uint64_t n_runs, std::uint64_t seed) {
          sim::BatchSummary s;
          {
            py::gil_scoped_release release;
            s = sim::batch(sim::parse_policy(policy), games::GameParams(alpha, modulus), n_plays,
                           n_runs, seed);
          }
          py::dict d;
          d["mean_profit_per_play"] = s.mean_profit_per_play;
          d["stddev_profit_per_play"] = s.stddev_profit_per_play;
          d["total_wins"] = s.total_wins;
          d["total_plays"] = s.total_plays;
          py::list runs;
          for (const auto& r : s.runs) runs.append(sim_dict(r));
          d["runs"] = runs;
          return d;
        },
        py::arg("policy"), py::arg("alpha") = 0.005, py::arg("modulus") = 3,
        py::arg("n_plays") = 50000, py::arg("n_runs") = 4, py::arg("seed") = verify::kDefaultSeed);
  m.def("run_seed", &sim::run_seed, py::arg("seed"), py::arg("run"));

  m.def("verify",
        [](std::uint64_t seed, bool swap_coins) {
          verify::Options options;
          options.seed = seed;
          options.fault = swap_coins ? verify::Fault::SwapCoinsB : verify::Fault::None;
          verify::Report report;
          {
            py::gil_scoped_release release;
            report = verify::run(options);
          }
          py::list checks;
          for (const auto& c : report.checks) {
            py::dict d;
            d["name"] = c.name;
            d["comparison"] = verify::to_string(c.comparison);
            d["expected"] = c.expected;
            d["got"] = c.got;
            d["tolerance"] = c.tolerance;
            d["pass"] = c.pass;
            d["error"] = c.error;
            checks.append(d);
          }
          return py::make_tuple(report.passed(), checks);
        },
        py::arg("seed") = verify::kDefaultSeed, py::arg("swap_coins") = false);
}
