"""Markov chains, capital-dependent coin games, and their Monte Carlo simulation.

Policies and games are named with the CLI grammar: "A", "B", "mix:<gamma>",
"optimal", "pattern:<AB string>".
"""

from ._core import (
    ParrondoError,
    alpha_sweep,
    batch,
    closed_form_mixture_win_rate,
    closed_form_stationary_b,
    closed_form_stationary_mix,
    contraction_diagnostics,
    critical_alpha,
    evolve,
    game_matrix,
    is_irreducible,
    is_regular,
    matrix_power,
    run_seed,
    simulate,
    stationary,
    validate_stochastic,
    verify,
    win_rate,
)

__all__ = [
    "ParrondoError",
    "alpha_sweep",
    "batch",
    "closed_form_mixture_win_rate",
    "closed_form_stationary_b",
    "closed_form_stationary_mix",
    "contraction_diagnostics",
    "critical_alpha",
    "evolve",
    "game_matrix",
    "is_irreducible",
    "is_regular",
    "matrix_power",
    "run_seed",
    "simulate",
    "stationary",
    "validate_stochastic",
    "verify",
    "win_rate",
]
