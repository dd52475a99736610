"""Lindblad rate equations: block density matrices, unravellings and filtering."""

import json

from . import _lindrate
from ._lindrate import (
    ModelError,
    ModelParseError,
    NumericalError,
    RateModel,
    TwoLevelParams,
    average_sme,
    classical_reduction,
    coefficients,
    equilibrium,
    equilibrium_closed_form,
    evolve,
    load_model,
    parse_model,
    power_limit,
    power_monte_carlo,
    power_quadrature,
    rate_generator,
    reference_params,
    spectrum,
    twolevel_model,
    unravel_normalized,
    unravel_weighted,
    vectorized_rate_generator,
)

__all__ = [name for name in dir(_lindrate) if not name.startswith("_")] + ["run"]


def run(method, out, **kwargs):
    """Runs one command-line job; returns (exit status, summary dict, error message)."""
    status, summary, error = _lindrate.run(method, str(out), **kwargs)
    return status, json.loads(summary) if summary and summary != "null" else {}, error
