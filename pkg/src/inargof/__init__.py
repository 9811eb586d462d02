"""Semi-parametric goodness-of-fit testing for INAR(p) count time series."""

__version__ = "0.1.0"

from .bootstrap import GofResult, gof_test, warp_speed_experiment, warp_speed_statistics
from .core import (
    CountSeries,
    DegenerateSeries,
    EmptyInput,
    InarError,
    InarModel,
    InvalidParameter,
    NegativeValue,
    NonIntegerValue,
    Pmf,
    sample_acf,
    sample_moments,
    sample_pacf,
    validate_series,
)
from .dgp import (
    DgpSpec,
    RngStream,
    geom_inar1,
    inarch1,
    ingarch11,
    nb_inar1,
    parse_dgp,
    poi_dar1,
    poi_inar,
    simulate,
    simulate_inar,
)
from .estimate import FitOptions, FitResult, conditional_loglik, fit_semiparametric, transition_probability
from .gof import StatConfig, tn, tn_closed_form, tn_quadrature
from .harness import ExperimentRow, ExperimentSpec, preset, run_experiment, run_table
from .io import parse_counts, read_counts

__all__ = [
    "CountSeries", "DegenerateSeries", "DgpSpec", "EmptyInput", "ExperimentRow", "ExperimentSpec",
    "FitOptions", "FitResult", "GofResult", "InarError", "InarModel", "InvalidParameter",
    "NegativeValue", "NonIntegerValue", "Pmf", "RngStream", "StatConfig", "conditional_loglik",
    "fit_semiparametric", "geom_inar1", "gof_test", "inarch1", "ingarch11", "nb_inar1", "parse_counts", "parse_dgp", "poi_dar1", "poi_inar", "preset", "read_counts",
    "run_experiment", "run_table", "sample_acf", "sample_moments", "sample_pacf", "simulate",
    "simulate_inar", "tn", "tn_closed_form", "tn_quadrature", "transition_probability",
    "validate_series", "warp_speed_experiment", "warp_speed_statistics",
]
