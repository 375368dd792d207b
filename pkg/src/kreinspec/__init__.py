"""Numerical spectral analysis of singular indefinite Sturm-Liouville operators.

The weight r changes sign once (negative near the left endpoint, positive near
the right), which makes the natural setting an indefinite inner product: the
discretized problem is a symmetric tridiagonal pencil (T, R) with R signed.
The package locates essential spectra and gaps, classifies gap edges, decides
accumulation of discrete eigenvalues by iterated-logarithm tail tests, bounds
nonreal spectra by negative-squares budgets, and ships a deterministic CLI.
"""

from ._kernels import backend_name, pencil_count_below, tridiag_inertia
from ._version import __version__
from .assembly import (AssembledOperator, Grid, assemble_operator,
                       blockdiag_difference, build_grid)
from .budgets import (CountEstimate, NegativeSquaresBudget, PairBoundCheck,
                      count_estimate, gap_count_bound, kappa_budget,
                      pair_bound_check, select_variant)
from .cli_report import (AnalysisReport, ProblemSpec, deserialize_report,
                         load_problem, main, run_pipeline, serialize_report)
from .coeff_model import (CoefficientField, ComparisonReport, EndpointLimits,
                          HypothesisReport, LimitsDecl, PeriodDecl,
                          UnknownDecl, check_comparison_conditions,
                          check_hypotheses, detect_sign_window,
                          estimate_endpoint_limits, field_from_texts)
from .config import DEFAULT, NumericsConfig
from .eigen_core import (ComplexSpectrum, Inertia, count_below,
                         count_in_interval, indefinite_eigs, inertia_count,
                         numerical_rank, sym_tridiag_eigs)
from .errors import (DenseSizeError, EvalDomainError, ExprSyntaxError,
                     FactorizationBreakdown, HypothesisError, KreinspecError,
                     NumericsError, PairingError, ValidationError)
from .expr import parse_expression
from .kneser import (KneserVerdict, TransferReport, delta_eval,
                     iterated_log_family, kneser_verdict, log_threshold,
                     perturbation_transfer_check)
from .quadrature import integrate_real_line
from .spectra import (AccumulationEvidence, BandResult, BandSet,
                      EdgeClassification, EssentialReport, EssentialSpectra,
                      accumulation_sweep, build_spectrum_report,
                      classify_edges, decomposed_gap_count,
                      essential_from_limits, essential_union,
                      hill_discriminant, periodic_bands)

__all__ = [
    "__version__", "backend_name", "pencil_count_below", "tridiag_inertia",
    "AssembledOperator", "Grid", "assemble_operator", "blockdiag_difference",
    "build_grid",
    "CountEstimate", "NegativeSquaresBudget", "PairBoundCheck",
    "count_estimate", "gap_count_bound", "kappa_budget", "pair_bound_check",
    "select_variant",
    "AnalysisReport", "ProblemSpec", "deserialize_report", "load_problem",
    "main", "run_pipeline", "serialize_report",
    "CoefficientField", "ComparisonReport", "EndpointLimits",
    "HypothesisReport", "LimitsDecl", "PeriodDecl", "UnknownDecl",
    "check_comparison_conditions", "check_hypotheses", "detect_sign_window",
    "estimate_endpoint_limits", "field_from_texts",
    "DEFAULT", "NumericsConfig",
    "ComplexSpectrum", "Inertia", "count_below", "count_in_interval",
    "indefinite_eigs", "inertia_count", "numerical_rank", "sym_tridiag_eigs",
    "DenseSizeError", "EvalDomainError", "ExprSyntaxError",
    "FactorizationBreakdown", "HypothesisError", "KreinspecError",
    "NumericsError", "PairingError", "ValidationError",
    "parse_expression",
    "KneserVerdict", "TransferReport", "delta_eval", "iterated_log_family",
    "kneser_verdict", "log_threshold", "perturbation_transfer_check",
    "integrate_real_line",
    "AccumulationEvidence", "BandResult", "BandSet", "EdgeClassification",
    "EssentialReport", "EssentialSpectra", "accumulation_sweep",
    "build_spectrum_report", "classify_edges", "decomposed_gap_count",
    "essential_from_limits", "essential_union", "hill_discriminant",
    "periodic_bands",
]
