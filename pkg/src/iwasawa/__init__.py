"""Iwasawa lambda-invariants of Dirichlet characters at odd primes,
computed from special values of the Kubota-Leopoldt p-adic L-function."""

__version__ = "0.1.0"

from .characters import (DirichletChar, decompose, enumerate_odd,
                         enumerate_primitive, quadratic_char, second_kind,
                         teichmuller_char)
from .invariants import (InconsistencyError, LambdaResult, PrecisionCeiling,
                         detect_rank, lambda_exact, lambda_field, lambda_gt)
from .localring import (LocalRing, PrecisionLoss, RingElement, Valuation,
                        iwasawa_log, make_ring, padic_gamma)
from .survey import (DistributionReport, SurveySpec, predicted_probability,
                     predicted_row, scan_distribution,
                     trivial_zero_prime_search)

__all__ = [
    "DirichletChar", "decompose", "enumerate_odd", "enumerate_primitive",
    "quadratic_char", "second_kind", "teichmuller_char",
    "InconsistencyError", "LambdaResult", "PrecisionCeiling", "detect_rank",
    "lambda_exact", "lambda_field", "lambda_gt",
    "LocalRing", "PrecisionLoss", "RingElement", "Valuation", "iwasawa_log",
    "make_ring", "padic_gamma",
    "DistributionReport", "SurveySpec", "predicted_probability",
    "predicted_row", "scan_distribution", "trivial_zero_prime_search",
    "__version__",
]
