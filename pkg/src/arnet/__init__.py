"""AR(1) dynamic networks: simulation, estimation, diagnostics, block models and change points."""

from .changepoint import ChangePointReport, delta_f, detect, segment_loglik
from .core import (
    AdjacencySeries,
    BlockParams,
    EdgeDomain,
    EdgeStatus,
    Membership,
    NetworkKind,
    ParamField,
    edge_domain,
    validate,
)
from .diagnostics import contingency_T, permutation_test, residuals
from .errors import ArnetError, DataError, NumericalError
from .io import parse_series, serialize_series
from .metrics import ari, hamming, nmi
from .mle import confidence_interval, confidence_intervals, estimate_all, estimate_edge, transition_counts
from .process import (
    acf,
    expected_hamming,
    simulate,
    simulate_alternating,
    simulate_regimes,
    stationary_moments,
    stationary_pi,
)
from .sbm import bic, cluster_ar, cluster_mean, group_mle, sbm_loglik
from .spectral import build_laplacians, kmeans, leading_basis, oracle_laplacian

__version__ = "0.1.0"

__all__ = [
    "AdjacencySeries", "ArnetError", "BlockParams", "ChangePointReport", "DataError", "EdgeDomain",
    "EdgeStatus", "Membership", "NetworkKind", "NumericalError", "ParamField", "acf", "ari", "bic",
    "build_laplacians", "cluster_ar", "cluster_mean", "confidence_interval", "confidence_intervals",
    "contingency_T", "delta_f", "detect", "edge_domain", "estimate_all", "estimate_edge",
    "expected_hamming", "group_mle", "hamming", "kmeans", "leading_basis", "nmi", "oracle_laplacian",
    "parse_series", "permutation_test", "residuals", "sbm_loglik", "segment_loglik", "serialize_series",
    "simulate", "simulate_alternating", "simulate_regimes", "stationary_moments", "stationary_pi",
    "transition_counts", "validate",
]
