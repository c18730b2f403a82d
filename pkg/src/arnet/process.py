"""Simulation of the AR(1) edge process and its closed-form moments.

Each edge is a two-state Markov chain driven by a three-valued innovation:
``eps = 1`` with probability alpha (edge switched on), ``eps = -1`` with
probability beta (edge switched off) and ``eps = 0`` otherwise (edge keeps its
state, or flips it in the alternating variant).

Random numbers come from a Philox counter-based stream keyed by
``(seed, stream)``.  The uniform for edge ``e`` at transition ``t`` is draw
number ``(t - 1) * |J| + e`` of the innovation stream, so any block of the
innovation array can be regenerated independently (see
:func:`innovation_uniforms`).  Innovations are decoded from a single uniform
``u``: ``eps = 1`` if ``u < alpha``, ``eps = -1`` if ``u >= 1 - beta``, else 0.
"""

from __future__ import annotations

import numpy as np

from .core import AdjacencySeries, EdgeDomain, ParamField
from .errors import DegenerateEdge, DimensionMismatch, InvalidDimension, InvalidParameters

STREAM_INNOVATIONS = 0
STREAM_INIT = 1

_UINT64 = (1 << 64) - 1


def philox(seed: int, stream: int = 0) -> np.random.Generator:
    if not 0 <= int(seed) <= _UINT64:
        raise InvalidParameters(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=np.array([int(seed), int(stream)], dtype=np.uint64)))


def innovation_uniforms(seed: int, n_edges: int, t_start: int, t_stop: int) -> np.ndarray:
    """Uniforms for transitions ``t_start..t_stop`` (inclusive), shape ``(t_stop - t_start + 1, n_edges)``."""
    if t_start < 1 or t_stop < t_start - 1:
        raise InvalidDimension("need 1 <= t_start <= t_stop + 1")
    bitgen = np.random.Philox(key=np.array([int(seed), STREAM_INNOVATIONS], dtype=np.uint64))
    offset = (t_start - 1) * n_edges
    # Philox4x64 yields four 64-bit words per counter step; one double per word
    bitgen.advance(offset // 4)
    gen = np.random.Generator(bitgen)
    if offset % 4:
        gen.random(offset % 4)
    return gen.random((t_stop - t_start + 1, n_edges))


def _require_complete(params: ParamField) -> None:
    if not params.complete:
        raise InvalidParameters("parameter field has undefined entries")
    if not params.constrained and np.any(params.alpha + params.beta > 1 + 1e-12):
        raise InvalidParameters("alpha + beta > 1 on some edge")


def _initial_state(domain: EdgeDomain, init, seed: int, pi_stationary) -> np.ndarray:
    e = len(domain)
    if isinstance(init, str):
        if init != "stationary":
            raise InvalidParameters(f"unknown init {init!r}")
        pi = pi_stationary()
    else:
        arr = np.asarray(init, dtype=float)
        if arr.ndim == 2:
            if arr.shape != (domain.p, domain.p):
                raise DimensionMismatch(f"fixed initial matrix must be {domain.p}x{domain.p}")
            x0 = arr[domain.rows, domain.cols]
            if np.any((x0 != 0) & (x0 != 1)):
                raise InvalidParameters("fixed initial matrix must be binary")
            return x0.astype(np.int8)
        pi = np.broadcast_to(arr, (e,))
        if np.any(pi < 0) or np.any(pi > 1):
            raise InvalidParameters("initial edge probabilities must lie in [0, 1]")
    u = philox(seed, STREAM_INIT).random(e)
    return (u < pi).astype(np.int8)


def _run(regimes, init, seed, alternating: bool) -> AdjacencySeries:
    domain = regimes[0][0].domain
    for params, steps in regimes:
        _require_complete(params)
        if params.domain != domain:
            raise DimensionMismatch("all regimes must share one edge domain")
        if steps < 0:
            raise InvalidDimension("number of transitions must be nonnegative")
    first = regimes[0][0]
    pi_fn = (lambda: alternating_stationary_pi(first.alpha, first.beta)) if alternating else (
        lambda: stationary_pi(first)
    )
    x = _initial_state(domain, init, seed, pi_fn)
    n = sum(steps for _, steps in regimes)
    u_all = innovation_uniforms(seed, len(domain), 1, n)
    paths = np.empty((n + 1, len(domain)), dtype=np.int8)
    paths[0] = x
    t = 0
    for params, steps in regimes:
        on, off = params.alpha, 1.0 - params.beta
        for _ in range(steps):
            u = u_all[t]
            keep = (1 - x) if alternating else x
            x = np.where(u < on, 1, np.where(u >= off, 0, keep)).astype(np.int8)
            t += 1
            paths[t] = x
    return AdjacencySeries.from_edge_paths(domain.kind, domain.p, paths)


def simulate(params: ParamField, n: int, init="stationary", seed: int = 0) -> AdjacencySeries:
    """Simulate ``n`` transitions of the AR(1) process.

    ``init`` is ``"stationary"``, a probability (or per-edge array of
    probabilities) for independent Bernoulli initial edges, or a fixed
    ``p x p`` binary matrix.
    """
    return _run([(params, n)], init, seed, alternating=False)


def simulate_alternating(params: ParamField, n: int, init="stationary", seed: int = 0) -> AdjacencySeries:
    """Simulate the variant whose ``eps = 0`` step flips the edge instead of keeping it."""
    return _run([(params, n)], init, seed, alternating=True)


def simulate_regimes(regimes, init="stationary", seed: int = 0) -> AdjacencySeries:
    """Piecewise-homogeneous simulation.

    ``regimes`` is a sequence of ``(ParamField, transitions)``; regime ``r``
    drives the transitions following those of regime ``r - 1``.  A stationary
    ``init`` refers to the first regime.
    """
    regimes = list(regimes)
    if not regimes:
        raise InvalidParameters("need at least one regime")
    return _run(regimes, init, seed, alternating=False)


def _sum_positive(alpha, beta):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    s = alpha + beta
    if np.any(s <= 0):
        raise DegenerateEdge("alpha + beta = 0: the chain has no unique stationary law")
    return alpha, beta, s


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def stationary_pi(params: ParamField) -> np.ndarray:
    _require_complete(params)
    alpha, _, s = _sum_positive(params.alpha, params.beta)
    return alpha / s


def alternating_stationary_pi(alpha, beta):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return _unwrap((1.0 - beta) / (2.0 - alpha - beta))


def stationary_moments(alpha, beta):
    """Stationary ``(mean, variance)`` of one edge."""
    alpha, beta, s = _sum_positive(alpha, beta)
    return _unwrap(alpha / s), _unwrap(alpha * beta / s**2)


def acf(alpha, beta, k: int):
    """Lag-``k`` autocorrelation ``(1 - alpha - beta) ** k``."""
    if k < 0:
        raise InvalidParameters("lag must be nonnegative")
    alpha, beta, s = _sum_positive(alpha, beta)
    return _unwrap((1.0 - s) ** k)


def autocovariance(alpha, beta, k: int):
    _, var = stationary_moments(alpha, beta)
    return _unwrap(np.asarray(var) * np.asarray(acf(alpha, beta, k)))


def expected_hamming(params: ParamField, k: int) -> float:
    """Expected number of modelled edges that differ between ``X_t`` and ``X_{t+k}``.

    The sum runs over the edge domain, so for undirected kinds each off-diagonal
    pair is counted once (the full-matrix Hamming distance counts it twice).
    """
    if k < 0:
        raise InvalidParameters("lag must be nonnegative")
    _require_complete(params)
    alpha, beta, s = _sum_positive(params.alpha, params.beta)
    return float(np.sum(2.0 * alpha * beta / s**2 * (1.0 - (1.0 - s) ** k)))


def alternating_theory(alpha, beta, k: int):
    """``(acf, expected per-edge Hamming)`` at lag ``k`` for the alternating variant."""
    if k < 0:
        raise InvalidParameters("lag must be nonnegative")
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(alpha < 0) or np.any(beta < 0) or np.any(alpha + beta > 1 + 1e-12):
        raise InvalidParameters("need alpha, beta >= 0 and alpha + beta <= 1")
    r = (-1.0) ** k * (1.0 - alpha - beta) ** k
    ham = 2.0 * (1.0 - alpha) * (1.0 - beta) / (2.0 - alpha - beta) ** 2 * (1.0 - r)
    return _unwrap(r), _unwrap(ham)
