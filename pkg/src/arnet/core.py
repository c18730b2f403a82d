"""Core data model: network kinds, edge domains, adjacency series, parameter
fields, memberships and block parameters.

Node indices are 1-based wherever they leave the library (edge lists,
violation reports, labels).  Internally arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import (
    DataError,
    DimensionMismatch,
    EmptyCommunity,
    InvalidDimension,
    InvalidParameters,
)

PARAM_TOL = 1e-12


class NetworkKind(str, Enum):
    UNDIRECTED_SELF = "undirected-self"
    UNDIRECTED_NOSELF = "undirected-noself"
    DIRECTED_SELF = "directed-self"
    DIRECTED_NOSELF = "directed-noself"

    @property
    def directed(self) -> bool:
        return self in (NetworkKind.DIRECTED_SELF, NetworkKind.DIRECTED_NOSELF)

    @property
    def self_loops(self) -> bool:
        return self in (NetworkKind.UNDIRECTED_SELF, NetworkKind.DIRECTED_SELF)

    @classmethod
    def parse(cls, value) -> "NetworkKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise DataError(f"unknown network kind {value!r} (expected one of {choices})") from None


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EdgeDomain:
    """The modelled index set for a kind and node count.

    ``edges`` holds 1-based pairs in lexicographic order; ``rows``/``cols``
    are the matching 0-based index arrays for vectorised access.
    """

    kind: NetworkKind
    p: int
    edges: tuple
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeDomain):
            return NotImplemented
        return self.kind == other.kind and self.p == other.p

    def __hash__(self) -> int:
        return hash((self.kind, self.p))

    def index(self, i: int, j: int) -> int:
        """Position of the 1-based edge ``(i, j)``; raises ``KeyError`` if absent."""
        return self._lookup()[(i, j)]

    def _lookup(self) -> dict:
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {e: k for k, e in enumerate(self.edges)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    def __contains__(self, edge) -> bool:
        return tuple(edge) in self._lookup()


@lru_cache(maxsize=64)
def edge_domain(kind, p: int) -> EdgeDomain:
    kind = NetworkKind.parse(kind)
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise InvalidDimension(f"node count must be a positive integer, got {p!r}")
    p = int(p)
    i, j = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    i, j = i.ravel(), j.ravel()
    if kind.directed:
        keep = np.ones_like(i, dtype=bool) if kind.self_loops else i != j
    else:
        keep = i <= j if kind.self_loops else i < j
    rows, cols = i[keep], j[keep]
    edges = tuple(zip((rows + 1).tolist(), (cols + 1).tolist()))
    return EdgeDomain(kind, p, edges, _readonly(rows), _readonly(cols))


class Violation(NamedTuple):
    """One invariant violation at 1-based ``(t, i, j)``; ``t`` is the snapshot index."""

    what: str
    t: int
    i: int
    j: int


@dataclass(frozen=True, eq=False)
class AdjacencySeries:
    """Snapshots ``X_0, ..., X_n`` of binary ``p x p`` adjacency matrices.

    Construction only checks the array shape; call :func:`validate` for a full
    report or :meth:`check` to raise on the first problem.
    """

    kind: NetworkKind
    snapshots: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", NetworkKind.parse(self.kind))
        x = np.asarray(self.snapshots)
        if x.ndim != 3 or x.shape[1] != x.shape[2] or x.shape[0] < 1 or x.shape[1] < 1:
            raise InvalidDimension(f"snapshots must have shape (n+1, p, p), got {x.shape}")
        if x.dtype != np.int8:
            if x.size and (x.min() < -128 or x.max() > 127):
                raise DataError("adjacency entries out of range")
            x = x.astype(np.int8)
        elif not x.flags.owndata or x.flags.writeable:
            x = x.copy()
        object.__setattr__(self, "snapshots", _readonly(x))

    @property
    def p(self) -> int:
        return self.snapshots.shape[1]

    @property
    def n(self) -> int:
        """Number of transitions (snapshots are ``t = 0..n``)."""
        return self.snapshots.shape[0] - 1

    @property
    def domain(self) -> EdgeDomain:
        return edge_domain(self.kind, self.p)

    def edge_paths(self) -> np.ndarray:
        """``(n+1, |J|)`` array: column ``e`` is the path of edge ``domain.edges[e]``."""
        d = self.domain
        return self.snapshots[:, d.rows, d.cols]

    @classmethod
    def from_edge_paths(cls, kind, p: int, paths) -> "AdjacencySeries":
        d = edge_domain(kind, p)
        paths = np.asarray(paths)
        if paths.ndim != 2 or paths.shape[1] != len(d):
            raise DimensionMismatch(f"paths must have shape (n+1, {len(d)}), got {paths.shape}")
        x = np.zeros((paths.shape[0], p, p), dtype=np.int8)
        x[:, d.rows, d.cols] = paths
        if not d.kind.directed:
            x[:, d.cols, d.rows] = paths
        return cls(d.kind, x)

    def window(self, start: int, stop: int) -> "AdjacencySeries":
        """Snapshots ``start..stop`` inclusive as a new series."""
        return AdjacencySeries(self.kind, self.snapshots[start : stop + 1])

    def reversed(self) -> "AdjacencySeries":
        return AdjacencySeries(self.kind, self.snapshots[::-1])

    def equals(self, other: "AdjacencySeries") -> bool:
        return (
            self.kind == other.kind
            and self.snapshots.shape == other.snapshots.shape
            and bool(np.array_equal(self.snapshots, other.snapshots))
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdjacencySeries):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def check(self) -> "AdjacencySeries":
        report = validate(self)
        if report:
            v = report[0]
            raise DataError(
                f"invalid series: {len(report)} violation(s), first is {v.what} at t={v.t} ({v.i},{v.j})"
            )
        return self


def validate(series: AdjacencySeries) -> list:
    """Every violated invariant of ``series`` as a list of :class:`Violation`."""
    x = series.snapshots
    out = []
    for t, i, j in zip(*np.nonzero((x != 0) & (x != 1))):
        out.append(Violation("non-binary", int(t), int(i) + 1, int(j) + 1))
    if not series.kind.directed:
        upper = np.triu(np.ones(x.shape[1:], dtype=bool), k=1)
        asym = (x != np.swapaxes(x, 1, 2)) & upper
        for t, i, j in zip(*np.nonzero(asym)):
            out.append(Violation("asymmetric", int(t), int(i) + 1, int(j) + 1))
    if not series.kind.self_loops:
        diag = np.diagonal(x, axis1=1, axis2=2)
        for t, i in zip(*np.nonzero(diag)):
            out.append(Violation("self-loop", int(t), int(i) + 1, int(i) + 1))
    return out


class EdgeStatus(IntEnum):
    OK = 0
    ALPHA_UNDEFINED = 1
    BETA_UNDEFINED = 2
    BOTH_UNDEFINED = 3


def _status_from(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return (np.isnan(alpha).astype(np.int8) + 2 * np.isnan(beta).astype(np.int8)).astype(np.int8)


@dataclass(frozen=True, eq=False)
class ParamField:
    """Per-edge ``(alpha, beta)`` over an edge domain.

    Undefined values are stored as NaN and flagged in ``status``
    (see :class:`EdgeStatus`).  Defined values lie in ``[0, 1]``; model
    parameters also satisfy ``alpha + beta <= 1``.  Estimated fields are built
    with ``constrained=False`` because the unrestricted MLE can break the sum
    constraint (e.g. a path that flips at every step gives 1 and 1).
    """

    domain: EdgeDomain
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    status: np.ndarray = field(default=None, repr=False)
    constrained: bool = True

    def __post_init__(self):
        e = len(self.domain)
        a = np.array(np.broadcast_to(np.asarray(self.alpha, dtype=float), (e,)))
        b = np.array(np.broadcast_to(np.asarray(self.beta, dtype=float), (e,)))
        status = _status_from(a, b)
        if self.status is not None and not np.array_equal(np.asarray(self.status), status):
            raise InvalidParameters("status flags disagree with undefined entries")
        ok_a, ok_b = ~np.isnan(a), ~np.isnan(b)
        if np.any(a[ok_a] < -PARAM_TOL) or np.any(a[ok_a] > 1 + PARAM_TOL):
            raise InvalidParameters("alpha outside [0, 1]")
        if np.any(b[ok_b] < -PARAM_TOL) or np.any(b[ok_b] > 1 + PARAM_TOL):
            raise InvalidParameters("beta outside [0, 1]")
        both = ok_a & ok_b
        if self.constrained and np.any(a[both] + b[both] > 1 + PARAM_TOL):
            k = int(np.argmax((a + b > 1 + PARAM_TOL) & both))
            raise InvalidParameters(f"alpha + beta > 1 on edge {self.domain.edges[k]}")
        object.__setattr__(self, "alpha", _readonly(a))
        object.__setattr__(self, "beta", _readonly(b))
        object.__setattr__(self, "status", _readonly(status))

    @classmethod
    def homogeneous(cls, domain: EdgeDomain, alpha: float, beta: float) -> "ParamField":
        return cls(domain, np.full(len(domain), float(alpha)), np.full(len(domain), float(beta)))

    @classmethod
    def from_blocks(cls, domain: EdgeDomain, membership: "Membership", blocks: "BlockParams") -> "ParamField":
        if membership.p != domain.p or membership.q != blocks.q:
            raise DimensionMismatch("membership, blocks and domain disagree in p or q")
        k = membership.labels[domain.rows] - 1
        l = membership.labels[domain.cols] - 1
        return cls(domain, blocks.theta[k, l], blocks.eta[k, l], constrained=blocks.constrained)

    @property
    def complete(self) -> bool:
        return not np.any(self.status)

    def edge(self, i: int, j: int):
        """``(alpha, beta)`` at 1-based ``(i, j)`` with ``None`` for undefined."""
        k = self.domain.index(i, j)
        a, b = self.alpha[k], self.beta[k]
        return (None if np.isnan(a) else float(a), None if np.isnan(b) else float(b))

    def matrices(self):
        """``p x p`` arrays of alpha and beta; entries outside the domain are NaN."""
        p, d = self.domain.p, self.domain
        out = []
        for v in (self.alpha, self.beta):
            m = np.full((p, p), np.nan)
            m[d.rows, d.cols] = v
            if not d.kind.directed:
                m[d.cols, d.rows] = v
            out.append(m)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class Membership:
    """Node-to-community map; ``labels[i]`` is the 1-based community of node ``i+1``."""

    labels: np.ndarray
    q: int = None

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64).ravel()
        if labels.size == 0:
            raise InvalidDimension("membership needs at least one node")
        q = int(labels.max()) if self.q is None else int(self.q)
        if q < 1 or q > labels.size:
            raise InvalidDimension(f"q must satisfy 1 <= q <= p, got q={q}, p={labels.size}")
        if labels.min() < 1 or labels.max() > q:
            raise InvalidParameters("community label out of range 1..q")
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "q", q)

    @property
    def p(self) -> int:
        return self.labels.size

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels - 1, minlength=self.q)

    @property
    def Z(self) -> np.ndarray:
        z = np.zeros((self.p, self.q))
        z[np.arange(self.p), self.labels - 1] = 1.0
        return z

    def require_nonempty(self) -> None:
        empty = np.flatnonzero(self.sizes == 0)
        if empty.size:
            raise EmptyCommunity(f"communities {(empty + 1).tolist()} are empty")

    def permuted_nodes(self, order) -> "Membership":
        return Membership(self.labels[np.asarray(order)], self.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Membership):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.labels, other.labels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BlockParams:
    """Symmetric ``q x q`` community-pair transition probabilities.

    NaN marks an unavailable pair.  ``constrained=False`` drops the
    ``theta + eta <= 1`` check, as for :class:`ParamField` estimates.
    """

    theta: np.ndarray
    eta: np.ndarray
    constrained: bool = True

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        eta = np.array(self.eta, dtype=float)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1] or theta.shape != eta.shape:
            raise InvalidDimension("theta and eta must be square matrices of equal shape")
        for name, m in (("theta", theta), ("eta", eta)):
            ok = ~np.isnan(m)
            if not np.array_equal(ok, ok.T) or not np.allclose(m[ok], m.T[ok], atol=PARAM_TOL):
                raise InvalidParameters(f"{name} must be symmetric")
            if np.any(m[ok] < -PARAM_TOL) or np.any(m[ok] > 1 + PARAM_TOL):
                raise InvalidParameters(f"{name} outside [0, 1]")
        both = ~np.isnan(theta) & ~np.isnan(eta)
        if self.constrained and np.any(theta[both] + eta[both] > 1 + PARAM_TOL):
            raise InvalidParameters("theta + eta > 1")
        object.__setattr__(self, "theta", _readonly(theta))
        object.__setattr__(self, "eta", _readonly(eta))

    @property
    def q(self) -> int:
        return self.theta.shape[0]

    def relabel(self, perm) -> "BlockParams":
        """Parameters under new labels where old community ``k`` becomes ``perm[k]`` (0-based)."""
        inv = np.argsort(np.asarray(perm))
        return BlockParams(self.theta[np.ix_(inv, inv)], self.eta[np.ix_(inv, inv)], self.constrained)
