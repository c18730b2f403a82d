"""Plain-text series files.

Layout::

    ants 1 p=<p> n=<n> kind=<kind>
    t 0
    <i> <j>
    ...
    t <n>
    ...

Indices are 1-based and listed in lexicographic order; undirected kinds list
each edge once with ``i <= j``.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .core import AdjacencySeries, NetworkKind
from .errors import (
    DiagonalEdge,
    DuplicateEdge,
    IndexOutOfRange,
    MalformedHeader,
    MalformedLine,
    NonCanonicalEdge,
)

FORMAT_VERSION = 1
_HEADER = re.compile(r"ants (\d+) p=(\d+) n=(\d+) kind=(\S+)")
_EDGE = re.compile(r"(\d+) (\d+)")
_TIME = re.compile(r"t (\d+)")


def dumps(series: AdjacencySeries) -> str:
    series.check()
    x = series.snapshots
    lines = [f"ants {FORMAT_VERSION} p={series.p} n={series.n} kind={series.kind.value}"]
    for t in range(series.n + 1):
        lines.append(f"t {t}")
        present = x[t] if series.kind.directed else np.triu(x[t])
        lines.extend(f"{i + 1} {j + 1}" for i, j in zip(*np.nonzero(present)))
    return "\n".join(lines) + "\n"


def loads(text: str) -> AdjacencySeries:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedHeader("empty file", 1)
    m = _HEADER.fullmatch(lines[0])
    if not m:
        raise MalformedHeader(f"expected 'ants 1 p=<int> n=<int> kind=<kind>', got {lines[0]!r}", 1)
    version, p, n = int(m[1]), int(m[2]), int(m[3])
    if version != FORMAT_VERSION:
        raise MalformedHeader(f"unsupported format version {version}", 1)
    if p < 1:
        raise MalformedHeader("p must be at least 1", 1)
    try:
        kind = NetworkKind.parse(m[4])
    except ValueError as exc:
        raise MalformedHeader(str(exc), 1) from None

    x = np.zeros((n + 1, p, p), dtype=np.int8)
    t = -1
    for lineno, line in enumerate(lines[1:], start=2):
        tm = _TIME.fullmatch(line)
        if tm:
            if int(tm[1]) != t + 1:
                raise MalformedLine(f"expected 't {t + 1}', got {line!r}", lineno)
            t += 1
            if t > n:
                raise MalformedLine(f"time {t} exceeds n={n}", lineno)
            continue
        em = _EDGE.fullmatch(line)
        if not em:
            raise MalformedLine(f"expected '<i> <j>' or 't <t>', got {line!r}", lineno)
        if t < 0:
            raise MalformedLine("edge before the first time block", lineno)
        i, j = int(em[1]), int(em[2])
        if not (1 <= i <= p and 1 <= j <= p):
            raise IndexOutOfRange(f"edge ({i},{j}) outside 1..{p}", lineno)
        if i == j and not kind.self_loops:
            raise DiagonalEdge(f"self-loop ({i},{i}) not allowed for {kind.value}", lineno)
        if i > j and not kind.directed:
            raise NonCanonicalEdge(f"undirected edge must be written with i <= j, got ({i},{j})", lineno)
        if x[t, i - 1, j - 1]:
            raise DuplicateEdge(f"edge ({i},{j}) repeated at t={t}", lineno)
        x[t, i - 1, j - 1] = 1
        if not kind.directed:
            x[t, j - 1, i - 1] = 1
    if t != n:
        raise MalformedLine(f"file ends after t={t}, expected blocks up to t={n}", len(lines))
    return AdjacencySeries(kind, x)


def serialize_series(series: AdjacencySeries, path) -> None:
    Path(path).write_bytes(dumps(series).encode("ascii"))


def parse_series(path) -> AdjacencySeries:
    try:
        text = Path(path).read_bytes().decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedLine(f"file is not ASCII text (byte offset {exc.start})") from None
    return loads(text)
