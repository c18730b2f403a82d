import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arnet.core import AdjacencySeries, ParamField, edge_domain
from arnet.errors import (
    DiagonalEdge,
    DuplicateEdge,
    IndexOutOfRange,
    MalformedHeader,
    MalformedLine,
    NonCanonicalEdge,
    ParseError,
)
from arnet.io import dumps, loads, parse_series, serialize_series
from arnet.process import simulate

from oracles import KINDS

HEAD = "ants 1 p=3 n=1 kind=undirected-noself\n"


def test_empty_graphs_exact_bytes():
    s = AdjacencySeries("undirected-noself", np.zeros((2, 2, 2)))
    assert dumps(s) == "ants 1 p=2 n=1 kind=undirected-noself\nt 0\nt 1\n"


def test_layout_of_present_edges():
    x = np.zeros((1, 3, 3), dtype=int)
    x[0, 0, 2] = x[0, 2, 0] = 1
    x[0, 0, 1] = x[0, 1, 0] = 1
    assert dumps(AdjacencySeries("undirected-noself", x)) == "ants 1 p=3 n=0 kind=undirected-noself\nt 0\n1 2\n1 3\n"
    x = np.zeros((1, 2, 2), dtype=int)
    x[0, 1, 0] = 1
    assert dumps(AdjacencySeries("directed-noself", x)).endswith("t 0\n2 1\n")


@given(st.sampled_from(KINDS), st.integers(1, 5), st.integers(0, 6), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_round_trip_random(kind, p, n, seed):
    d = edge_domain(kind, p)
    paths = np.random.default_rng(seed).integers(0, 2, (n + 1, len(d)))
    s = AdjacencySeries.from_edge_paths(kind, p, paths)
    text = dumps(s)
    back = loads(text)
    assert back == s and back.kind == s.kind
    assert dumps(back) == text


def test_file_round_trip_bytes(tmp_path):
    s = simulate(ParamField.homogeneous(edge_domain("undirected-noself", 8), 0.3, 0.2), 10, seed=4)
    path = tmp_path / "a.ants"
    serialize_series(s, path)
    first = path.read_bytes()
    serialize_series(parse_series(path), path)
    assert path.read_bytes() == first
    assert b"\r" not in first and b" \n" not in first


@pytest.mark.parametrize(
    "text,error,line",
    [
        ("ants 2 p=3 n=1 kind=undirected-noself\nt 0\nt 1\n", MalformedHeader, 1),
        ("ants 1 p=3 n=1 kind=bogus\nt 0\nt 1\n", MalformedHeader, 1),
        ("ants 1 p=3  n=1 kind=undirected-noself\n", MalformedHeader, 1),
        (HEAD + "t 0\n1 4\nt 1\n", IndexOutOfRange, 3),
        (HEAD + "t 0\n0 2\nt 1\n", IndexOutOfRange, 3),
        (HEAD + "t 0\n1 2\n1 2\nt 1\n", DuplicateEdge, 4),
        (HEAD + "t 0\nt 1\n3 3\n", DiagonalEdge, 4),
        (HEAD + "t 0\n2 1\nt 1\n", NonCanonicalEdge, 3),
        (HEAD + "t 0\n1 2 \nt 1\n", MalformedLine, 3),
        (HEAD + "t 1\n", MalformedLine, 2),
        (HEAD + "t 0\n", MalformedLine, 2),
        (HEAD + "1 2\nt 0\nt 1\n", MalformedLine, 2),
    ],
)
def test_parse_errors_name_the_line(text, error, line):
    with pytest.raises(error) as info:
        loads(text)
    assert info.value.lineno == line
    assert str(info.value).startswith(f"line {line}:")


def test_error_classes_are_distinct():
    classes = [MalformedHeader, IndexOutOfRange, DuplicateEdge, DiagonalEdge, NonCanonicalEdge, MalformedLine]
    assert len(set(classes)) == len(classes)
    assert all(issubclass(c, ParseError) for c in classes)


def test_self_loops_allowed_for_self_kinds():
    s = loads("ants 1 p=2 n=0 kind=directed-self\nt 0\n2 2\n")
    assert s.snapshots[0, 1, 1] == 1


def test_non_ascii_file(tmp_path):
    path = tmp_path / "bad.ants"
    path.write_bytes("ants 1 p=2 n=0 kind=directed-self\nt 0\n1 ²\n".encode("utf-8"))
    with pytest.raises(ParseError):
        parse_series(path)
