import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bettimc.complex import ExplicitComplex, Graph
from bettimc.errors import InputError
from bettimc.fixtures import hollow_triangle
from bettimc.io import (
    file_digest,
    format_complex,
    format_graph,
    load_input,
    parse_complex,
    parse_graph,
    read_graph,
    write_complex,
    write_graph,
)


def test_parse_graph_with_comments():
    g = parse_graph("# c4\n4\n0 1\n1 2  # edge\n\n2 3\n3 0\n")
    assert g.n == 4 and g.num_edges == 4 and g.has_edge(0, 3)


@pytest.mark.parametrize("text", [
    "", "x\n", "3\n0 1\n1 0\n", "3\n0 1 2\n", "3\n0 3\n", "3\n1 1\n", "3\n0 a\n", "-1\n",
])
def test_parse_graph_rejects(text):
    with pytest.raises(InputError):
        parse_graph(text)


def test_parse_complex():
    cx = parse_complex("3\n0 1\n0 2\n1 2\n")
    assert cx.faces() == hollow_triangle().faces()
    with pytest.raises(InputError):
        parse_complex("3\n1 0\n")
    with pytest.raises(InputError):
        parse_complex("3\n0 5\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 15).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
def test_graph_round_trip(data):
    n, raw = data
    edges = sorted({(min(u, v), max(u, v)) for u, v in raw if u != v})
    g = Graph.from_edges(n, edges)
    back = parse_graph(format_graph(g))
    assert back == g and back.edges() == edges


def test_complex_round_trip(tmp_path):
    cx = ExplicitComplex(6, [[0, 1, 2], [2, 3], [3, 4, 5], [1, 4]])
    path = tmp_path / "c.txt"
    write_complex(cx, path)
    back = load_input(complex=path)
    assert back.faces() == cx.faces()
    assert format_complex(back) == format_complex(cx)


def test_file_helpers(tmp_path):
    g = Graph.from_edges(3, [(0, 1)])
    p = tmp_path / "g.txt"
    write_graph(g, p)
    assert read_graph(p) == g
    assert load_input(graph=p).is_clique
    assert len(file_digest(p)) == 64
    with pytest.raises(InputError):
        load_input()
    with pytest.raises(InputError):
        load_input(graph=p, complex=p)
