"""Plain-text graph and complex files.

Graph file: first line ``n``, then one ``u v`` edge per line (0-based, undirected).
Complex file: first line ``n``, then one maximal simplex per line as sorted vertex ids.
Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterator

from bettimc.complex import Complex, ExplicitComplex, Graph
from bettimc.errors import InputError


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _header(rows: Iterator[tuple[int, list[str]]], what: str) -> int:
    try:
        lineno, toks = next(rows)
    except StopIteration:
        raise InputError(f"empty {what} file") from None
    if len(toks) != 1:
        raise InputError(f"line {lineno}: expected vertex count")
    try:
        n = int(toks[0])
    except ValueError:
        raise InputError(f"line {lineno}: bad vertex count {toks[0]!r}") from None
    if n < 0:
        raise InputError(f"line {lineno}: negative vertex count")
    return n


def _ints(lineno: int, toks: list[str]) -> list[int]:
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise InputError(f"line {lineno}: non-integer token in {' '.join(toks)!r}") from None


def parse_graph(text: str) -> Graph:
    rows = _lines(text)
    n = _header(rows, "graph")
    edges = []
    seen = set()
    for lineno, toks in rows:
        if len(toks) != 2:
            raise InputError(f"line {lineno}: expected 'u v'")
        u, v = _ints(lineno, toks)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InputError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((u, v))
    try:
        return Graph.from_edges(n, edges)
    except InputError as exc:
        raise InputError(f"invalid graph: {exc}") from None


def format_graph(g: Graph) -> str:
    return "".join([f"{g.n}\n"] + [f"{u} {v}\n" for u, v in g.edges()])


def parse_complex(text: str) -> ExplicitComplex:
    rows = _lines(text)
    n = _header(rows, "complex")
    maximal = []
    for lineno, toks in rows:
        vs = _ints(lineno, toks)
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise InputError(f"line {lineno}: simplex vertices must be strictly increasing")
        maximal.append(vs)
    return ExplicitComplex(n, maximal)


def format_complex(cx: ExplicitComplex) -> str:
    return "".join([f"{cx.n}\n"] + [" ".join(map(str, s)) + "\n" for s in cx.maximal])


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


def read_complex(path: str | Path) -> ExplicitComplex:
    return parse_complex(Path(path).read_text(encoding="utf-8"))


def write_complex(cx: ExplicitComplex, path: str | Path) -> None:
    Path(path).write_text(format_complex(cx), encoding="utf-8")


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_input(*, graph: str | Path | None = None, complex: str | Path | None = None) -> Complex:
    from bettimc.complex import CliqueComplex

    if (graph is None) == (complex is None):
        raise InputError("give exactly one of a graph file or a complex file")
    if graph is not None:
        return CliqueComplex(read_graph(graph))
    return read_complex(complex)
