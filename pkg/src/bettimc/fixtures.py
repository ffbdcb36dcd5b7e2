"""Small named complexes with known homology, used by tests and the CLI."""

from __future__ import annotations

from typing import Callable

from bettimc.complex import (
    CliqueComplex,
    Complex,
    ExplicitComplex,
    Graph,
    generate_complete_partite,
    generate_disjoint_cliques,
)


def hollow_triangle() -> ExplicitComplex:
    return ExplicitComplex(3, [(0, 1), (0, 2), (1, 2)])


def filled_triangle() -> CliqueComplex:
    return CliqueComplex(Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)]))


def c4() -> CliqueComplex:
    """4-cycle 0-1-2-3-0, which is K_{2,2} with parts {0,2} and {1,3}."""
    return CliqueComplex(generate_complete_partite(1, 2))


def octahedron() -> CliqueComplex:
    return CliqueComplex(generate_complete_partite(2, 2))


def disjoint_triangles() -> CliqueComplex:
    return CliqueComplex(generate_disjoint_cliques(2, 2))


FIXTURES: dict[str, tuple[Callable[[], Complex], int]] = {
    # name -> (constructor, natural dimension k)
    "hollow-triangle": (hollow_triangle, 1),
    "k3": (filled_triangle, 1),
    "c4": (c4, 1),
    "octahedron": (octahedron, 2),
    "disjoint-triangles": (disjoint_triangles, 2),
}


def get_fixture(name: str) -> Complex:
    return FIXTURES[name][0]()
