"""Shared brute-force references built without the package's own enumeration or assembly code."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from bettimc.complex import CliqueComplex, ExplicitComplex, Graph
from bettimc.fixtures import FIXTURES, get_fixture


def brute_simplices(cx, k: int) -> list[tuple[int, ...]]:
    return [s for s in itertools.combinations(range(cx.n), k + 1) if cx.contains(s)]


def brute_boundary(cx, k: int) -> np.ndarray:
    """Rows S_{k-1}, columns S_k, coefficient (-1)^(j+1) for dropping position j."""
    cols = brute_simplices(cx, k)
    rows = brute_simplices(cx, k - 1) if k >= 1 else []
    pos = {r: i for i, r in enumerate(rows)}
    b = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for c, s in enumerate(cols):
        for j in range(len(s)):
            b[pos[s[:j] + s[j + 1:]], c] = (-1) ** (j + 1)
    return b


def brute_laplacian(cx, k: int) -> np.ndarray:
    down = brute_boundary(cx, k)
    up = brute_boundary(cx, k + 1)
    m = len(brute_simplices(cx, k))
    lap = np.zeros((m, m), dtype=np.int64)
    if down.size:
        lap += down.T @ down
    if up.size:
        lap += up @ up.T
    return lap


def brute_h(cx, k: int) -> list[list[Fraction]]:
    lap = brute_laplacian(cx, k)
    m = lap.shape[0]
    return [[Fraction(int(i == j)) - Fraction(int(lap[i, j]), cx.n) for j in range(m)] for i in range(m)]


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_explicit(n: int, n_max: int, max_dim: int, seed: int) -> ExplicitComplex:
    rng = np.random.default_rng(seed)
    gens = []
    for _ in range(n_max):
        size = int(rng.integers(1, max_dim + 2))
        gens.append(sorted(rng.choice(n, size=size, replace=False).tolist()))
    return ExplicitComplex(n, gens)


def er_instances(count: int = 100, seed: int = 2024):
    """(label, complex, k) over n in [8, 12], p in {0.4, 0.6, 0.8}, k in {1, 2, 3}."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(8, 13))
        p = [0.4, 0.6, 0.8][i % 3]
        k = 1 + (i // 3) % 3
        out.append((f"er{i}(n={n},p={p},k={k})", CliqueComplex(random_graph(n, p, int(rng.integers(1 << 30)))), k))
    return out


def fixture_instances():
    return [(name, get_fixture(name), k) for name, (_, k) in FIXTURES.items()]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines, printed once at the end of the session
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
