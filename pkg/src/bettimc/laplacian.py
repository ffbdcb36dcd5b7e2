"""Entries of the combinatorial Laplacian and of ``H = I - L/n`` from local combinatorics.

Boundary convention: removing the vertex at position ``j`` of a sorted simplex
carries coefficient ``(-1)**(j+1)``. Two k-simplices sharing a (k-1)-face and not
spanning a (k+1)-simplex only meet through the lower term ``d_k^T d_k``, so their
Laplacian entry is ``(-1)**(j_sigma+1) * (-1)**(j_tau+1) = (-1)**(j_sigma+j_tau)``,
where ``j_sigma`` (``j_tau``) is the position of the vertex not in the shared face.

All values here are exact (ints and Fractions).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from bettimc.complex import Complex, Simplex, SimplexIndex
from bettimc.errors import InputError, ResourceError

DENSE_LIMIT = 4096


def _pair(complex: Complex, sigma: Iterable[int], tau: Iterable[int]) -> tuple[Simplex, Simplex, int]:
    s = complex.simplex(sigma)
    t = complex.simplex(tau)
    if len(s) != len(t):
        raise InputError(f"{s} and {t} have different dimensions")
    k = len(s) - 1
    if k < 1:
        raise InputError("Laplacian entries are defined for k >= 1")
    for x in (s, t):
        if not complex._contains(x):
            raise InputError(f"{x} is not a simplex of this complex")
    return s, t, k


def _off_diagonal(complex: Complex, s: Simplex, t: Simplex) -> int:
    common = set(s) & set(t)
    if len(common) != len(s) - 1:
        return 0
    (a,) = set(s) - common
    (b,) = set(t) - common
    if complex._contains(tuple(sorted(s + (b,)))):
        return 0
    return -1 if (s.index(a) + t.index(b)) % 2 else 1


def laplacian_entry(complex: Complex, sigma: Iterable[int], tau: Iterable[int]) -> int:
    s, t, k = _pair(complex, sigma, tau)
    if s == t:
        return complex._up_degree(s) + k + 1
    return _off_diagonal(complex, s, t)


def h_entry(complex: Complex, sigma: Iterable[int], tau: Iterable[int]) -> Fraction:
    s, t, _ = _pair(complex, sigma, tau)
    return Fraction(int(s == t)) - Fraction(laplacian_entry(complex, s, t), complex.n)


def neighbor_sign(out_pos: int, in_pos: int) -> int:
    """Sign of the H entry between simplex-graph neighbors (``H = -L/n`` off the diagonal)."""
    return 1 if (out_pos + in_pos) % 2 else -1


def column_one_norm(complex: Complex, sigma: Iterable[int]) -> Fraction:
    """1-norm of the ``sigma`` column of H: ``1 + (deg - d_up - k - 1)/n``."""
    s = complex._require_member(sigma)
    k = len(s) - 1
    if k < 1:
        raise InputError("column norms are defined for k >= 1")
    return 1 + Fraction(complex.degree(s) - complex._up_degree(s) - k - 1, complex.n)


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse signed boundary map from k-chains (columns) to (k-1)-chains (rows)."""

    rows: SimplexIndex
    cols: SimplexIndex
    entries: dict[tuple[int, int], int]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def to_dense(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros(self.shape, dtype=dtype)
        for (r, c), v in self.entries.items():
            a[r, c] = v
        return a

    def to_lists(self) -> list[list[int]]:
        a = [[0] * len(self.cols) for _ in self.rows]
        for (r, c), v in self.entries.items():
            a[r][c] = v
        return a


def boundary_matrix(complex: Complex, k: int) -> BoundaryMatrix:
    cols = complex.k_simplices(k)
    if k == 0:
        return BoundaryMatrix(SimplexIndex(-1, ()), cols, {})
    rows = complex.k_simplices(k - 1)
    entries = {}
    for c, s in enumerate(cols):
        for j in range(len(s)):
            entries[rows.index(s[:j] + s[j + 1:]), c] = -1 if j % 2 == 0 else 1
    return BoundaryMatrix(rows, cols, entries)


def _guard(size: int, limit: int | None) -> None:
    limit = DENSE_LIMIT if limit is None else limit
    if size > limit:
        raise ResourceError(f"|S_k| = {size} exceeds the dense limit {limit}")


def assemble_laplacian_dense(complex: Complex, k: int, limit: int | None = None) -> np.ndarray:
    """Integer matrix ``d_k^T d_k + d_{k+1} d_{k+1}^T`` in the canonical simplex order."""
    _guard(len(complex.k_simplices(k)), limit)
    lower = boundary_matrix(complex, k).to_dense()
    upper = boundary_matrix(complex, k + 1).to_dense()
    return lower.T @ lower + upper @ upper.T


def assemble_scaled_h(complex: Complex, k: int, limit: int | None = None) -> np.ndarray:
    """Integer matrix ``n * H = n*I - L``; divide by ``n`` for H itself."""
    lap = assemble_laplacian_dense(complex, k, limit)
    return complex.n * np.eye(lap.shape[0], dtype=np.int64) - lap


def assemble_h_dense(complex: Complex, k: int, limit: int | None = None) -> np.ndarray:
    return assemble_scaled_h(complex, k, limit) / complex.n


def laplacian_from_entries(complex: Complex, k: int, limit: int | None = None) -> np.ndarray:
    """Laplacian built entry by entry from the combinatorial formula (no boundary matrices)."""
    idx = complex.k_simplices(k)
    _guard(len(idx), limit)
    m = len(idx)
    out = np.zeros((m, m), dtype=np.int64)
    for i, s in enumerate(idx):
        out[i, i] = complex._up_degree(s) + k + 1
        for nb in complex.neighbors(s):
            out[i, idx.index(nb.tau)] = -neighbor_sign(nb.out_pos, nb.in_pos)
    return out


def write_dense_csv(matrix, path: str | Path) -> None:
    """Row-major CSV, each value rendered with 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        for row in np.asarray(matrix, dtype=object):
            w.writerow([format(float(x), ".17g") for x in row])
