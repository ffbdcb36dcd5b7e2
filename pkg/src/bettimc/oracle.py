"""Exact ground truth for desk-scale complexes.

Second moment of the path functional. Squaring ``f`` against the path density gives

    E[f^2] = 1/|S| * sum over closed paths of prod_i ||H s_i||^2 * |H[s_{i+1}, s_i]| / ||H s_i||
           = 1/|S| * sum over closed paths of prod_i |H[s_{i+1}, s_i]| * ||H s_i||
           = tr(Q^l) / |S|,   Q[t, s] = |H[t, s]| * ||H s||_1.

With ``M = n*H`` (an integer matrix), ``n^2 Q = |M| diag(colsum |M|)`` is integral too,
so traces of both ``H^l`` and ``Q^l`` are computed exactly in integers whenever the
size allows, and in float64 otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from bettimc.complex import Complex
from bettimc.errors import InputError, NumericError, ResourceError
from bettimc.laplacian import (
    DENSE_LIMIT,
    assemble_laplacian_dense,
    assemble_scaled_h,
    boundary_matrix,
)
from bettimc.walk import WalkTable, transition_profile

OBJECT_LIMIT = 96  # largest |S_k| for Python-int matrix powers when int64 could overflow
INT64_SAFE = 2**62


def integer_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(a)) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, len(a)):
            ai = a[i]
            c = ai[col]
            if c == 0 and p == prev:
                continue
            pr = a[rank]
            # exact division by the previous pivot is what keeps entries bounded
            a[i] = [(p * ai[j] - c * pr[j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
        if rank == len(a):
            break
    return rank


def _check_size(complex: Complex, k: int, limit: int | None) -> int:
    m = len(complex.k_simplices(k))
    lim = DENSE_LIMIT if limit is None else limit
    if m > lim:
        raise ResourceError(f"|S_{k}| = {m} exceeds the dense limit {lim}")
    return m


def exact_betti(complex: Complex, k: int, limit: int | None = None) -> int:
    """``|S_k| - rank d_k - rank d_{k+1}``."""
    m = _check_size(complex, k, limit)
    r_k = integer_rank(boundary_matrix(complex, k).to_lists()) if k > 0 else 0
    r_up = integer_rank(boundary_matrix(complex, k + 1).to_lists())
    return m - r_k - r_up


def _trace_power(a: np.ndarray, ell: int) -> int | None:
    """Exact ``tr(a^ell)`` for an integer matrix, or None when it is too large to do exactly."""
    m = a.shape[0]
    if m == 0:
        return 0
    col = int(np.abs(a).sum(axis=0).max()) if m else 0
    if col <= 1 or ell * math.log2(max(col, 2)) + math.log2(m) < math.log2(INT64_SAFE):
        p = a.astype(np.int64)
        acc = p.copy()
        for _ in range(ell - 1):
            acc = acc @ p
        return int(np.trace(acc))
    if m <= OBJECT_LIMIT:
        p = np.array([[int(x) for x in row] for row in a], dtype=object)
        acc = p.copy()
        for _ in range(ell - 1):
            acc = acc.dot(p)
        return int(sum(acc[i, i] for i in range(m)))
    return None


def _float_trace_power(a: np.ndarray, ell: int) -> float:
    return float(np.trace(np.linalg.matrix_power(a, ell)))


def exact_normalized_trace(complex: Complex, k: int, ell: int, limit: int | None = None) -> Fraction | float:
    """``tr((I - L/n)^l) / |S_k|``; a Fraction when computed exactly, else a float."""
    if ell < 0:
        raise InputError("path length must be non-negative")
    m = _check_size(complex, k, limit)
    if m == 0:
        raise InputError(f"the complex has no {k}-simplices")
    scaled = assemble_scaled_h(complex, k, limit)
    t = _trace_power(scaled, ell) if ell else m
    if t is not None:
        return Fraction(t, complex.n**ell * m)
    return _float_trace_power(scaled / complex.n, ell) / m


def _scaled_q(complex: Complex, k: int, limit: int | None) -> np.ndarray:
    a = np.abs(assemble_scaled_h(complex, k, limit))
    return a * a.sum(axis=0)[None, :]


def transfer_matrix(complex: Complex, k: int, limit: int | None = None) -> np.ndarray:
    """Float ``Q[t, s] = |H[t, s]| * ||H s||_1``."""
    return _scaled_q(complex, k, limit) / complex.n**2


def exact_second_moment(complex: Complex, k: int, ell: int, limit: int | None = None) -> Fraction | float:
    """``E[f^2] = tr(Q^l)/|S_k|``; a Fraction when computed exactly, else a float."""
    if ell < 1:
        raise InputError("path length must be at least 1")
    m = _check_size(complex, k, limit)
    if m == 0:
        raise InputError(f"the complex has no {k}-simplices")
    q = _scaled_q(complex, k, limit)
    t = _trace_power(q, ell)
    if t is not None:
        return Fraction(t, complex.n ** (2 * ell) * m)
    return _float_trace_power(q / complex.n**2, ell) / m


def path_moments_by_enumeration(complex: Complex, k: int, ell: int, max_paths: int = 10**6) -> tuple[Fraction, Fraction]:
    """First and second moments of the path functional by summing over every path.

    Independent of the matrix route: uses the chain's transition profiles directly.
    """
    idx = complex.k_simplices(k)
    m = len(idx)
    if m == 0:
        raise InputError(f"the complex has no {k}-simplices")
    if m ** ell > max_paths:
        raise ResourceError(f"{m}^{ell} paths exceed the enumeration limit {max_paths}")
    kernel = {}
    norms = {}
    for s in idx:
        try:
            prof = transition_profile(complex, s)
        except InputError:
            norms[s] = Fraction(0)
            kernel[s] = {}
            continue
        norms[s] = prof.column_norm
        row = {}
        if prof.stay_prob:
            row[s] = (prof.stay_prob, 1)
        for t, sg in prof.neighbors:
            row[t] = (prof.move_prob_each, sg)
        kernel[s] = row
    first = Fraction(0)
    second = Fraction(0)
    for s0 in idx:
        if norms[s0] == 0:
            continue
        # walk the closed paths s0 -> ... -> s0 of length ell; f nonzero only on those
        for mid in itertools.product(idx, repeat=ell - 1):
            path = (s0,) + mid + (s0,)
            prob = Fraction(1, m)
            f = Fraction(1)
            for a, b in zip(path, path[1:]):
                step = kernel[a].get(b)
                if step is None:
                    break
                prob *= step[0]
                f *= step[1] * norms[a]
            else:
                first += prob * f
                second += prob * f * f
    return first, second


@dataclass(frozen=True)
class MomentBounds:
    lower: Fraction
    upper: Fraction
    exact_second_moment: Fraction | float | None
    max_up_degree: int
    min_degree: int
    max_degree: int
    general_cap: Fraction  # (k+2)^(2l)
    clique_cap: Fraction  # 4^l (1 - (k+1)/n)^(2l)
    asymptotic_upper: Fraction  # (1 + max_degree/n)^(2l)
    asymptotic_lower: Fraction  # (1 + min_degree/n)^l

    def to_json(self) -> dict:
        return {k: (float(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}


def variance_bounds(complex: Complex, k: int, ell: int, table: WalkTable | None = None,
                    with_exact: bool = True, limit: int | None = None) -> MomentBounds:
    """Second-moment lower/upper bounds from column norms and up-degrees, plus reporting caps."""
    table = table or WalkTable.build(complex, k)
    m = len(table)
    if m == 0:
        raise InputError(f"the complex has no {k}-simplices")
    n = complex.n
    d_up = max(complex._up_degree(s) for s in table.index)
    lower = (1 - Fraction(d_up + k + 1, n)) ** ell * table.norm_power_mean_exact(ell)
    upper = table.norm_power_mean_exact(2 * ell)
    exact = None
    if with_exact:
        try:
            exact = exact_second_moment(complex, k, ell, limit)
        except ResourceError:
            exact = None
    degs = [int(d) for d in table.degree]
    return MomentBounds(
        lower=lower,
        upper=upper,
        exact_second_moment=exact,
        max_up_degree=d_up,
        min_degree=min(degs),
        max_degree=max(degs),
        general_cap=Fraction(k + 2) ** (2 * ell),
        clique_cap=Fraction(4) ** ell * (1 - Fraction(k + 1, n)) ** (2 * ell),
        asymptotic_upper=(1 + Fraction(max(degs), n)) ** (2 * ell),
        asymptotic_lower=(1 + Fraction(min(degs), n)) ** ell,
    )


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: tuple[float, ...]
    nullity: int
    gap: float | None  # smallest eigenvalue above the zero tolerance
    sweeps: int

    def to_json(self) -> dict:
        return {"eigenvalues": list(self.eigenvalues), "nullity": self.nullity, "gap": self.gap, "sweeps": self.sweeps}


def _round_robin(m: int) -> list[list[tuple[int, int]]]:
    """Tournament schedule: every index pair exactly once, in rounds of disjoint pairs."""
    players = list(range(m)) + ([-1] if m % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a >= 0 and b >= 0:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    # taken entrywise; sum(a^2) - sum(diag^2) cancels down to rounding noise
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100) -> tuple[np.ndarray, int]:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once; pairs are grouped into rounds of
    disjoint rotations, which commute and are applied together.
    """
    a = np.array(a, dtype=np.float64)
    m = a.shape[0]
    if m <= 1:
        return np.sort(np.diag(a)), 0
    if not np.allclose(a, a.T):
        raise InputError("matrix is not symmetric")
    scale = max(1.0, float(np.linalg.norm(a)))
    rounds = [(np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(m)]
    for sweep in range(1, max_sweeps + 1):
        off = _off_norm(a)
        if off <= tol * scale:
            return np.sort(np.diag(a)), sweep - 1
        for p, q in rounds:
            apq = a[p, q]
            live = np.abs(apq) > 1e-300
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            theta = 0.5 * np.arctan2(2 * apq, a[q, q] - a[p, p])
            c, s = np.cos(theta), np.sin(theta)
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
    off = _off_norm(a)
    if off <= tol * scale:
        return np.sort(np.diag(a)), max_sweeps
    raise NumericError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3g})")


def spectral_summary(complex: Complex, k: int, limit: int | None = None, tol: float = 1e-10,
                     max_sweeps: int = 100) -> SpectralSummary:
    lap = assemble_laplacian_dense(complex, k, limit)
    vals, sweeps = jacobi_eigenvalues(lap, tol=tol, max_sweeps=max_sweeps)
    zero = 1e-8 * complex.n
    nullity = int(np.sum(vals < zero))
    above = vals[vals >= zero]
    gap = float(above.min()) if above.size else None
    return SpectralSummary(tuple(float(v) for v in vals), nullity, gap, sweeps)


def _num(x):
    return float(x) if isinstance(x, Fraction) else x


def oracle_report(complex: Complex, k: int, ells: list[int], limit: int | None = None) -> dict:
    """JSON-ready summary: Betti number, traces and second moments per l, bounds, spectrum."""
    m = _check_size(complex, k, limit)
    betti = exact_betti(complex, k, limit)
    spectrum = spectral_summary(complex, k, limit)
    out = {
        "n": complex.n,
        "k": k,
        "num_simplices": m,
        "betti": betti,
        "normalized_betti": betti / m if m else None,
        "spectrum": spectrum.to_json(),
        "gap": spectrum.gap,
        "by_l": [],
    }
    if m and k >= 1:
        table = WalkTable.build(complex, k)
        for ell in ells:
            bounds = variance_bounds(complex, k, ell, table=table, limit=limit)
            out["by_l"].append({
                "l": ell,
                "normalized_trace": _num(exact_normalized_trace(complex, k, ell, limit)),
                "second_moment": _num(bounds.exact_second_moment),
                "bounds": bounds.to_json(),
            })
    return out
