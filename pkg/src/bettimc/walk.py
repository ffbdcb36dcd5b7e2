"""Markov chain on k-simplices with transitions ``|H[tau, sigma]| / ||H sigma||_1`` and the
signed path functional whose mean is ``tr(H^l) / |S_k|``.

Two samplers share the same kernel:

* :func:`sample_path` walks one path using only local membership queries.
* :class:`WalkTable` + :func:`sample_paths` precompute the per-simplex kernel over
  an enumerated ``S_k`` and advance many paths at once with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from bettimc.complex import Complex, Simplex, SimplexIndex
from bettimc.errors import InputError
from bettimc.laplacian import column_one_norm, neighbor_sign


class DegenerateColumn(InputError):
    """The H column of the state is zero, so the kernel is undefined there."""


@dataclass(frozen=True)
class TransitionProfile:
    sigma: Simplex
    column_norm: Fraction
    stay_prob: Fraction
    move_prob_each: Fraction
    neighbors: tuple[tuple[Simplex, int], ...]  # (tau, sign of H[tau, sigma])

    @property
    def degree(self) -> int:
        return len(self.neighbors)


@dataclass(frozen=True)
class WalkConfig:
    k: int
    ell: int
    seed: int = 0

    def __post_init__(self):
        if self.ell < 1:
            raise InputError("path length must be at least 1")
        if self.k < 1:
            raise InputError("dimension k must be at least 1")


@dataclass(frozen=True)
class PathSample:
    start: Simplex
    end: Simplex
    length: int
    f_value: float
    closed: bool


def transition_profile(complex: Complex, sigma) -> TransitionProfile:
    s = complex._require_member(sigma)
    k = len(s) - 1
    n = complex.n
    norm = column_one_norm(complex, s)
    if norm == 0:
        raise DegenerateColumn(f"H column of {s} is zero")
    nbrs = complex.neighbors(s)
    d_up = complex._up_degree(s)
    # n * ||H sigma||_1; the stay numerator is the diagonal n*H[s,s] = n - d_up - k - 1
    denom = n + len(nbrs) - d_up - k - 1
    return TransitionProfile(
        sigma=s,
        column_norm=norm,
        stay_prob=Fraction(n - d_up - k - 1, denom),
        move_prob_each=Fraction(1, denom),
        neighbors=tuple((nb.tau, neighbor_sign(nb.out_pos, nb.in_pos)) for nb in nbrs),
    )


def evaluate_f(states: Sequence[Simplex], signs: Sequence[int], norms: Sequence[float]) -> float:
    """Path functional for states ``s_0..s_l`` with step signs and column norms at ``s_0..s_{l-1}``."""
    if len(states) != len(signs) + 1 or len(norms) != len(signs):
        raise InputError("need l+1 states, l signs and l column norms")
    if states[-1] != states[0]:
        return 0.0
    f = 1.0
    for sg, nm in zip(signs, norms):
        f *= sg * nm
    return f


def sample_path(
    complex: Complex,
    cfg: WalkConfig,
    sigma0,
    rng: np.random.Generator,
    trace: Callable[[str], None] | None = None,
) -> PathSample:
    """Walk ``cfg.ell`` kernel steps from ``sigma0`` and evaluate the path functional.

    ``trace`` receives one line per step (index, simplex, sign, column norm).
    """
    s0 = complex._require_member(sigma0)
    if len(s0) != cfg.k + 1:
        raise InputError(f"{s0} is not a {cfg.k}-simplex")
    if column_one_norm(complex, s0) == 0:
        return PathSample(s0, s0, cfg.ell, 0.0, True)
    cur = s0
    states, signs, norms = [s0], [], []
    for i in range(cfg.ell):
        prof = transition_profile(complex, cur)
        u = rng.random()
        if u < float(prof.stay_prob) or prof.degree == 0:
            nxt, sign = cur, 1
        else:
            j = min(int((u - float(prof.stay_prob)) / float(prof.move_prob_each)), prof.degree - 1)
            nxt, sign = prof.neighbors[j]
        if trace is not None:
            trace(f"{i}\t{' '.join(map(str, cur))}\t{sign:+d}\t{float(prof.column_norm):.17g}")
        signs.append(sign)
        norms.append(float(prof.column_norm))
        states.append(nxt)
        cur = nxt
    f = evaluate_f(states, signs, norms)
    return PathSample(s0, cur, cfg.ell, f, cur == s0)


@dataclass(frozen=True)
class WalkTable:
    """Kernel of the chain tabulated over ``S_k`` (positions follow ``index``)."""

    index: SimplexIndex
    norm: np.ndarray  # column 1-norms
    norm_exact: tuple[Fraction, ...]
    stay: np.ndarray  # stay probability; 1 for zero-norm columns
    move: np.ndarray  # probability of each individual move
    degree: np.ndarray
    nbr: np.ndarray  # (|S_k|, max_degree) neighbor positions, -1 padded
    nbr_sign: np.ndarray  # matching signs of H entries

    @classmethod
    def build(cls, complex: Complex, k: int) -> WalkTable:
        if k < 1:
            raise InputError("dimension k must be at least 1")
        idx = complex.k_simplices(k)
        m = len(idx)
        n = complex.n
        profiles = [complex.neighbors(s) for s in idx]
        width = max((len(p) for p in profiles), default=0)
        nbr = np.full((m, max(width, 1)), -1, dtype=np.int64)
        sgn = np.zeros((m, max(width, 1)), dtype=np.int8)
        norm_exact = []
        stay = np.ones(m)
        move = np.zeros(m)
        deg = np.zeros(m, dtype=np.int64)
        for i, (s, nbrs) in enumerate(zip(idx, profiles)):
            d_up = complex._up_degree(s)
            denom = n + len(nbrs) - d_up - k - 1
            norm_exact.append(Fraction(denom, n))
            deg[i] = len(nbrs)
            for j, nb in enumerate(nbrs):
                nbr[i, j] = idx.index(nb.tau)
                sgn[i, j] = neighbor_sign(nb.out_pos, nb.in_pos)
            if denom > 0:
                stay[i] = (n - d_up - k - 1) / denom
                move[i] = 1.0 / denom
        return cls(idx, np.array([float(x) for x in norm_exact]), tuple(norm_exact), stay, move, deg, nbr, sgn)

    def __len__(self) -> int:
        return len(self.index)

    def norm_power_mean_exact(self, power: int) -> Fraction:
        return sum((x**power for x in self.norm_exact), Fraction(0)) / len(self.norm_exact)


def sample_paths(table: WalkTable, ell: int, starts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Path functional values for one path per entry of ``starts`` (positions into S_k).

    Consumes exactly ``ell * len(starts)`` uniforms from ``rng``.
    """
    starts = np.asarray(starts, dtype=np.int64)
    cur = starts.copy()
    f = np.ones(len(starts))
    for _ in range(ell):
        u = rng.random(len(starts))
        f *= table.norm[cur]
        stay = table.stay[cur]
        moving = u >= stay
        if moving.any():
            c = cur[moving]
            j = ((u[moving] - stay[moving]) / table.move[c]).astype(np.int64)
            j = np.minimum(j, table.degree[c] - 1)
            f[moving] *= table.nbr_sign[c, j]
            cur[moving] = table.nbr[c, j]
    f[cur != starts] = 0.0
    return f
