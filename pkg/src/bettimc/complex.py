"""Simplicial complexes backed by a graph (clique complexes) or by an explicit face list.

Simplices are plain tuples of strictly increasing vertex ids. Lexicographic order
on these tuples is the canonical order used for indexing and output.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from bettimc.errors import InputError

Simplex = tuple[int, ...]


def as_simplex(vs: Iterable[int], n: int) -> Simplex:
    """Normalize ``vs`` to a sorted tuple, validating ids against ``n``."""
    s = tuple(sorted(int(v) for v in vs))
    if not s:
        raise InputError("a simplex needs at least one vertex")
    if s[0] < 0 or s[-1] >= n:
        raise InputError(f"vertex id out of range [0, {n}): {s}")
    if any(a == b for a, b in zip(s, s[1:])):
        raise InputError(f"duplicate vertex in simplex {s}")
    return s


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Undirected simple graph on vertices ``0..n-1`` stored as per-vertex bitsets."""

    __slots__ = ("n", "_adj")

    def __init__(self, n: int, adjacency: Sequence[int] | None = None):
        if n < 0:
            raise InputError("vertex count must be non-negative")
        self.n = n
        adj = tuple(adjacency) if adjacency is not None else (0,) * n
        if len(adj) != n:
            raise InputError("adjacency must have one row per vertex")
        full = (1 << n) - 1
        for v, row in enumerate(adj):
            if row & ~full:
                raise InputError(f"vertex {v} adjacent to an id outside [0, {n})")
            if row >> v & 1:
                raise InputError(f"self-loop at vertex {v}")
            for u in _iter_bits(row):
                if not adj[u] >> v & 1:
                    raise InputError(f"adjacency not symmetric at ({v}, {u})")
        self._adj = adj

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], *, allow_duplicates: bool = False) -> Graph:
        adj = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) has a vertex outside [0, {n})")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if adj[u] >> v & 1 and not allow_duplicates:
                raise InputError(f"duplicate edge ({u}, {v})")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, adj)

    @classmethod
    def from_dense(cls, matrix) -> Graph:
        a = np.asarray(matrix)
        n = a.shape[0]
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if a[i, j]]
        return cls.from_edges(n, edges)

    def adjacency_mask(self, v: int) -> int:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(_iter_bits(self._adj[v]))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _iter_bits(self._adj[u] >> (u + 1) << (u + 1))]

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self._adj) // 2

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


class Neighbor(NamedTuple):
    """A simplex-graph neighbor ``tau`` of ``sigma``.

    ``out_pos`` is the position within sorted ``sigma`` of the vertex that is
    dropped, ``in_pos`` the position within sorted ``tau`` of the vertex added.
    """

    tau: Simplex
    out_pos: int
    in_pos: int


@dataclass(frozen=True)
class SimplexIndex:
    """All k-simplices of a complex in lexicographic order, with reverse lookup."""

    k: int
    items: tuple[Simplex, ...]
    _pos: dict[Simplex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {s: i for i, s in enumerate(self.items)})

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.items)

    def __getitem__(self, i: int) -> Simplex:
        return self.items[i]

    def __contains__(self, s: object) -> bool:
        return s in self._pos

    def index(self, s: Simplex) -> int:
        try:
            return self._pos[s]
        except KeyError:
            raise InputError(f"{s} is not a {self.k}-simplex of this complex") from None

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Uniform draw(s) of positions into ``items``."""
        if not self.items:
            raise InputError(f"no {self.k}-simplices to sample from")
        return rng.integers(0, len(self.items), size=size)


class Complex(ABC):
    """Membership/enumeration interface shared by clique and explicit complexes."""

    n: int
    kind: str

    def __init__(self):
        self._nbr_cache: dict[Simplex, tuple[Neighbor, ...]] = {}
        self._index_cache: dict[int, SimplexIndex] = {}

    @property
    def is_clique(self) -> bool:
        return self.kind == "clique"

    def simplex(self, vs: Iterable[int]) -> Simplex:
        return as_simplex(vs, self.n)

    @abstractmethod
    def _contains(self, s: Simplex) -> bool: ...

    @abstractmethod
    def _enumerate(self, k: int) -> list[Simplex]: ...

    @abstractmethod
    def _up_degree(self, s: Simplex) -> int: ...

    @abstractmethod
    def _neighbors(self, s: Simplex) -> list[Neighbor]: ...

    def contains(self, vs: Iterable[int]) -> bool:
        return self._contains(self.simplex(vs))

    def k_simplices(self, k: int) -> SimplexIndex:
        if k < 0:
            raise InputError("dimension k must be non-negative")
        idx = self._index_cache.get(k)
        if idx is None:
            idx = SimplexIndex(k, tuple(self._enumerate(k)))
            self._index_cache[k] = idx
        return idx

    def _require_member(self, vs: Iterable[int]) -> Simplex:
        s = self.simplex(vs)
        if not self._contains(s):
            raise InputError(f"{s} is not a simplex of this complex")
        return s

    def up_degree(self, vs: Iterable[int]) -> int:
        return self._up_degree(self._require_member(vs))

    def neighbors(self, vs: Iterable[int]) -> tuple[Neighbor, ...]:
        s = self._require_member(vs)
        cached = self._nbr_cache.get(s)
        if cached is None:
            cached = tuple(sorted(self._neighbors(s)))
            self._nbr_cache[s] = cached
        return cached

    def degree(self, vs: Iterable[int]) -> int:
        """Degree of ``vs`` in the simplex graph of its dimension."""
        return len(self.neighbors(vs))


def _swap(s: Simplex, out_pos: int, x: int) -> Neighbor:
    rest = s[:out_pos] + s[out_pos + 1:]
    # position of x among the remaining vertices
    in_pos = sum(1 for v in rest if v < x)
    tau = rest[:in_pos] + (x,) + rest[in_pos:]
    return Neighbor(tau, out_pos, in_pos)


class CliqueComplex(Complex):
    """Clique complex of a graph. Membership is evaluated lazily from adjacency bitsets."""

    kind = "clique"

    def __init__(self, graph: Graph):
        super().__init__()
        self.graph = graph
        self.n = graph.n

    def _mask(self, s: Simplex) -> int:
        m = 0
        for v in s:
            m |= 1 << v
        return m

    def _contains(self, s: Simplex) -> bool:
        m = self._mask(s)
        adj = self.graph.adjacency_mask
        return all((m & ~(1 << v)) & ~adj(v) == 0 for v in s)

    def _enumerate(self, k: int) -> list[Simplex]:
        adj = [self.graph.adjacency_mask(v) for v in range(self.n)]
        out: list[Simplex] = []
        size = k + 1

        def extend(prefix: tuple[int, ...], cand: int) -> None:
            if len(prefix) == size:
                out.append(prefix)
                return
            need = size - len(prefix)
            while cand:
                if cand.bit_count() < need:
                    return
                low = cand & -cand
                v = low.bit_length() - 1
                cand ^= low
                # only higher ids keep the output sorted and duplicate-free
                extend(prefix + (v,), cand & adj[v])

        extend((), (1 << self.n) - 1)
        return out

    def _common_mask(self, s: Simplex) -> int:
        m = (1 << self.n) - 1
        for v in s:
            m &= self.graph.adjacency_mask(v)
        return m

    def _up_degree(self, s: Simplex) -> int:
        return self._common_mask(s).bit_count()

    def _neighbors(self, s: Simplex) -> list[Neighbor]:
        k = len(s) - 1
        sm = self._mask(s)
        out = []
        for x in range(self.n):
            if sm >> x & 1:
                continue
            hit = self.graph.adjacency_mask(x) & sm
            if hit.bit_count() == k:
                missing = (sm & ~hit).bit_length() - 1
                out.append(_swap(s, s.index(missing), x))
        return out

    def __repr__(self) -> str:
        return f"CliqueComplex({self.graph!r})"


class ExplicitComplex(Complex):
    """Complex generated by a list of maximal simplices, closed downward on construction."""

    kind = "explicit"

    def __init__(self, n: int, maximal: Iterable[Iterable[int]]):
        super().__init__()
        self.n = n
        faces: set[Simplex] = set()
        gens = []
        for m in maximal:
            s = as_simplex(m, n)
            gens.append(s)
            if s in faces:
                continue
            for r in range(1, len(s) + 1):
                faces.update(itertools.combinations(s, r))
        self.maximal = tuple(gens)
        self._faces = frozenset(faces)
        by_dim: dict[int, list[Simplex]] = {}
        for f in faces:
            by_dim.setdefault(len(f) - 1, []).append(f)
        self._by_dim = {d: sorted(v) for d, v in by_dim.items()}

    @property
    def dimension(self) -> int:
        return max(self._by_dim, default=-1)

    def faces(self) -> frozenset[Simplex]:
        return self._faces

    def _contains(self, s: Simplex) -> bool:
        return s in self._faces

    def _enumerate(self, k: int) -> list[Simplex]:
        return list(self._by_dim.get(k, ()))

    def _cofaces_vertices(self, s: Simplex) -> list[int]:
        return [x for x in range(self.n) if x not in s and tuple(sorted(s + (x,))) in self._faces]

    def _up_degree(self, s: Simplex) -> int:
        return len(self._cofaces_vertices(s))

    def _neighbors(self, s: Simplex) -> list[Neighbor]:
        out = []
        for x in range(self.n):
            if x in s or tuple(sorted(s + (x,))) in self._faces:
                continue
            for j in range(len(s)):
                nb = _swap(s, j, x)
                if nb.tau in self._faces:
                    out.append(nb)
        return out

    def __repr__(self) -> str:
        return f"ExplicitComplex(n={self.n}, maximal={len(self.maximal)})"


def contains(complex: Complex, vs: Iterable[int]) -> bool:
    return complex.contains(vs)


def enumerate_k_simplices(complex: Complex, k: int) -> SimplexIndex:
    return complex.k_simplices(k)


def up_degree(complex: Complex, sigma: Iterable[int]) -> int:
    return complex.up_degree(sigma)


def simplex_graph_neighbors(complex: Complex, sigma: Iterable[int]) -> list[Neighbor]:
    """Neighbors of ``sigma`` in the simplex graph: same dimension, sharing all but
    one vertex, and not jointly contained in a higher simplex."""
    return list(complex.neighbors(sigma))


def generate_complete_partite(k: int, m: int) -> Graph:
    """Complete (k+1)-partite graph with ``m`` vertices per part; vertex ``v`` is in part ``v % (k+1)``."""
    if k < 0 or m < 1:
        raise InputError("need k >= 0 and m >= 1")
    parts = k + 1
    n = m * parts
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n) if u % parts != v % parts))


def generate_disjoint_cliques(m: int, k: int) -> Graph:
    """Disjoint union of ``m`` cliques on ``k+1`` vertices each (blocks of consecutive ids)."""
    if k < 0 or m < 1:
        raise InputError("need m >= 1 and k >= 0")
    size = k + 1
    edges = [
        (b * size + i, b * size + j)
        for b in range(m)
        for i in range(size)
        for j in range(i + 1, size)
    ]
    return Graph.from_edges(m * size, edges)
