"""Erdős–Rényi ensembles and finite-n diagnostics for their simplex-graph degrees.

Two ensembles:

* ``G(n, p)``: every vertex pair independently with probability ``p``.
* ``G(n, k, p)``: ``k+1`` equal parts (vertex ``v`` in part ``v % (k+1)``), cross-part
  pairs independently with probability ``p``, same-part pairs never.

The diagnostics pool k-cliques over many independently drawn graphs. Pooling every
clique of every graph keeps the pooled histogram an unbiased estimate of the
per-clique marginal; within-graph dependence is handled by clustering standard
errors by graph.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import stats as sps

from bettimc.complex import CliqueComplex, Graph
from bettimc.errors import InputError


@dataclass(frozen=True)
class ErConfig:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InputError("n must be non-negative")
        if not 0 <= self.p <= 1:
            raise InputError("p must lie in [0, 1]")


@dataclass(frozen=True)
class PartiteErConfig:
    n: int
    k: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise InputError("k must be non-negative")
        if self.n < 0 or self.n % (self.k + 1):
            raise InputError(f"n={self.n} is not divisible into {self.k + 1} equal parts")
        if not 0 <= self.p <= 1:
            raise InputError("p must lie in [0, 1]")


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def gen_gnp(cfg: ErConfig) -> Graph:
    rng = _rng(cfg.seed)
    iu, ju = np.triu_indices(cfg.n, 1)
    keep = rng.random(iu.size) < cfg.p
    return Graph.from_edges(cfg.n, zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_partite(cfg: PartiteErConfig) -> Graph:
    rng = _rng(cfg.seed)
    parts = cfg.k + 1
    iu, ju = np.triu_indices(cfg.n, 1)
    cross = (iu % parts) != (ju % parts)
    iu, ju = iu[cross], ju[cross]
    keep = rng.random(iu.size) < cfg.p
    return Graph.from_edges(cfg.n, zip(iu[keep].tolist(), ju[keep].tolist()))


@dataclass
class DegreeDiagnostics:
    quantity: str
    histogram: dict[int, int]
    samples: int
    graphs: int
    reference: dict
    expected: dict[int, float] = field(default_factory=dict)
    chi2: float | None = None
    chi2_adjusted: float | None = None
    design_effect: float | None = None
    dof: int | None = None
    p_value: float | None = None
    mean: float | None = None
    mean_se: float | None = None
    mean_z: float | None = None
    mean_p_value: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.samples == 0

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "samples": self.samples,
            "graphs": self.graphs,
            "vacuous": self.vacuous,
            "reference": self.reference,
            "chi2": self.chi2,
            "chi2_adjusted": self.chi2_adjusted,
            "design_effect": self.design_effect,
            "dof": self.dof,
            "p_value": self.p_value,
            "mean": self.mean,
            "mean_se": self.mean_se,
            "mean_z": self.mean_z,
            "mean_p_value": self.mean_p_value,
            **self.extra,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "observed", "expected"])
        for v in sorted(set(self.histogram) | set(self.expected)):
            w.writerow([v, self.histogram.get(v, 0), format(self.expected.get(v, 0.0), ".17g")])
        return buf.getvalue()


def _merge_bins(expected: dict[int, float], min_expected: float) -> list[list[int]]:
    """Group the support into bins: thin tails fold inward, thin interior bins join the right."""
    bins: list[list[int]] = [[v] for v in sorted(expected)]

    def mass(b):
        return sum(expected[v] for v in b)

    while len(bins) > 1 and mass(bins[0]) < min_expected:
        bins[1] = bins[0] + bins[1]
        bins.pop(0)
    while len(bins) > 1 and mass(bins[-1]) < min_expected:
        bins[-2] = bins[-2] + bins[-1]
        bins.pop()
    i = 0
    while i < len(bins) - 1:
        if mass(bins[i]) < min_expected:
            bins[i + 1] = bins[i] + bins[i + 1]
            bins.pop(i)
        else:
            i += 1
    return bins


@dataclass(frozen=True)
class ChiSquare:
    statistic: float  # plain Pearson statistic
    dof: int
    design_effect: float  # Rao-Scott scale divisor; 1 without clusters
    adjusted: float  # statistic / design_effect
    effective_dof: float
    p_value: float  # adjusted statistic against chi2(effective_dof)
    expected: dict[int, float]


def chi_square(
    observed: dict[int, int],
    pmf: dict[int, float],
    total: int,
    min_expected: float = 5.0,
    clusters: list[dict[int, int]] | None = None,
) -> ChiSquare:
    """Goodness-of-fit of pooled counts against ``pmf``.

    With ``clusters`` (one histogram per independent graph) the statistic gets the
    second-order Rao-Scott correction computed from the between-graph covariance of
    the binned proportions.
    """
    expected = {v: pmf[v] * total for v in pmf}
    for v, c in observed.items():
        if c and v not in expected:
            raise InputError(f"observed value {v} has zero reference probability")
    bins = _merge_bins(expected, min_expected)
    if len(bins) < 2:
        return ChiSquare(0.0, 0, 1.0, 0.0, 0.0, 1.0, expected)
    obs = np.array([sum(observed.get(v, 0) for v in b) for b in bins], dtype=float)
    pi = np.array([sum(pmf[v] for v in b) for b in bins])
    pi /= pi.sum()
    n = obs.sum()
    stat = float(np.sum((obs - n * pi) ** 2 / (n * pi)))
    dof = len(bins) - 1
    deff, eff_dof = 1.0, float(dof)
    if clusters is not None and len(clusters) > 1:
        # second-order Rao-Scott: match the first two moments of the statistic under
        # the graph-clustered covariance of the binned proportions
        per = np.array([[sum(c.get(v, 0) for v in b) for b in bins] for c in clusters], dtype=float)
        sizes = per.sum(axis=1)
        phat = per.sum(axis=0) / n
        g = len(clusters)
        resid = (per - np.outer(sizes, phat))[:, :-1] / n
        v_cluster = g / (g - 1) * resid.T @ resid
        pr = pi[:-1]
        v_multinomial = (np.diag(pr) - np.outer(pr, pr)) / n
        d = np.linalg.solve(v_multinomial, v_cluster)
        tr1 = float(np.trace(d))
        tr2 = float(np.trace(d @ d))
        if tr1 > 0:
            deff = tr1 / dof
            a2 = max(tr2 / (dof * deff**2) - 1.0, 0.0)
            eff_dof = dof / (1 + a2)
            deff *= 1 + a2
    adjusted = stat / deff
    return ChiSquare(stat, dof, deff, adjusted, eff_dof, float(sps.chi2.sf(adjusted, eff_dof)), expected)


def _cluster_mean(per_graph: list[tuple[int, float]]):
    """Pooled mean of per-graph (count, sum) pairs with a graph-clustered standard error."""
    counts = np.array([c for c, _ in per_graph], dtype=float)
    sums = np.array([s for _, s in per_graph], dtype=float)
    total = counts.sum()
    mean = sums.sum() / total
    g = len(per_graph)
    if g < 2:
        return mean, math.inf
    resid = sums - mean * counts
    se = math.sqrt(g / (g - 1) * float(np.dot(resid, resid))) / total
    return mean, se


def _sample_cliques(cx: CliqueComplex, k: int, max_samples: int | None, rng: np.random.Generator):
    idx = cx.k_simplices(k)
    if max_samples is None or len(idx) <= max_samples:
        return list(idx)
    pick = np.sort(rng.choice(len(idx), size=max_samples, replace=False))
    return [idx[i] for i in pick]


def _as_graph_list(graphs: Graph | Iterable[Graph]) -> list[Graph]:
    return [graphs] if isinstance(graphs, Graph) else list(graphs)


def clique_degree_diagnostics(
    graphs: Graph | Iterable[Graph],
    k: int,
    p: float,
    max_samples: int | None = None,
    rng=None,
) -> DegreeDiagnostics:
    """Simplex-graph degree of k-cliques against ``Binom(n-k-1, p^k)``.

    ``max_samples`` caps the cliques taken per graph (uniform without replacement).
    """
    glist = _as_graph_list(graphs)
    if not glist:
        raise InputError("no graphs given")
    n = glist[0].n
    rng = _rng(rng)
    trials, q = n - k - 1, p**k
    d = trials * q
    hist: dict[int, int] = {}
    per_graph = []
    clusters: list[dict[int, int]] = []
    min_event = []
    for g in glist:
        cx = CliqueComplex(g)
        cliques = _sample_cliques(cx, k, max_samples, rng)
        if not cliques:
            continue
        degs = [cx.degree(s) for s in cliques]
        local: dict[int, int] = {}
        for x in degs:
            local[x] = local.get(x, 0) + 1
            hist[x] = hist.get(x, 0) + 1
        clusters.append(local)
        per_graph.append((len(degs), float(sum(degs))))
        min_event.append(min(cx.degree(s) for s in cx.k_simplices(k)) >= d / 2)
    total = sum(hist.values())
    diag = DegreeDiagnostics(
        quantity="degree",
        histogram=hist,
        samples=total,
        graphs=len(per_graph),
        reference={"distribution": "binomial", "trials": trials, "prob": q, "mean": d},
        extra={"d": d, "min_degree_at_least_half_d_fraction": (sum(min_event) / len(min_event)) if min_event else None},
    )
    if total == 0:
        return diag
    pmf = {i: float(sps.binom.pmf(i, trials, q)) for i in range(trials + 1)}
    _fill_chi_square(diag, chi_square(hist, pmf, total, clusters=clusters))
    _fill_mean_test(diag, per_graph, d)
    return diag


def _fill_chi_square(diag: DegreeDiagnostics, res: ChiSquare) -> None:
    diag.chi2, diag.chi2_adjusted, diag.design_effect = res.statistic, res.adjusted, res.design_effect
    diag.dof, diag.p_value, diag.expected = res.dof, res.p_value, res.expected
    diag.extra["effective_dof"] = res.effective_dof


def _fill_mean_test(diag: DegreeDiagnostics, per_graph, mu: float) -> None:
    mean, se = _cluster_mean(per_graph)
    diag.mean, diag.mean_se = mean, se
    if se > 0 and math.isfinite(se):
        diag.mean_z = (mean - mu) / se
        diag.mean_p_value = float(2 * sps.norm.sf(abs(diag.mean_z)))
    else:
        diag.mean_z = 0.0 if mean == mu else math.inf
        diag.mean_p_value = 1.0 if mean == mu else 0.0


def step_probabilities(k: int, p: float) -> tuple[float, float, float]:
    """(P(+1), P(-1), P(0)) for one outside vertex's contribution to ``deg - d_up``."""
    up = (k + 1) * p**k * (1 - p)
    down = p ** (k + 1)
    return up, down, 1 - up - down


def deg_minus_updeg_pmf(n: int, k: int, p: float) -> dict[int, float]:
    """Exact distribution of a sum of ``n-k-1`` i.i.d. {-1, 0, +1} steps."""
    up, down, zero = step_probabilities(k, p)
    trials = n - k - 1
    dist = np.array([1.0])
    step = np.array([down, zero, up])  # values -1, 0, +1
    for _ in range(trials):
        dist = np.convolve(dist, step)
    return {v - trials: float(w) for v, w in enumerate(dist) if w > 0}


def mu_deg_minus_updeg(n: int, k: int, p: float) -> float:
    return (n - k - 1) * p**k * ((k + 1) - (k + 2) * p)


def deg_minus_updeg_diagnostics(
    graphs: Graph | Iterable[Graph],
    k: int,
    p: float,
    max_samples: int | None = None,
    rng=None,
    window: float | None = None,
) -> DegreeDiagnostics:
    """``deg - d_up`` over k-cliques of G(n, p) against the three-point sum model.

    ``window`` defaults to ``n / sqrt(ln n)``; the fraction of graphs in which every
    clique lies within ``window`` of the mean is reported.
    """
    glist = _as_graph_list(graphs)
    if not glist:
        raise InputError("no graphs given")
    n = glist[0].n
    rng = _rng(rng)
    mu = mu_deg_minus_updeg(n, k, p)
    if window is None:
        window = n / math.sqrt(math.log(n)) if n > 1 else math.inf
    hist: dict[int, int] = {}
    per_graph = []
    clusters: list[dict[int, int]] = []
    within = 0
    inside_graphs = []
    for g in glist:
        cx = CliqueComplex(g)
        cliques = _sample_cliques(cx, k, max_samples, rng)
        if not cliques:
            continue
        vals = [cx.degree(s) - cx.up_degree(s) for s in cliques]
        local: dict[int, int] = {}
        for x in vals:
            local[x] = local.get(x, 0) + 1
            hist[x] = hist.get(x, 0) + 1
        clusters.append(local)
        close = [abs(x - mu) <= window for x in vals]
        within += sum(close)
        inside_graphs.append(all(close))
        per_graph.append((len(vals), float(sum(vals))))
    total = sum(hist.values())
    up, down, zero = step_probabilities(k, p)
    diag = DegreeDiagnostics(
        quantity="deg_minus_up_degree",
        histogram=hist,
        samples=total,
        graphs=len(per_graph),
        reference={"distribution": "three-point sum", "terms": n - k - 1, "p_plus": up, "p_minus": down, "p_zero": zero, "mean": mu},
        extra={
            "mu": mu,
            "window": window,
            "within_window_fraction": within / total if total else None,
            "graphs_all_within_window_fraction": sum(inside_graphs) / len(inside_graphs) if inside_graphs else None,
        },
    )
    if total == 0:
        return diag
    _fill_chi_square(diag, chi_square(hist, deg_minus_updeg_pmf(n, k, p), total, clusters=clusters))
    _fill_mean_test(diag, per_graph, mu)
    return diag


HARD_PK = 0.25
EASY_KPK = 0.1


def regime_report(n: int, k: int, p: float, ell: int, ensemble: str | None = None) -> dict:
    """Regime predicates and reference growth rates for one parameter point.

    HARD: ``p^k`` bounded below (>= 1/4, which ``p = 1 - 1/k`` meets for all k >= 2) and
    ``k < n / ln n``; the second moment then grows like ``(1 + p^k)^l``.
    EASY: ``(k+1) p^k`` small (< 0.1) and ``k < n / ln^2 n``; the second moment is capped
    by ``2.5^l``. ``ensemble`` ("partite" or "gnp") restricts which label may apply.
    """
    if n < 2:
        raise InputError("need n >= 2")
    if not 0 <= p <= 1:
        raise InputError("p must lie in [0, 1]")
    ln = math.log(n)
    pk = p**k
    k_small_hard = k < n / ln
    k_small_easy = k < n / ln**2
    hard = pk >= HARD_PK and k_small_hard
    easy = (k + 1) * pk < EASY_KPK and k_small_easy
    if ensemble == "partite":
        easy = False
    elif ensemble == "gnp":
        hard = False
    elif ensemble is not None:
        raise InputError(f"unknown ensemble {ensemble!r}")
    label = "HARD" if hard else "EASY" if easy else "NEITHER"
    return {
        "n": n,
        "k": k,
        "p": p,
        "l": ell,
        "ensemble": ensemble,
        "p_pow_k": pk,
        "k_plus_1_p_pow_k": (k + 1) * pk,
        "n_over_ln_n": n / ln,
        "n_over_ln2_n": n / ln**2,
        "k_below_n_over_ln_n": k_small_hard,
        "k_below_n_over_ln2_n": k_small_easy,
        "p_below_k_pow_minus_1_over_k": p < k ** (-1 / k) if k > 0 else None,
        "expected_simplex_degree": (n - k - 1) * pk,
        "hard_case_growth": (1 + pk) ** ell,
        "easy_case_cap": 2.5**ell,
        "label": label,
    }
