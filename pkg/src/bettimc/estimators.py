"""CBNE (Hoeffding-budgeted) and CBNE-Var (variance-adaptive) estimators of ``tr(H^l)/|S_k|``.

Randomness: the master seed feeds a ``numpy.random.SeedSequence``. CBNE-Var spawns
two children (simplex phase, path phase); each phase spawns one stream per
worker. Worker ``w`` handles a fixed contiguous share of the draws and the
per-worker (count, mean, M2) triples are merged in worker order, so a result is
bit-reproducible for a given ``(seed, workers)`` pair.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from bettimc.complex import Complex
from bettimc.errors import InputError, SampleBudgetExceeded
from bettimc.stats import RunningStats, merge_all
from bettimc.walk import WalkTable, sample_paths

DEFAULT_BUDGET = 10**9
BLOCK = 1 << 16


@dataclass(frozen=True)
class EstimateConfig:
    k: int
    ell: int
    eps: float
    eta: float
    seed: int = 0
    workers: int = 1
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.k < 1:
            raise InputError("dimension k must be at least 1")
        if self.ell < 1:
            raise InputError("path length must be at least 1")
        if not 0 < self.eps <= 1:
            raise InputError("eps must lie in (0, 1]")
        if not 0 < self.eta < 1:
            raise InputError("eta must lie in (0, 1)")
        if self.workers < 1:
            raise InputError("workers must be at least 1")
        if self.seed < 0:
            raise InputError("seed must be non-negative")


@dataclass
class EstimateResult:
    algorithm: str
    n: int
    k: int
    ell: int
    eps: float
    eta: float
    C: int
    n_simplex_samples: int
    n_paths: int
    v_hat: float | None
    estimate: float
    empirical_variance: float
    seed: int
    workers: int
    elapsed: float
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_json(self, timing: bool = True) -> dict:
        """JSON-ready dict. ``timing=False`` nulls ``elapsed_ms`` for byte-stable output."""
        d = asdict(self)
        d.pop("samples")
        d.pop("elapsed")
        return {
            "algorithm": d["algorithm"],
            "n": d["n"],
            "k": d["k"],
            "l": d["ell"],
            "eps": d["eps"],
            "eta": d["eta"],
            "C": d["C"],
            "N_s": d["n_simplex_samples"],
            "N_p": d["n_paths"],
            "v_hat": d["v_hat"],
            "estimate": d["estimate"],
            "empirical_variance": d["empirical_variance"],
            "seed": d["seed"],
            "workers": d["workers"],
            "elapsed_ms": round(self.elapsed * 1000, 3) if timing else None,
        }


def norm_bound(complex: Complex) -> int:
    """Upper bound on column 1-norms of H used to size the sample budgets."""
    return 2 if complex.is_clique else complex.n


def _ceil(x: float) -> int:
    # values within float noise of an integer count as that integer
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def _checked_count(log_count: float, budget: int, what: str) -> int:
    if log_count > math.log(budget) + 1e-12:
        raise SampleBudgetExceeded(math.exp(log_count) if log_count < 700 else math.inf, budget, what)
    n = _ceil(math.exp(log_count))
    if n > budget:
        raise SampleBudgetExceeded(n, budget, what)
    return max(n, 1)


def sample_count_cbne(cfg: EstimateConfig, C: int) -> int:
    """``ceil(ln(2/eta) * C^(2l) / eps^2)``."""
    log_n = math.log(math.log(2 / cfg.eta)) + 2 * cfg.ell * math.log(C) - 2 * math.log(cfg.eps)
    return _checked_count(log_n, cfg.budget, "N_p")


def simplex_sample_count(cfg: EstimateConfig, C: int) -> int:
    """``ceil(C^(4l/3) * eps^(-4/3) * eta^(-2/3))``, the minimizer of the total draw count."""
    log_n = (4 * cfg.ell * math.log(C) - 4 * math.log(cfg.eps) - 2 * math.log(cfg.eta)) / 3
    return _checked_count(log_n, cfg.budget, "N_s")


def path_count_cbne_var(cfg: EstimateConfig, C: int, v_hat: float, n_s: int) -> int:
    """``ceil((v_hat + C^(2l)/sqrt(N_s)) / (eta * eps^2))``."""
    pad = math.exp(2 * cfg.ell * math.log(C) - 0.5 * math.log(n_s))
    total = v_hat + pad
    log_n = math.log(total) - math.log(cfg.eta) - 2 * math.log(cfg.eps)
    return _checked_count(log_n, cfg.budget, "N_p")


def _shares(total: int, workers: int) -> list[int]:
    q, r = divmod(total, workers)
    return [q + (w < r) for w in range(workers)]


def _map_workers(fn, jobs: list, workers: int) -> list:
    if workers == 1 or len(jobs) == 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def _path_phase(table: WalkTable, ell: int, n_paths: int, seq: np.random.SeedSequence, workers: int, record: bool):
    def run(job):
        share, child = job
        rng = np.random.Generator(np.random.PCG64(child))
        st = RunningStats()
        kept = []
        done = 0
        while done < share:
            b = min(BLOCK, share - done)
            starts = rng.integers(0, len(table), size=b)
            f = sample_paths(table, ell, starts, rng)
            st.push_batch(f)
            if record:
                kept.append(f)
            done += b
        return st, kept

    jobs = list(zip(_shares(n_paths, workers), seq.spawn(workers)))
    parts = _map_workers(run, jobs, workers)
    stats = merge_all(p[0] for p in parts)
    samples = np.concatenate([f for p in parts for f in p[1]]) if record else None
    return stats, samples


def _norm_powers(table: WalkTable, power: int) -> np.ndarray:
    return np.array([float(x**power) for x in table.norm_exact])


def _simplex_phase(table: WalkTable, ell: int, n_s: int, seq: np.random.SeedSequence, workers: int) -> RunningStats:
    powers = _norm_powers(table, 2 * ell)

    def run(job):
        share, child = job
        rng = np.random.Generator(np.random.PCG64(child))
        st = RunningStats()
        done = 0
        while done < share:
            b = min(BLOCK, share - done)
            st.push_batch(powers[rng.integers(0, len(table), size=b)])
            done += b
        return st

    jobs = list(zip(_shares(n_s, workers), seq.spawn(workers)))
    return merge_all(_map_workers(run, jobs, workers))


def _prepare(complex: Complex, cfg: EstimateConfig, table: WalkTable | None) -> WalkTable:
    if table is None:
        table = WalkTable.build(complex, cfg.k)
    if len(table) == 0:
        raise InputError(f"the complex has no {cfg.k}-simplices")
    return table


def estimate_variance_bound(
    complex: Complex, cfg: EstimateConfig, n_s: int, rng: np.random.Generator | np.random.SeedSequence | int,
    table: WalkTable | None = None,
) -> float:
    """Mean of ``||H sigma||_1^(2l)`` over ``n_s`` uniform draws of sigma from S_k."""
    table = _prepare(complex, cfg, table)
    if n_s < 1:
        raise InputError("N_s must be at least 1")
    if isinstance(rng, np.random.Generator):
        powers = _norm_powers(table, 2 * cfg.ell)
        st = RunningStats()
        st.push_batch(powers[rng.integers(0, len(table), size=n_s)])
        return st.mean
    seq = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    return _simplex_phase(table, cfg.ell, n_s, seq, cfg.workers).mean


def cbne(complex: Complex, cfg: EstimateConfig, *, table: WalkTable | None = None, record: bool = False) -> EstimateResult:
    """Average the path functional over the Hoeffding-sufficient number of paths."""
    t0 = time.perf_counter()
    C = norm_bound(complex)
    n_p = sample_count_cbne(cfg, C)
    table = _prepare(complex, cfg, table)
    root = np.random.SeedSequence(cfg.seed)
    stats, samples = _path_phase(table, cfg.ell, n_p, root, cfg.workers, record)
    return EstimateResult(
        "cbne", complex.n, cfg.k, cfg.ell, cfg.eps, cfg.eta, C, 0, n_p, None,
        stats.mean, stats.variance, cfg.seed, cfg.workers, time.perf_counter() - t0, samples,
    )


def cbne_var(complex: Complex, cfg: EstimateConfig, *, table: WalkTable | None = None, record: bool = False) -> EstimateResult:
    """Estimate the second-moment bound from simplex draws, then size the path phase by Chebyshev."""
    t0 = time.perf_counter()
    C = norm_bound(complex)
    n_s = simplex_sample_count(cfg, C)
    table = _prepare(complex, cfg, table)
    seq_s, seq_p = np.random.SeedSequence(cfg.seed).spawn(2)
    v_hat = _simplex_phase(table, cfg.ell, n_s, seq_s, cfg.workers).mean
    n_p = path_count_cbne_var(cfg, C, v_hat, n_s)
    stats, samples = _path_phase(table, cfg.ell, n_p, seq_p, cfg.workers, record)
    return EstimateResult(
        "cbne-var", complex.n, cfg.k, cfg.ell, cfg.eps, cfg.eta, C, n_s, n_p, v_hat,
        stats.mean, stats.variance, cfg.seed, cfg.workers, time.perf_counter() - t0, samples,
    )


ALGORITHMS = {"cbne": cbne, "cbne-var": cbne_var}
