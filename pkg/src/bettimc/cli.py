"""Command line: ``bettimc gen | exact | estimate | experiment``.

Exit codes: 0 ok, 2 usage, 3 resource (size guard or sample budget), 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from bettimc import __version__
from bettimc.complex import CliqueComplex, Complex, Graph, generate_complete_partite, generate_disjoint_cliques
from bettimc.errors import InputError, NumericError, ResourceError, SampleBudgetExceeded
from bettimc.estimators import ALGORITHMS, DEFAULT_BUDGET, EstimateConfig
from bettimc.fixtures import FIXTURES, get_fixture
from bettimc.io import file_digest, load_input, write_graph
from bettimc.oracle import exact_normalized_trace, exact_second_moment, oracle_report
from bettimc.randgraphs import ErConfig, PartiteErConfig, gen_gnp, gen_partite

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_NUMERIC = 4

CSV_COLUMNS = [
    "instance", "algorithm", "n", "k", "l", "eps", "eta", "seed", "workers", "C", "N_s", "N_p",
    "v_hat", "estimate", "oracle_trace", "oracle_second_moment", "abs_error", "status", "elapsed_ms",
]


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _manifest(cmd: str, params: dict, inputs: list[Path], outputs: list[str]) -> dict:
    return {
        "subcommand": cmd,
        "parameters": params,
        "tool_version": __version__,
        "input_digests": {str(p): file_digest(p) for p in inputs},
        "outputs": outputs,
    }


def _build_graph(ensemble: str, *, n=None, k=None, m=None, p=None, seed=0) -> Graph:
    def need(**kw):
        missing = [name for name, v in kw.items() if v is None]
        if missing:
            raise UsageError(f"ensemble {ensemble!r} needs {', '.join('--' + x for x in missing)}")

    try:
        if ensemble == "complete-partite":
            need(k=k, m=m)
            return generate_complete_partite(k, m)
        if ensemble == "disjoint-cliques":
            need(m=m, k=k)
            return generate_disjoint_cliques(m, k)
        if ensemble == "er":
            need(n=n, p=p)
            return gen_gnp(ErConfig(n, p, seed))
        if ensemble == "partite-er":
            need(n=n, k=k, p=p)
            return gen_partite(PartiteErConfig(n, k, p, seed))
    except InputError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(f"unknown ensemble {ensemble!r}")


def cmd_gen(args) -> int:
    g = _build_graph(args.ensemble, n=args.n, k=args.k, m=args.m, p=args.p, seed=args.seed)
    if args.out:
        write_graph(g, args.out)
    else:
        from bettimc.io import format_graph

        sys.stdout.write(format_graph(g))
    sys.stderr.write(f"n={g.n} edges={g.num_edges}\n")
    return 0


def _input_complex(args) -> tuple[Complex, list[Path]]:
    if args.graph is None and args.complex is None:
        raise UsageError("give --graph FILE or --complex FILE")
    if args.graph is not None and args.complex is not None:
        raise UsageError("give only one of --graph and --complex")
    path = Path(args.graph or args.complex)
    if not path.exists():
        raise UsageError(f"no such file: {path}")
    return load_input(graph=args.graph, complex=args.complex), [path]


def cmd_exact(args) -> int:
    cx, inputs = _input_complex(args)
    report = oracle_report(cx, args.k, args.l, limit=args.limit)
    report["manifest"] = _manifest("exact", {"k": args.k, "l": args.l, "limit": args.limit}, inputs, [])
    sys.stdout.write(_dump(report))
    return 0


def cmd_estimate(args) -> int:
    cx, inputs = _input_complex(args)
    cfg = _config(args.k, args.l, args.eps, args.eta, args.seed, args.workers, args.budget)
    try:
        res = ALGORITHMS[args.algorithm](cx, cfg)
    except SampleBudgetExceeded as exc:
        sys.stdout.write(_dump({"error": "sample_budget_exceeded", "what": exc.what,
                                "requested": exc.requested if math.isfinite(exc.requested) else "overflow",
                                "budget": exc.budget}))
        return EXIT_RESOURCE
    out = res.to_json(timing=args.timing)
    params = {"algorithm": args.algorithm, "k": args.k, "l": args.l, "eps": args.eps, "eta": args.eta,
              "seed": args.seed, "workers": args.workers, "budget": args.budget}
    out["manifest"] = _manifest("estimate", params, inputs, [])
    sys.stdout.write(_dump(out))
    return 0


def _config(k, ell, eps, eta, seed, workers, budget) -> EstimateConfig:
    try:
        return EstimateConfig(k, ell, eps, eta, seed, workers, budget)
    except InputError as exc:
        raise UsageError(str(exc)) from None


def _as_list(x):
    return x if isinstance(x, list) else [x]


def _instance_complex(spec: dict, base: Path) -> tuple[str, Complex, list[Path]]:
    if "fixture" in spec:
        name = spec["fixture"]
        if name not in FIXTURES:
            raise InputError(f"unknown fixture {name!r}")
        return spec.get("name", name), get_fixture(name), []
    if "graph" in spec or "complex" in spec:
        key = "graph" if "graph" in spec else "complex"
        path = (base / spec[key]).resolve()
        cx = load_input(**{key: path})
        return spec.get("name", Path(spec[key]).name), cx, [path]
    if "ensemble" in spec:
        params = {k: spec.get(k) for k in ("n", "k", "m", "p")}
        g = _build_graph(spec["ensemble"], seed=spec.get("seed", 0), **params)
        label = spec.get("name") or spec["ensemble"] + "(" + ",".join(
            f"{k}={v}" for k, v in sorted({**params, "seed": spec.get("seed", 0)}.items()) if v is not None) + ")"
        return label, CliqueComplex(g), []
    raise InputError(f"cannot interpret instance {spec!r}")


def _expand_instances(grid: dict) -> list[dict]:
    out = []
    for spec in grid.get("instances", []):
        seeds = spec.get("seeds")
        if seeds is None:
            out.append(spec)
        else:
            for s in seeds:
                d = {k: v for k, v in spec.items() if k != "seeds"}
                d["seed"] = s
                out.append(d)
    return out


def _run_row(job: dict) -> dict:
    cx, label, alg, k, ell, eps, eta, seed, workers, budget, oracle_limit, timing = (
        job["complex"], job["instance"], job["algorithm"], job["k"], job["l"], job["eps"], job["eta"],
        job["seed"], job["workers"], job["budget"], job["oracle_limit"], job["timing"])
    row = {c: None for c in CSV_COLUMNS}
    row.update(instance=label, algorithm=alg, n=cx.n, k=k, l=ell, eps=eps, eta=eta, seed=seed, workers=workers)
    t0 = time.perf_counter()
    try:
        try:
            row["oracle_trace"] = float(exact_normalized_trace(cx, k, ell, oracle_limit))
            row["oracle_second_moment"] = float(exact_second_moment(cx, k, ell, oracle_limit))
        except ResourceError:
            pass
        if alg == "oracle":
            row["status"] = "ok"
        else:
            cfg = EstimateConfig(k, ell, eps, eta, seed, workers, budget)
            res = ALGORITHMS[alg](cx, cfg)
            row.update(C=res.C, N_s=res.n_simplex_samples, N_p=res.n_paths, v_hat=res.v_hat, estimate=res.estimate)
            if row["oracle_trace"] is not None:
                row["abs_error"] = abs(res.estimate - row["oracle_trace"])
            row["status"] = "ok"
    except SampleBudgetExceeded as exc:
        row["status"] = f"budget_exceeded:{exc.what}={exc.requested:.6g}"
    except (InputError, ResourceError, NumericError) as exc:
        row["status"] = f"error:{type(exc).__name__}:{exc}"
    if timing:
        row["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    return row


def run_experiment(grid: dict, base: Path, *, timing: bool = False, row_parallel: int = 1) -> tuple[list[dict], list[Path]]:
    algorithms = _as_list(grid.get("algorithms", ["cbne", "cbne-var"]))
    for a in algorithms:
        if a not in ALGORITHMS and a != "oracle":
            raise UsageError(f"unknown algorithm {a!r}")
    ells = _as_list(grid.get("l", [3]))
    epss = _as_list(grid.get("eps", [0.1]))
    etas = _as_list(grid.get("eta", [0.1]))
    seed = grid.get("seed", 0)
    workers = grid.get("workers", 1)
    budget = grid.get("budget", DEFAULT_BUDGET)
    oracle_limit = grid.get("oracle_limit", 600)
    jobs = []
    inputs: list[Path] = []
    rows_pre: list[dict | None] = []
    for spec in _expand_instances(grid):
        try:
            label, cx, paths = _instance_complex(spec, base)
        except (InputError, UsageError) as exc:
            row = {c: None for c in CSV_COLUMNS}
            row.update(instance=str(spec), status=f"error:{exc}")
            rows_pre.append(row)
            continue
        inputs.extend(paths)
        k = spec.get("dim", grid.get("k"))
        if k is None:
            k = FIXTURES[spec["fixture"]][1] if "fixture" in spec else spec.get("k", 1)
        for alg in algorithms:
            for ell in ells:
                for eps in epss:
                    for eta in etas:
                        jobs.append(dict(complex=cx, instance=label, algorithm=alg, k=k, l=ell, eps=eps, eta=eta,
                                         seed=seed, workers=workers, budget=budget, oracle_limit=oracle_limit,
                                         timing=timing))
                        rows_pre.append(None)
    if row_parallel > 1:
        with ThreadPoolExecutor(max_workers=row_parallel) as ex:
            done = list(ex.map(_run_row, jobs))
    else:
        done = [_run_row(j) for j in jobs]
    it = iter(done)
    rows = [r if r is not None else next(it) for r in rows_pre]
    return rows, inputs


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def cmd_experiment(args) -> int:
    cfg_path = Path(args.config)
    if not cfg_path.exists():
        raise UsageError(f"no such file: {cfg_path}")
    try:
        grid = json.loads(cfg_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad config JSON: {exc}") from None
    if args.workers is not None:
        grid["workers"] = args.workers
    if args.seed is not None:
        grid["seed"] = args.seed
    rows, inputs = run_experiment(grid, cfg_path.parent, timing=args.timing, row_parallel=args.row_parallel)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        manifest = _manifest("experiment", grid, [cfg_path, *inputs], [args.out])
        Path(args.out + ".manifest.json").write_text(_dump(manifest), encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bettimc", description="Monte Carlo normalized Betti number estimation.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a graph file")
    g.add_argument("ensemble", choices=["complete-partite", "disjoint-cliques", "er", "partite-er"])
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path (default: stdout)")
    g.set_defaults(func=cmd_gen)

    def add_input(p):
        p.add_argument("--graph", help="graph edge-list file (clique complex)")
        p.add_argument("--complex", help="explicit complex file (maximal simplices)")

    e = sub.add_parser("exact", help="oracle report as JSON")
    add_input(e)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--l", type=int, nargs="+", default=[1])
    e.add_argument("--limit", type=int, default=None, help="dense size guard on |S_k|")
    e.set_defaults(func=cmd_exact)

    s = sub.add_parser("estimate", help="run an estimator, print JSON")
    s.add_argument("algorithm", choices=sorted(ALGORITHMS))
    add_input(s)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--eta", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--timing", action="store_true", help="report wall-clock elapsed_ms (breaks byte-reproducibility)")
    s.set_defaults(func=cmd_estimate)

    x = sub.add_parser("experiment", help="run a sweep grid from a JSON config, write CSV")
    x.add_argument("config")
    x.add_argument("--out")
    x.add_argument("--seed", type=int, default=None)
    x.add_argument("--workers", type=int, default=None)
    x.add_argument("--row-parallel", type=int, default=1, metavar="N")
    x.add_argument("--timing", action="store_true")
    x.set_defaults(func=cmd_experiment)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_USAGE
    except ResourceError as exc:
        sys.stderr.write(f"resource error: {exc}\n")
        return EXIT_RESOURCE
    except NumericError as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
