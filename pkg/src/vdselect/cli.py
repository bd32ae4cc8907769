"""Command-line entry point: selection runs, simulation studies, benchmarks.

Exit codes: 0 success, 2 usage errors, 3 matrix-file format errors, 4
numerical or resource failures. Standard output carries only data paths and
summary lines; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .ambient import AmbientSpace, center_project, standardize_column
from .dummies import DummyLaw, DummyPool
from .errors import MatrixFileError, MemoryBudgetExceeded, VdSelectError
from .experiments import (
    EquivalenceParams,
    FdrParams,
    NormInflationParams,
    UniversalityParams,
    equivalence_experiment,
    fdr_experiment,
    norm_inflation_experiment,
    universality_experiment,
)
from .matrixfile import MappedColumns, read_response
from .selectors import MatrixColumns, StoppingRule, run_path
from .trex import TrexConfig, trex_select

SNR_NOTE = "snr = |X beta|^2 / (n sigma^2)"

EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_NUMERICAL = 4

_CSV_SCHEMAS = {
    "equivalence": ["method", "T", "rank", "replicate", "value"],
    "fdr": ["alpha", "L_factor", "snr", "replicate", "fdp", "tpp"],
    "universality": ["law", "n", "k", "replicate", "ks", "w1", "deloc"],
    "norm_inflation": ["law", "alpha", "T", "L_factor", "replicate", "fdp", "tpp"],
    "norm_inflation_ratio": ["replicate", "ratio", "eta"],
    "bench": ["mode", "n", "p", "L", "median_ms", "peak_rss_bytes"],
}


class UsageError(Exception):
    pass


def make_manifest(params: dict, seed) -> dict:
    return {
        "parameters": params,
        "master_seed": seed,
        "artifact_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "snr_note": SNR_NOTE,
    }


def write_rows(path, schema_name: str, rows) -> None:
    header = _CSV_SCHEMAS[schema_name]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([row[key] for key in header])


def parse_param_file(path) -> dict:
    """Flat key = value lines; blank lines and #-comments ignored."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _coerce(value: str, template):
    if isinstance(template, bool):
        low = value.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise UsageError(f"expected a boolean, got {value!r}")
    if isinstance(template, int):
        return int(value)
    if isinstance(template, float):
        return float(value)
    if isinstance(template, tuple):
        items = [v.strip() for v in value.split(",") if v.strip()]
        inner = template[0] if template else "1"
        return tuple(_coerce(v, inner) for v in items)
    return value


def params_from_file(cls, path):
    raw = parse_param_file(path)
    defaults = cls()
    fields = {f.name: getattr(defaults, f.name) for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in fields:
            raise UsageError(f"unknown parameter key {key!r} for {cls.__name__}")
        kwargs[key] = _coerce(value, fields[key])
    return cls(**kwargs)


def resolve_threads(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("VDSELECT_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"VDSELECT_THREADS must be an integer, got {env!r}")
    return 1


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------


def _load_design(path):
    provider = MappedColumns(path)
    if provider.standardized:
        return provider
    space = AmbientSpace(provider.n)
    X = provider.load()
    for j in range(provider.p):
        X[:, j] = standardize_column(X[:, j], space)
    return MatrixColumns(X)


def cmd_select(args) -> int:
    provider = _load_design(args.x)
    y = read_response(args.y, n=provider.n)
    y = center_project(y, AmbientSpace(provider.n))
    L = int(args.l_factor * provider.p)
    if L < args.t_max:
        raise UsageError(
            f"l-factor {args.l_factor} gives L = {L} < T_max = {args.t_max};"
            " the selector needs at least T_max dummies"
        )
    config = TrexConfig(
        L=L,
        B=args.b,
        T_max=args.t_max,
        alpha=args.alpha,
        law=DummyLaw(args.law),
        selector=args.selector,
        master_seed=args.seed,
        workers=resolve_threads(args.threads),
    )
    _, table, cal = trex_select(provider, y, config)
    phi_col = table.phi[:, cal.T_star - 1]
    doc = {
        "manifest": make_manifest(
            {
                "x": args.x,
                "y": args.y,
                "alpha": args.alpha,
                "l_factor": args.l_factor,
                "t_max": args.t_max,
                "b": args.b,
                "law": args.law,
                "selector": args.selector,
                "L": L,
            },
            args.seed,
        ),
        "selected": sorted(int(j) for j in cal.selected),
        "v_star": cal.v_star,
        "t_star": cal.T_star,
        "fdp_estimate": cal.fdp_estimate_at_choice,
        "feasible": cal.feasible,
        "phi": {str(j): float(phi_col[j]) for j in np.flatnonzero(phi_col > 0)},
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# simulation subcommands
# ---------------------------------------------------------------------------


def _sim_outputs(args, params, tables):
    os.makedirs(args.out, exist_ok=True)
    for name, rows in tables:
        write_rows(os.path.join(args.out, name + ".csv"), name, rows)
    manifest = make_manifest(dataclasses.asdict(params), params.master_seed)
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, _ in tables:
        print(os.path.join(args.out, name + ".csv"))
    return 0


def cmd_sim_equivalence(args) -> int:
    params = params_from_file(EquivalenceParams, args.params)
    if args.shadow:
        params = dataclasses.replace(params, shadow=True)
    rows = equivalence_experiment(params)
    return _sim_outputs(args, params, [("equivalence", rows)])


def cmd_sim_fdr(args) -> int:
    params = params_from_file(FdrParams, args.params)
    rows = fdr_experiment(params)
    return _sim_outputs(args, params, [("fdr", rows)])


def cmd_sim_universality(args) -> int:
    params = params_from_file(UniversalityParams, args.params)
    rows = universality_experiment(params)
    return _sim_outputs(args, params, [("universality", rows)])


def cmd_sim_norm_inflation(args) -> int:
    params = params_from_file(NormInflationParams, args.params)
    rows, ratio_rows = norm_inflation_experiment(params)
    return _sim_outputs(
        args, params, [("norm_inflation", rows), ("norm_inflation_ratio", ratio_rows)]
    )


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _peak_rss_bytes():
    try:
        import resource

        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        return rss * 1024, "rss"  # Linux reports kilobytes
    except Exception:
        return None, "accounting"


def _bench_one(mode: str, n: int, p: int, L: int, T: int, seed: int, budget: int):
    from .simlab import gen_linear_model

    if mode == "ad" and 8 * n * L > budget:
        raise MemoryBudgetExceeded(
            f"ad mode needs about {8 * n * L} bytes for the dummy block,"
            f" over the budget of {budget}"
        )
    inst = gen_linear_model(n, p, min(p, 5), 1.0, seed)
    space = AmbientSpace(n)
    pool = DummyPool(L, DummyLaw.SPHERICAL, space, seed)
    path = run_path(inst.X, inst.y, pool, StoppingRule.dummy_count(T))
    k = path.basis.k
    timings = []
    if mode == "vd":
        t = path.basis.coeffs(path.residual)
        for _ in range(7):
            t0 = time.perf_counter()
            pool.scores(t)
            timings.append((time.perf_counter() - t0) * 1e3)
        accounted = pool.state_bytes()
    else:
        rng = np.random.default_rng(seed)
        D = rng.standard_normal((n, L))
        u = path.residual
        for _ in range(7):
            t0 = time.perf_counter()
            D.T @ u
            timings.append((time.perf_counter() - t0) * 1e3)
        accounted = D.nbytes
    rss, probe = _peak_rss_bytes()
    peak = rss if probe == "rss" else accounted
    return {
        "mode": mode,
        "n": n,
        "p": p,
        "L": L,
        "median_ms": float(np.median(timings)),
        "peak_rss_bytes": int(peak),
    }, k


def cmd_bench(args) -> int:
    rows = []
    for lf in args.l_factor:
        L = int(lf * args.p)
        row, _ = _bench_one(
            args.mode, args.n, args.p, L, args.t, args.seed, args.memory_budget
        )
        rows.append(row)
    write_rows(args.out, "bench", rows)
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdselect", description="FDR-controlled variable selection with virtual dummies"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sel = sub.add_parser("select", help="run the calibrated selector on a dataset")
    sel.add_argument("--x", required=True, help="design matrix file (VDMX)")
    sel.add_argument("--y", required=True, help="response (VDMX with p=1 or one-column CSV)")
    sel.add_argument("--alpha", type=float, default=0.1)
    sel.add_argument("--l-factor", type=float, default=2.0, dest="l_factor")
    sel.add_argument("--t-max", type=int, default=10, dest="t_max")
    sel.add_argument("--b", type=int, default=20)
    sel.add_argument(
        "--law",
        choices=[law.value for law in DummyLaw],
        default=DummyLaw.SPHERICAL.value,
    )
    sel.add_argument("--selector", choices=["lars", "omp"], default="lars")
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--threads", type=int, default=None)
    sel.add_argument("--out", required=True)
    sel.set_defaults(func=cmd_select)

    for name, func, extra in (
        ("sim-equivalence", cmd_sim_equivalence, True),
        ("sim-fdr", cmd_sim_fdr, False),
        ("sim-universality", cmd_sim_universality, False),
        ("sim-norm-inflation", cmd_sim_norm_inflation, False),
    ):
        sp = sub.add_parser(name, help=f"run the {name[4:]} study")
        sp.add_argument("--params", required=True, help="flat key = value parameter file")
        sp.add_argument("--out", required=True, help="output directory")
        if extra:
            sp.add_argument(
                "--shadow",
                action="store_true",
                help="couple virtual paths to the explicit dummy draws",
            )
        sp.set_defaults(func=func)

    bench = sub.add_parser("bench", help="dummy-update timing and memory benchmark")
    bench.add_argument("--n", type=int, required=True)
    bench.add_argument("--p", type=int, required=True)
    bench.add_argument("--l-factor", type=float, nargs="+", required=True, dest="l_factor")
    bench.add_argument("--mode", choices=["vd", "ad"], required=True)
    bench.add_argument("--t", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument(
        "--memory-budget",
        type=int,
        default=2 * 1024**3,
        dest="memory_budget",
        help="refuse ad runs whose dummy block exceeds this many bytes",
    )
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MatrixFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (VdSelectError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
