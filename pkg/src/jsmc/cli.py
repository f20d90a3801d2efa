"""Command-line entry points.

Subcommands: run (one fit), grid (hyperparameter search), ablate (term
drop study), baseline (per-view spectral clustering), synth (generate a
synthetic dataset), bench (timing trend). All results go to files; stdout
carries a one-line summary. Exit codes: 0 success, 2 bad input, 3
numerical failure. JSMC_LOG sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .data import (
    DataError,
    MultiViewDataset,
    SyntheticSpec,
    generate_synthetic,
    load_manifest,
    report_markdown,
    save_dataset,
    write_report,
)
from .graphs import GraphError
from .linalg import LinalgError
from .optimizer import JsmcConfig
from .pipeline import (
    GridTooLargeError,
    ablation_suite,
    baseline_reports,
    default_grid_axis,
    grid_search,
    loglog_slope,
    run_benchmark,
    run_pipeline,
)
from .spectral import SpectralError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

DROP_ALIASES = {
    "inconsistency": "drop_inconsistency",
    "smoothness": "drop_smoothness",
    "lowrank": "drop_lowrank",
}

log = logging.getLogger("jsmc")


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0, help="smoothness weight (default 1)")
    p.add_argument("--beta", type=float, default=1.0, help="inconsistency weight (default 1)")
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0,
                   help="low-rank weight (default 1)")
    p.add_argument("--k", type=int, default=5, help="K-NN neighborhood size (default 5)")
    p.add_argument("--mu", type=float, default=1.0, help="penalty parameter (default 1)")
    p.add_argument("--max-iter", type=int, default=100, help="iteration cap (default 100)")
    p.add_argument("--tol-primal", type=float, default=1e-6,
                   help="primal residual tolerance (default 1e-6)")
    p.add_argument("--tol-objective", type=float, default=1e-5,
                   help="relative Lagrangian change tolerance (default 1e-5)")
    p.add_argument("--drop", action="append", default=[], choices=sorted(DROP_ALIASES),
                   help="disable a model term (repeatable)")


def _add_common_flags(p: argparse.ArgumentParser, default_output: str) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--output", type=Path, default=Path(default_output),
                   help=f"result file (default {default_output})")
    p.add_argument("--format", choices=("json", "md"), default="json",
                   help="output format (default json)")


def _config_from_args(args) -> JsmcConfig:
    return JsmcConfig(
        alpha=args.alpha,
        beta=args.beta,
        lambda_=args.lambda_,
        mu=args.mu,
        k_neighbors=args.k,
        max_iter=args.max_iter,
        tol_primal=args.tol_primal,
        tol_objective=args.tol_objective,
        seed=args.seed,
        ablation=frozenset(DROP_ALIASES[d] for d in args.drop),
    )


def _parse_grid_axes(items) -> dict:
    axes = {}
    for item in items or []:
        if "=" not in item:
            raise DataError(f"grid axis must look like axis=v1,v2,... got {item!r}")
        axis, _, values = item.partition("=")
        axis = axis.strip()
        if axis not in ("alpha", "beta", "lambda"):
            raise DataError(f"unknown grid axis {axis!r}; use alpha, beta, or lambda")
        try:
            axes[axis] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError as exc:
            raise DataError(f"non-numeric grid value in {item!r}: {exc}") from exc
        if not axes[axis]:
            raise DataError(f"grid axis {axis!r} has no values")
    return axes


def _write_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _metric_cells(metrics) -> str:
    if not metrics:
        return " - | - | - | - "
    return " | ".join(f"{metrics[m]:.4f}" for m in ("nmi", "ari", "acc", "pur"))


def cmd_run(args) -> int:
    data = load_manifest(args.manifest)
    config = _config_from_args(args)
    report = run_pipeline(data, args.clusters, config)
    write_report(report, args.output, args.format)
    if report.metrics:
        summary = ", ".join(f"{k}={v:.4f}" for k, v in report.metrics.items())
    else:
        summary = "no ground-truth labels"
    print(f"run: n={data.n}, {summary} -> {args.output}")
    return EXIT_OK


def cmd_grid(args) -> int:
    data = load_manifest(args.manifest)
    config = _config_from_args(args)
    axes = _parse_grid_axes(args.grid)
    best, rows = grid_search(
        data,
        args.clusters,
        alphas=axes.get("alpha"),
        betas=axes.get("beta"),
        lambdas=axes.get("lambda"),
        base_config=config,
        workers=args.workers,
        cell_cap=args.grid_cap,
    )
    best_row = next(r for r in rows if r["best"])
    doc = {"rows": rows, "best": best.to_dict()}
    if args.format == "json":
        _write_json(doc, args.output)
    else:
        lines = ["| alpha | beta | lambda | nmi | ari | acc | pur | objective | best |",
                 "| --- | --- | --- | --- | --- | --- | --- | --- | --- |"]
        for r in rows:
            cells = _metric_cells(r if "nmi" in r else None)
            flag = "*" if r["best"] else ""
            lines.append(
                f"| {r['alpha']:g} | {r['beta']:g} | {r['lambda']:g} | {cells} "
                f"| {r['objective']:.6g} | {flag} |"
            )
        lines += ["", report_markdown(best)]
        args.output.write_text("\n".join(lines))
    rank = f"nmi={best_row.get('nmi', float('nan')):.4f}" if "nmi" in best_row else \
        f"objective={best_row['objective']:.6g}"
    print(
        f"grid: {len(rows)} cells, best alpha={best_row['alpha']:g} "
        f"beta={best_row['beta']:g} lambda={best_row['lambda']:g} ({rank}) -> {args.output}"
    )
    return EXIT_OK


def cmd_ablate(args) -> int:
    data = load_manifest(args.manifest)
    config = _config_from_args(args)
    drops = [DROP_ALIASES[d] for d in args.drop] or None
    variants = ablation_suite(data, args.clusters, config, drops=drops, workers=args.workers)
    doc = {"variants": [{"name": name, "report": rep.to_dict()} for name, rep in variants]}
    if args.format == "json":
        _write_json(doc, args.output)
    else:
        lines = ["| variant | nmi | ari | acc | pur |", "| --- | --- | --- | --- | --- |"]
        for name, rep in variants:
            lines.append(f"| {name} | {_metric_cells(rep.metrics)} |")
        args.output.write_text("\n".join(lines) + "\n")
    print(f"ablate: {len(variants)} variants -> {args.output}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    data = load_manifest(args.manifest)
    rows, best_idx = baseline_reports(data, args.clusters, k_neighbors=args.k, seed=args.seed)
    doc = {
        "views": [{"name": name, "report": rep.to_dict()} for name, rep in rows],
        "best": rows[best_idx][0],
    }
    if args.format == "json":
        _write_json(doc, args.output)
    else:
        lines = ["| view | nmi | ari | acc | pur | best |", "| --- | --- | --- | --- | --- | --- |"]
        for i, (name, rep) in enumerate(rows):
            lines.append(f"| {name} | {_metric_cells(rep.metrics)} | {'*' if i == best_idx else ''} |")
        args.output.write_text("\n".join(lines) + "\n")
    print(f"baseline: {len(rows)} views, best={rows[best_idx][0]} -> {args.output}")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        n_clusters=args.clusters,
        instances_per_cluster=args.per_cluster,
        view_dims=tuple(int(d) for d in args.dims.split(",")),
        cluster_separation=args.separation,
        noise_sigma=args.noise,
        inconsistent_view_fraction=args.inconsistent_fraction,
        seed=args.seed,
    )
    data = generate_synthetic(spec)
    manifest = save_dataset(data, args.output_dir)
    print(f"synth: n={data.n}, views={data.n_views} -> {manifest}")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    if not sizes:
        raise DataError("--sizes must list at least one instance count")
    rows = run_benchmark(
        sizes,
        n_clusters=args.clusters,
        iterations=args.max_iter,
        seed=args.seed,
    )
    doc = {"rows": rows}
    slope = None
    if len(rows) >= 2:
        slope = loglog_slope([r["n"] for r in rows], [r["total"] for r in rows])
        doc["slope"] = slope
    if args.format == "json":
        _write_json(doc, args.output)
    else:
        lines = ["| n | synth | fit | spectral | metrics | total |",
                 "| --- | --- | --- | --- | --- | --- |"]
        for r in rows:
            lines.append(
                f"| {r['n']} | {r['synth']:.3f} | {r['fit']:.3f} | {r['spectral']:.3f} "
                f"| {r['metrics']:.3f} | {r['total']:.3f} |"
            )
        if slope is not None:
            lines += ["", f"log-log slope of total time vs n: {slope:.2f}"]
        args.output.write_text("\n".join(lines) + "\n")
    tail = f", slope={slope:.2f}" if slope is not None else ""
    print(f"bench: {len(rows)} sizes{tail} -> {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsmc",
        description="Multi-view subspace clustering with a jointly smoothed representation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="fit one model and write a report")
    p_run.add_argument("--manifest", type=Path, required=True)
    p_run.add_argument("--clusters", type=int, required=True)
    _add_hyper_flags(p_run)
    _add_common_flags(p_run, "jsmc-run.json")
    p_run.set_defaults(func=cmd_run)

    p_grid = sub.add_parser("grid", help="search (alpha, beta, lambda) cells")
    p_grid.add_argument("--manifest", type=Path, required=True)
    p_grid.add_argument("--clusters", type=int, required=True)
    p_grid.add_argument("--grid", action="append", metavar="AXIS=V1,V2,...",
                        help="restrict one axis (repeatable); default is powers of ten 1e-5..1e5")
    p_grid.add_argument("--grid-cap", type=int, default=2000,
                        help="maximum number of cells (default 2000)")
    p_grid.add_argument("--workers", type=int, default=1, help="concurrent fits (default 1)")
    _add_hyper_flags(p_grid)
    _add_common_flags(p_grid, "jsmc-grid.json")
    p_grid.set_defaults(func=cmd_grid)

    p_abl = sub.add_parser("ablate", help="full model plus term-drop variants")
    p_abl.add_argument("--manifest", type=Path, required=True)
    p_abl.add_argument("--clusters", type=int, required=True)
    p_abl.add_argument("--workers", type=int, default=1, help="concurrent fits (default 1)")
    _add_hyper_flags(p_abl)
    _add_common_flags(p_abl, "jsmc-ablate.json")
    p_abl.set_defaults(func=cmd_ablate)

    p_base = sub.add_parser("baseline", help="spectral clustering per single view")
    p_base.add_argument("--manifest", type=Path, required=True)
    p_base.add_argument("--clusters", type=int, required=True)
    p_base.add_argument("--k", type=int, default=5, help="K-NN neighborhood size (default 5)")
    _add_common_flags(p_base, "jsmc-baseline.json")
    p_base.set_defaults(func=cmd_baseline)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset + manifest")
    p_synth.add_argument("--clusters", type=int, default=3)
    p_synth.add_argument("--per-cluster", type=int, default=20)
    p_synth.add_argument("--dims", default="60,80", help="comma list of view dims (default 60,80)")
    p_synth.add_argument("--separation", type=float, default=10.0)
    p_synth.add_argument("--noise", type=float, default=0.5)
    p_synth.add_argument("--inconsistent-fraction", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--output-dir", type=Path, required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_bench = sub.add_parser("bench", help="timing trend over instance counts")
    p_bench.add_argument("--sizes", default="100,200,400", help="comma list of n (default 100,200,400)")
    p_bench.add_argument("--clusters", type=int, default=3)
    p_bench.add_argument("--max-iter", type=int, default=40,
                         help="fixed update cycles per size (default 40)")
    _add_common_flags(p_bench, "jsmc-bench.json")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("JSMC_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LinalgError as exc:
        log.debug("numerical failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, GraphError, SpectralError, GridTooLargeError, ValueError, OSError) as exc:
        log.debug("input error", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
