"""End-to-end runs: fit, partition, score, and the batch drivers.

Everything here returns plain data (ClusterReport or row dicts) so the CLI
layer only formats and writes.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .data import ClusterReport, MultiViewDataset, SyntheticSpec, generate_synthetic
from .graphs import knn_graph
from .metrics import score_all
from .optimizer import ABLATION_FLAGS, JsmcConfig, Precomputed, fit
from .spectral import SpectralConfig, affinity_from_representation, spectral_partition


class GridTooLargeError(Exception):
    """Requested grid exceeds the configured cell cap."""


def run_pipeline(
    data: MultiViewDataset,
    n_clusters: int,
    config: JsmcConfig | None = None,
    spectral_cfg: SpectralConfig | None = None,
    pre: Precomputed | None = None,
) -> ClusterReport:
    """Fit the representation, partition it, and score against labels if any."""
    config = config or JsmcConfig()
    spectral_cfg = spectral_cfg or SpectralConfig(n_clusters=n_clusters, seed=config.seed)
    t0 = time.perf_counter()

    t_fit = time.perf_counter()
    result = fit(data, config, pre=pre)
    fit_secs = time.perf_counter() - t_fit

    t_spec = time.perf_counter()
    affinity = affinity_from_representation(result.c, zero_diagonal=spectral_cfg.zero_affinity_diagonal)
    labels = spectral_partition(affinity, spectral_cfg)
    spectral_secs = time.perf_counter() - t_spec

    t_met = time.perf_counter()
    metrics = score_all(data.labels, labels) if data.labels is not None else None
    metrics_secs = time.perf_counter() - t_met

    return ClusterReport(
        labels=labels,
        metrics=metrics,
        trace=result.trace,
        timings={
            "fit": fit_secs,
            "spectral": spectral_secs,
            "metrics": metrics_secs,
            "total": time.perf_counter() - t0,
        },
        config={
            **config.to_dict(),
            "n_clusters": n_clusters,
            "converged": result.converged,
            "n_iter": result.n_iter,
        },
    )


def default_grid_axis() -> list:
    """The standard search range: powers of ten from 1e-5 to 1e5."""
    return [10.0 ** p for p in range(-5, 6)]


def grid_search(
    data: MultiViewDataset,
    n_clusters: int,
    alphas=None,
    betas=None,
    lambdas=None,
    base_config: JsmcConfig | None = None,
    workers: int = 1,
    cell_cap: int = 2000,
) -> tuple[ClusterReport, list]:
    """Evaluate every (alpha, beta, lambda) cell; return the best and all rows.

    Cells are ranked by NMI when ground-truth labels exist, otherwise by
    lowest final objective. Ties go to the earlier cell, so the outcome does
    not depend on worker scheduling.
    """
    base_config = base_config or JsmcConfig()
    alphas = list(alphas) if alphas is not None else default_grid_axis()
    betas = list(betas) if betas is not None else default_grid_axis()
    lambdas = list(lambdas) if lambdas is not None else default_grid_axis()
    cells = list(itertools.product(alphas, betas, lambdas))
    if len(cells) > cell_cap:
        raise GridTooLargeError(
            f"grid has {len(cells)} cells, cap is {cell_cap}; restrict an axis or raise the cap"
        )

    pre = Precomputed(data, base_config.k_neighbors)

    def evaluate(cell):
        a, b, lam = cell
        cfg = JsmcConfig(**{**_config_kwargs(base_config), "alpha": a, "beta": b, "lambda_": lam})
        return run_pipeline(data, n_clusters, cfg, pre=pre)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(evaluate, cells))
    else:
        reports = [evaluate(cell) for cell in cells]

    rows = []
    for (a, b, lam), report in zip(cells, reports):
        row = {"alpha": a, "beta": b, "lambda": lam, "objective": report.trace[-1]["objective"]}
        if report.metrics is not None:
            row.update(report.metrics)
        rows.append(row)

    if data.labels is not None:
        best_idx = max(range(len(rows)), key=lambda i: (rows[i]["nmi"], -i))
    else:
        best_idx = min(range(len(rows)), key=lambda i: (rows[i]["objective"], i))
    for i, row in enumerate(rows):
        row["best"] = i == best_idx
    return reports[best_idx], rows


def _config_kwargs(config: JsmcConfig) -> dict:
    return {
        "alpha": config.alpha,
        "beta": config.beta,
        "lambda_": config.lambda_,
        "mu": config.mu,
        "k_neighbors": config.k_neighbors,
        "max_iter": config.max_iter,
        "tol_primal": config.tol_primal,
        "tol_objective": config.tol_objective,
        "seed": config.seed,
        "ablation": config.ablation,
        "mu_growth": config.mu_growth,
    }


def ablation_suite(
    data: MultiViewDataset,
    n_clusters: int,
    config: JsmcConfig | None = None,
    drops=None,
    workers: int = 1,
) -> list:
    """Full model plus every non-empty subset of the requested drops.

    Returns (variant_name, report) pairs; the full model is always first.
    All variants share the seed and hyperparameters.
    """
    config = config or JsmcConfig()
    drops = sorted(set(drops) if drops else ABLATION_FLAGS)
    unknown = set(drops) - ABLATION_FLAGS
    if unknown:
        raise ValueError(f"unknown ablation flags: {sorted(unknown)}")

    variants = [("full", frozenset())]
    for size in range(1, len(drops) + 1):
        for combo in itertools.combinations(drops, size):
            variants.append(("+".join(combo), frozenset(combo)))

    pre = Precomputed(data, config.k_neighbors)

    def evaluate(flags):
        cfg = JsmcConfig(**{**_config_kwargs(config), "ablation": flags})
        return run_pipeline(data, n_clusters, cfg, pre=pre)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(evaluate, [flags for _, flags in variants]))
    else:
        reports = [evaluate(flags) for _, flags in variants]
    return [(name, report) for (name, _), report in zip(variants, reports)]


def baseline_reports(
    data: MultiViewDataset,
    n_clusters: int,
    k_neighbors: int = 5,
    seed: int = 0,
) -> tuple[list, int]:
    """Spectral clustering on each single view's K-NN graph.

    Returns (name, report) pairs plus the index of the best view by NMI
    (by lowest spectral-phase objective proxy is meaningless here, so
    without labels the first view is reported as best).
    """
    spectral_cfg = SpectralConfig(n_clusters=n_clusters, seed=seed)
    rows = []
    for name, view in zip(data.names, data.views):
        t0 = time.perf_counter()
        graph = knn_graph(view, k=k_neighbors)
        labels = spectral_partition(graph, spectral_cfg)
        metrics = score_all(data.labels, labels) if data.labels is not None else None
        report = ClusterReport(
            labels=labels,
            metrics=metrics,
            trace=[],
            timings={"total": time.perf_counter() - t0},
            config={"view": name, "k_neighbors": k_neighbors, "seed": seed, "n_clusters": n_clusters},
        )
        rows.append((name, report))
    if data.labels is not None:
        best = max(range(len(rows)), key=lambda i: (rows[i][1].metrics["nmi"], -i))
    else:
        best = 0
    return rows, best


def run_benchmark(
    sizes,
    n_clusters: int = 3,
    config: JsmcConfig | None = None,
    view_dims: tuple = (50, 60),
    iterations: int = 40,
    seed: int = 0,
    repeats: int = 3,
) -> list:
    """Time the pipeline at increasing instance counts on synthetic data.

    Early stopping is disabled (tolerances pushed to zero) so every size
    runs exactly `iterations` update cycles and the scaling trend is not
    confounded by convergence speed. Each size runs `repeats` times and the
    fastest pass is kept, which strips scheduler noise from the trend.
    Returns one row per size with per-phase wall times in seconds.
    """
    base = config or JsmcConfig()
    rows = []
    for n in sizes:
        per_cluster = max(2, round(n / n_clusters))
        spec = SyntheticSpec(
            n_clusters=n_clusters,
            instances_per_cluster=per_cluster,
            view_dims=view_dims,
            cluster_separation=10.0,
            noise_sigma=0.5,
            seed=seed,
        )
        cfg = JsmcConfig(
            **{
                **_config_kwargs(base),
                "max_iter": iterations,
                "tol_primal": 1e-300,
                "tol_objective": 1e-300,
            }
        )
        best = None
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            data = generate_synthetic(spec)
            synth_secs = time.perf_counter() - t0
            report = run_pipeline(data, n_clusters, cfg)
            row = {
                "n": data.n,
                "synth": synth_secs,
                "fit": report.timings["fit"],
                "spectral": report.timings["spectral"],
                "metrics": report.timings["metrics"],
                "total": synth_secs + report.timings["total"],
            }
            if report.metrics is not None:
                row["nmi"] = report.metrics["nmi"]
            if best is None or row["total"] < best["total"]:
                best = row
        rows.append(best)
    return rows


def loglog_slope(ns, times) -> float:
    """Least-squares slope of log(time) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    times = np.asarray(times, dtype=float)
    if ns.size < 2:
        raise ValueError("need at least two sizes to fit a slope")
    return float(np.polyfit(np.log(ns), np.log(times), 1)[0])
