"""Reciprocal vs. baseline comparison over several synthetic samples."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Iterable, Sequence

from . import bundled
from .datagen import GenConfig, generate
from .distance import build_similarity_matrix
from .evaluation import SUMMARY_COLUMNS, EvalReport, evaluate
from .ranker import recommend_from_matrix

MODELS = ("reciprocal", "baseline")
DEFAULT_KS = (5, 10, 15, 20)
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


def run_sample(config: GenConfig, ks: Sequence[int], taxonomy=None, locations=None) -> list[EvalReport]:
    """Generate one population and evaluate both models at every K."""
    if taxonomy is None:
        taxonomy = bundled.taxonomy()
    if locations is None:
        locations = bundled.locations()
    profiles, prefs = generate(config, taxonomy, locations)
    matrix = build_similarity_matrix(profiles, prefs, taxonomy, locations)
    reports = []
    for model in MODELS:
        by_k = recommend_from_matrix(
            matrix, profiles, prefs, ks, taxonomy, locations, reciprocal=model == "reciprocal"
        )
        for k in sorted(by_k):
            report = evaluate(by_k[k], model)
            report.per_learner = {}
            reports.append(report)
    return reports


def _run_seed(args):
    config, ks = args
    return config.seed, run_sample(config, ks)


def run_bench(
    seeds: Iterable[int] = DEFAULT_SEEDS,
    ks: Sequence[int] = DEFAULT_KS,
    config: GenConfig | None = None,
    workers: int = 1,
) -> tuple[list[EvalReport], dict[int, list[EvalReport]]]:
    """Average each (model, K) over the seeds.

    Returns:
        ``(means, runs)``: one mean report per (model, K) ordered by model
        then K, and the raw reports keyed by seed.
    """
    config = config or GenConfig()
    seeds = sorted(set(seeds))
    if not seeds:
        raise ValueError("at least one seed is required")
    ks = sorted(set(ks))
    if not ks or min(ks) < 1:
        raise ValueError("K values must be positive")
    jobs = [(replace(config, seed=s), ks) for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = dict(pool.map(_run_seed, jobs))
    else:
        runs = dict(map(_run_seed, jobs))

    means = []
    for model in MODELS:
        for k in ks:
            picked = [r for s in seeds for r in runs[s] if r.model == model and r.k == k]
            avg = {
                name: sum(getattr(r, name) for r in picked) / len(picked)
                for name in ("precision", "recall", "dcg", "dcg_star", "ndcg")
            }
            means.append(EvalReport(model, k, **avg))
    return means, runs


def summary_csv(reports: Iterable[EvalReport]) -> str:
    """Rows of ``model,K,precision,recall,dcg,dcg_star,ndcg``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for r in reports:
        row = [r.model, r.k] + [f"{v:.6f}" for v in r.summary_row()[2:]]
        writer.writerow(row)
    return buf.getvalue()


def runs_csv(runs: dict[int, list[EvalReport]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("seed", *SUMMARY_COLUMNS))
    for seed in sorted(runs):
        for r in runs[seed]:
            writer.writerow([seed, r.model, r.k] + [f"{v:.6f}" for v in r.summary_row()[2:]])
    return buf.getvalue()
