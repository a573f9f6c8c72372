"""Command-line interface.

Exit codes: 0 on success, 1 when scoring fails at runtime, 2 for usage
errors and unreadable or invalid input files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bundled
from .bench import DEFAULT_KS, DEFAULT_SEEDS, run_bench, runs_csv, summary_csv
from .datagen import GenConfig, generate, read_config
from .distance import build_similarity_matrix
from .evaluation import (
    evaluate,
    format_recommendations,
    parse_recommendations,
    recommendations_json,
)
from .profiles import (
    ParseError,
    format_preferences,
    format_profiles,
    read_locations,
    read_preferences,
    read_profiles,
)
from .ranker import recommend_from_matrix
from .taxonomy import TaxonomyError, UnknownConceptError, read_taxonomy

log = logging.getLogger("reciprec")


class UsageError(Exception):
    """Bad arguments or missing input; exit code 2."""


@dataclass
class RunManifest:
    profiles: Path | None = None
    prefs: Path | None = None
    taxonomy: Path | None = None
    locations: Path | None = None
    ks: list[int] = field(default_factory=list)
    reciprocal: bool = True
    out: Path | None = None
    seeds: list[int] = field(default_factory=list)
    recs: Path | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunManifest:
        get = lambda name: getattr(args, name, None)  # noqa: E731
        ks = get("k")
        ks = [] if ks is None else (ks if isinstance(ks, list) else [ks])
        seeds = get("seed")
        seeds = [] if seeds is None else (seeds if isinstance(seeds, list) else [seeds])
        manifest = cls(
            profiles=_opt_path(get("profiles")),
            prefs=_opt_path(get("prefs")),
            taxonomy=_opt_path(get("taxonomy")),
            locations=_opt_path(get("locations")),
            ks=ks,
            reciprocal=not get("no_reciprocal"),
            out=_opt_path(get("out")),
            seeds=seeds,
            recs=_opt_path(get("recs")),
        )
        manifest.validate()
        return manifest

    def validate(self) -> None:
        missing = [
            f"--{name} {p}"
            for name in ("taxonomy", "locations", "profiles", "prefs", "recs")
            if (p := getattr(self, name)) is not None and not p.is_file()
        ]
        if missing:
            raise UsageError("file not found: " + ", ".join(missing))
        bad = [k for k in self.ks if k < 1]
        if bad:
            raise UsageError(f"--k must be a positive integer, got {bad[0]}")

    def load_tables(self):
        tax = read_taxonomy(self.taxonomy) if self.taxonomy else bundled.taxonomy()
        loc = read_locations(self.locations) if self.locations else bundled.locations()
        return tax, loc

    def load_population(self):
        if self.profiles is None or self.prefs is None:
            raise UsageError("--profiles and --prefs are required")
        return read_profiles(self.profiles), read_preferences(self.prefs)


def _opt_path(value) -> Path | None:
    return None if value is None else Path(value)


def _emit(manifest: RunManifest, name: str, text: str) -> None:
    if manifest.out is None:
        sys.stdout.write(text)
        return
    manifest.out.mkdir(parents=True, exist_ok=True)
    target = manifest.out / name
    target.write_text(text, encoding="utf-8")
    log.info("wrote %s", target)


def cmd_matrix(manifest: RunManifest) -> int:
    tax, loc = manifest.load_tables()
    profiles, prefs = manifest.load_population()
    if len(profiles) < 2:
        log.warning("fewer than two learners: the matrix has no defined entries")
    matrix = build_similarity_matrix(profiles, prefs, tax, loc)
    _emit(manifest, "matrix.csv", matrix.to_csv())
    return 0


def cmd_recommend(manifest: RunManifest) -> int:
    if len(manifest.ks) != 1:
        raise UsageError("recommend takes exactly one --k value")
    tax, loc = manifest.load_tables()
    profiles, prefs = manifest.load_population()
    matrix = build_similarity_matrix(profiles, prefs, tax, loc)
    lists = recommend_from_matrix(matrix, profiles, prefs, manifest.ks[0], tax, loc, reciprocal=manifest.reciprocal)
    _emit(manifest, "recommendations.csv", format_recommendations(lists))
    if manifest.out is not None:
        _emit(manifest, "recommendations.json", recommendations_json(lists) + "\n")
    return 0


def cmd_evaluate(manifest: RunManifest) -> int:
    reports = []
    if manifest.recs is not None:
        recs = parse_recommendations(manifest.recs.read_text(encoding="utf-8"))
        for k in manifest.ks or [recs.k]:
            if k > recs.k:
                raise UsageError(f"--k {k} exceeds the {recs.k} ranks in {manifest.recs}")
            reports.append(evaluate(recs.truncated(k), "supplied"))
    else:
        if not manifest.ks:
            raise UsageError("--k is required unless --recs is given")
        tax, loc = manifest.load_tables()
        profiles, prefs = manifest.load_population()
        matrix = build_similarity_matrix(profiles, prefs, tax, loc)
        models = ["reciprocal", "baseline"] if manifest.reciprocal else ["baseline"]
        for model in models:
            by_k = recommend_from_matrix(
                matrix, profiles, prefs, manifest.ks, tax, loc, reciprocal=model == "reciprocal"
            )
            reports.extend(evaluate(by_k[k], model) for k in sorted(by_k))
    _emit(manifest, "summary.csv", summary_csv(reports))
    if manifest.out is not None:
        _emit(manifest, "report.json", json.dumps([r.to_json() for r in reports], indent=2) + "\n")
    return 0


def cmd_generate(manifest: RunManifest, config: GenConfig) -> int:
    tax, loc = manifest.load_tables()
    profiles, prefs = generate(config, tax, loc)
    if manifest.out is None:
        raise UsageError("generate needs --out")
    _emit(manifest, "profiles.csv", format_profiles(profiles))
    _emit(manifest, "preferences.csv", format_preferences(prefs))
    return 0


def cmd_bench(manifest: RunManifest, config: GenConfig, workers: int) -> int:
    means, runs = run_bench(manifest.seeds or DEFAULT_SEEDS, manifest.ks or DEFAULT_KS, config, workers)
    _emit(manifest, "bench.csv", summary_csv(means))
    if manifest.out is not None:
        _emit(manifest, "runs.csv", runs_csv(runs))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--taxonomy", help="parent,child edge list (default: bundled)")
    common.add_argument("--locations", help="city,country,timezone table (default: bundled)")
    common.add_argument("--out", help="output directory (default: CSV to stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    population = argparse.ArgumentParser(add_help=False)
    population.add_argument("--profiles", help="learner profile CSV")
    population.add_argument("--prefs", help="learner preference CSV")

    gen = argparse.ArgumentParser(add_help=False)
    gen.add_argument("--config", help="generator key = value file")
    gen.add_argument("--size", type=int, help="population size (overrides config)")

    parser = argparse.ArgumentParser(prog="reciprec", description="Reciprocal learner recommendation and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("matrix", parents=[common, population], help="write the directed distance matrix")

    p = sub.add_parser("recommend", parents=[common, population], help="write top-K lists")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--no-reciprocal", action="store_true", help="rank by one-directional distance")

    p = sub.add_parser("evaluate", parents=[common, population], help="precision/recall/NDCG report")
    p.add_argument("--k", type=int, nargs="+")
    p.add_argument("--recs", help="evaluate these owner_id,rank,candidate_id lists instead")
    p.add_argument("--no-reciprocal", action="store_true", help="evaluate the baseline only")

    p = sub.add_parser("generate", parents=[common, gen], help="write a synthetic population")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("bench", parents=[common, gen], help="average both models over seeds")
    p.add_argument("--k", type=int, nargs="+", default=list(DEFAULT_KS))
    p.add_argument("--seed", type=int, nargs="+", default=list(DEFAULT_SEEDS))
    p.add_argument("--workers", type=int, default=1)
    return parser


def _gen_config(args) -> GenConfig:
    if args.config and not Path(args.config).is_file():
        raise UsageError(f"--config: file not found: {args.config}")
    try:
        config = read_config(args.config) if args.config else GenConfig()
        if args.size is not None:
            config.size = args.size
        if getattr(args, "seed", None) is not None and not isinstance(args.seed, list):
            config.seed = args.seed
        config.validate()
    except ValueError as exc:
        raise UsageError(f"invalid generator config: {exc}") from None
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        manifest = RunManifest.from_args(args)
        if args.command == "matrix":
            return cmd_matrix(manifest)
        if args.command == "recommend":
            return cmd_recommend(manifest)
        if args.command == "evaluate":
            return cmd_evaluate(manifest)
        if args.command == "generate":
            return cmd_generate(manifest, _gen_config(args))
        return cmd_bench(manifest, _gen_config(args), args.workers)
    except UnknownConceptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ParseError, TaxonomyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
