"""Reciprocity-aware evaluation of top-K recommendation lists.

A recommendation of ``y`` to ``x`` counts as successful only when ``x`` is
also among ``y``'s top-K.  Precision and recall are built on that notion,
and the gain of a successful pair rewards agreement between the two ranks
(no logarithmic discount).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .distance import SimilarityMatrix, build_similarity_matrix
from .profiles import LearnerProfile, LocationTable, ParseError, Preference
from .ranker import RecommendationList, recommend_from_matrix
from .taxonomy import Taxonomy

__all__ = [
    "RecommendationSet",
    "EvalReport",
    "is_successful",
    "precision_recall",
    "gain",
    "dcg",
    "ndcg",
    "evaluate",
    "baseline_recommend",
    "parse_recommendations",
    "format_recommendations",
    "recommendations_json",
    "SUMMARY_COLUMNS",
]

SUMMARY_COLUMNS = ("model", "K", "precision", "recall", "dcg", "dcg_star", "ndcg")


class RecommendationSet(Mapping[int, RecommendationList]):
    """Top-K lists for a whole population, all of the same length K."""

    def __init__(self, lists: Mapping[int, RecommendationList] | Iterable[RecommendationList]):
        if isinstance(lists, Mapping):
            lists = lists.values()
        self._lists = {r.owner: r for r in lists}
        lengths = {len(r) for r in self._lists.values()}
        if len(lengths) > 1:
            raise ValueError(f"recommendation lists have mixed lengths {sorted(lengths)}")
        self.k = lengths.pop() if lengths else 0
        self._ranks = {u: {c: i + 1 for i, c in enumerate(r.candidates)} for u, r in self._lists.items()}

    def __getitem__(self, uid: int) -> RecommendationList:
        return self._lists[uid]

    def __iter__(self):
        return iter(sorted(self._lists))

    def __len__(self) -> int:
        return len(self._lists)

    def truncated(self, k: int) -> RecommendationSet:
        """The same lists cut to their first ``k`` entries."""
        if k < 1 or k > self.k:
            raise ValueError(f"cannot truncate K={self.k} lists to {k}")
        return RecommendationSet(
            RecommendationList(r.owner, r.candidates[:k], r.scores[:k]) for r in self._lists.values()
        )

    def rank(self, owner: int, candidate: int) -> int | None:
        """1-based rank of ``candidate`` in ``owner``'s list, or None."""
        return self._ranks.get(owner, {}).get(candidate)


def is_successful(x: int, y: int, recs: RecommendationSet) -> bool:
    return recs.rank(x, y) is not None and recs.rank(y, x) is not None


def precision_recall(recs: RecommendationSet) -> tuple[dict[int, float], dict[int, float], float, float]:
    """Per-learner and mean precision/recall.

    Returns:
        ``(precision, recall, P, R)`` where the first two map learner id to
        its value. Recall is 0 for a learner nobody recommends.
    """
    recommended_by: dict[int, int] = {u: 0 for u in recs}
    for u in recs:
        for c in recs[u].candidates:
            recommended_by[c] = recommended_by.get(c, 0) + 1
    precision, recall = {}, {}
    for u in recs:
        hits = sum(is_successful(u, c, recs) for c in recs[u].candidates)
        precision[u] = hits / recs.k if recs.k else 0.0
        recall[u] = hits / recommended_by[u] if recommended_by[u] else 0.0
    m = len(recs)
    return precision, recall, _mean(precision.values(), m), _mean(recall.values(), m)


def _mean(values: Iterable[float], m: int) -> float:
    total = 0.0
    for v in values:
        total += v
    return total / m if m else 0.0


def gain(u: int, i: int, recs: RecommendationSet) -> float:
    """Rank-agreement credit for recommending ``i`` to ``u``; 0 unless mutual."""
    ru, ri = recs.rank(u, i), recs.rank(i, u)
    if ru is None or ri is None:
        return 0.0
    return 1 / (1 + abs(ru - ri))


def dcg(recs: RecommendationSet) -> tuple[dict[int, float], float]:
    """Per-learner DCG (summed gains over that learner's successes) and their mean."""
    per = {}
    for u in recs:
        total, successes = 0.0, 0
        for c in recs[u].candidates:
            g = gain(u, c, recs)
            total += g
            successes += is_successful(u, c, recs)
        per[u] = total / successes if successes else 0.0
    return per, _mean(per.values(), len(recs))


def ndcg(recs: RecommendationSet) -> tuple[float, float, float]:
    """Returns ``(DCG, DCG*, NDCG)``.

    DCG* is the fraction of learners with at least one success; NDCG is 0
    when nobody has a success.
    """
    _, total = dcg(recs)
    with_success = sum(any(is_successful(u, c, recs) for c in recs[u].candidates) for u in recs)
    ideal = with_success / len(recs) if len(recs) else 0.0
    return total, ideal, (total / ideal if ideal else 0.0)


@dataclass
class EvalReport:
    model: str
    k: int
    precision: float
    recall: float
    dcg: float
    dcg_star: float
    ndcg: float
    per_learner: dict[int, dict[str, float]] = field(default_factory=dict)

    def summary_row(self) -> list:
        return [self.model, self.k, self.precision, self.recall, self.dcg, self.dcg_star, self.ndcg]

    def rounded(self, decimals: int = 2) -> dict[str, float]:
        """Display values, rounded half-up like a printed table."""
        from decimal import ROUND_HALF_UP, Decimal

        q = Decimal(1).scaleb(-decimals)
        return {
            name: float(Decimal(repr(getattr(self, name))).quantize(q, rounding=ROUND_HALF_UP))
            for name in ("precision", "recall", "dcg", "dcg_star", "ndcg")
        }

    def to_json(self) -> dict:
        data = asdict(self)
        data["per_learner"] = {str(u): v for u, v in self.per_learner.items()}
        return data


def evaluate(recs: RecommendationSet | Mapping[int, RecommendationList], model: str = "reciprocal") -> EvalReport:
    if not isinstance(recs, RecommendationSet):
        recs = RecommendationSet(recs)
    p_x, r_x, p, r = precision_recall(recs)
    d_x, _ = dcg(recs)
    total, ideal, normalized = ndcg(recs)
    per = {u: {"precision": p_x[u], "recall": r_x[u], "dcg": d_x[u]} for u in recs}
    return EvalReport(model, recs.k, p, r, total, ideal, normalized, per)


def baseline_recommend(
    profiles: Sequence[LearnerProfile],
    preferences: Sequence[Preference],
    k: int,
    taxonomy: Taxonomy,
    locations: LocationTable,
    matrix: SimilarityMatrix | None = None,
) -> RecommendationSet:
    """Rank candidates by one-directional distance only, then priority re-rank."""
    if matrix is None:
        matrix = build_similarity_matrix(profiles, preferences, taxonomy, locations)
    lists = recommend_from_matrix(matrix, profiles, preferences, k, taxonomy, locations, reciprocal=False)
    return RecommendationSet(lists)


def format_recommendations(recs: Mapping[int, RecommendationList]) -> str:
    """CSV with columns ``owner_id,rank,candidate_id,score``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["owner_id", "rank", "candidate_id", "score"])
    for owner in sorted(recs):
        for rank, cand, score in recs[owner].entries():
            writer.writerow([owner, rank, cand, repr(score)])
    return buf.getvalue()


def recommendations_json(recs: Mapping[int, RecommendationList]) -> str:
    data = {
        str(owner): [{"rank": r, "candidate_id": c, "score": s} for r, c, s in recs[owner].entries()]
        for owner in sorted(recs)
    }
    return json.dumps(data, indent=2)


def parse_recommendations(source: str) -> RecommendationSet:
    """Read lists written by :func:`format_recommendations`; ``score`` may be blank."""
    reader = csv.DictReader(io.StringIO(source))
    needed = {"owner_id", "rank", "candidate_id"}
    if not reader.fieldnames or not needed <= {f.strip() for f in reader.fieldnames}:
        raise ParseError("recommendation file needs columns owner_id,rank,candidate_id[,score]")
    rows: dict[int, dict[int, tuple[int, float]]] = {}
    for row in reader:
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k}
        if not row.get("owner_id"):
            continue
        try:
            owner, rank, cand = int(row["owner_id"]), int(row["rank"]), int(row["candidate_id"])
            score = float(row["score"]) if row.get("score") else float("nan")
        except ValueError as exc:
            raise ParseError(f"line {reader.line_num}: {exc}") from None
        if rank in rows.setdefault(owner, {}):
            raise ParseError(f"line {reader.line_num}: duplicate rank {rank} for learner {owner}")
        rows[owner][rank] = (cand, score)
    lists = []
    for owner, by_rank in rows.items():
        if sorted(by_rank) != list(range(1, len(by_rank) + 1)):
            raise ParseError(f"ranks of learner {owner} are not 1..{len(by_rank)}")
        entries = [by_rank[r] for r in sorted(by_rank)]
        lists.append(RecommendationList(owner, tuple(c for c, _ in entries), tuple(s for _, s in entries)))
    return RecommendationSet(lists)
