"""Reciprocal scoring, top-K ranking and priority re-ranking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .distance import SimilarityMatrix, attribute_distances, build_similarity_matrix
from .profiles import LearnerProfile, LocationTable, Preference
from .taxonomy import Taxonomy

__all__ = [
    "EPSILON",
    "ReciprocalScore",
    "RecommendationList",
    "harmonic_mean",
    "reciprocal_matrix",
    "reciprocal_scores",
    "top_k",
    "priority_satisfied",
    "priority_rerank",
    "recommend_from_matrix",
    "recommend_all",
]

# Stand-in for a zero distance so the harmonic mean stays defined.
EPSILON = 0.001


def harmonic_mean(a: float, b: float) -> float:
    """Harmonic mean of two distances, exact zeros replaced by :data:`EPSILON`."""
    a = EPSILON if a == 0 else a
    b = EPSILON if b == 0 else b
    return 2 * (a * b) / (a + b)


def reciprocal_matrix(matrix: SimilarityMatrix) -> np.ndarray:
    """Element-wise harmonic mean of the matrix and its transpose (NaN diagonal)."""
    a = np.where(matrix.values == 0, EPSILON, matrix.values)
    b = a.T
    return 2 * (a * b) / (a + b)


@dataclass(frozen=True)
class ReciprocalScore:
    x: int
    y: int
    forward: float
    backward: float
    value: float


@dataclass(frozen=True)
class RecommendationList:
    """Ranked candidates for one learner; rank ``r`` is ``candidates[r - 1]``."""

    owner: int
    candidates: tuple[int, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.candidates) != len(self.scores):
            raise ValueError("candidates and scores differ in length")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError(f"duplicate candidate in list of learner {self.owner}")
        if self.owner in self.candidates:
            raise ValueError(f"learner {self.owner} recommended to itself")

    @property
    def k(self) -> int:
        return len(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __contains__(self, uid) -> bool:
        return uid in self.candidates

    def rank(self, uid: int) -> int:
        return self.candidates.index(uid) + 1

    def entries(self) -> list[tuple[int, int, float]]:
        """``(rank, candidate, score)`` triples."""
        return [(r, c, s) for r, (c, s) in enumerate(zip(self.candidates, self.scores), 1)]


def reciprocal_scores(x: int, matrix: SimilarityMatrix) -> list[ReciprocalScore]:
    i = matrix.position(x)
    out = []
    for j, y in enumerate(matrix.ids):
        if j == i:
            continue
        fwd, bwd = float(matrix.values[i, j]), float(matrix.values[j, i])
        out.append(ReciprocalScore(x, y, fwd, bwd, harmonic_mean(fwd, bwd)))
    return out


def _ranked(ids: np.ndarray, scores: np.ndarray, owner_pos: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    mask = np.ones(len(ids), bool)
    mask[owner_pos] = False
    cand, vals = ids[mask], scores[mask]
    order = np.lexsort((cand, vals))[:k]
    return cand[order], vals[order]


def top_k(x: int, k: int, matrix: SimilarityMatrix, reciprocal: bool = True) -> RecommendationList:
    """The ``k`` candidates with the lowest score for learner ``x``.

    Scores are reciprocal (harmonic mean) distances, or the one-directional
    row of ``matrix`` when ``reciprocal`` is False.  Ties go to the smaller id
    and ``k`` is clipped to the number of other learners.
    """
    if k < 1:
        raise ValueError(f"K must be a positive integer, got {k}")
    i = matrix.position(x)
    if reciprocal:
        row = np.array([harmonic_mean(float(matrix.values[i, j]), float(matrix.values[j, i])) if j != i else np.nan
                        for j in range(len(matrix))])
    else:
        row = np.asarray(matrix.values[i], dtype=float)
    cand, vals = _ranked(np.asarray(matrix.ids), row, i, k)
    return RecommendationList(x, tuple(int(c) for c in cand), tuple(float(v) for v in vals))


def priority_satisfied(
    pref: Preference,
    attribute: str,
    candidate: LearnerProfile,
    taxonomy: Taxonomy,
    locations: LocationTable,
    owner: LearnerProfile | None = None,
) -> bool:
    """True when ``candidate`` matches ``pref`` exactly on ``attribute``."""
    return attribute_distances(pref, candidate, taxonomy, locations, owner)[attribute] == 0


def priority_rerank(
    recs: RecommendationList,
    pref: Preference,
    profiles: Mapping[int, LearnerProfile],
    taxonomy: Taxonomy,
    locations: LocationTable,
) -> RecommendationList:
    """Stable-sort ``recs`` by the number of priority attributes each candidate misses."""
    if not pref.priorities:
        return recs
    owner = profiles.get(recs.owner)
    misses = []
    for c in recs.candidates:
        dist = attribute_distances(pref, profiles[c], taxonomy, locations, owner)
        misses.append(sum(dist[a] != 0 for a in pref.priorities))
    order = sorted(range(len(recs)), key=lambda r: (misses[r], r))
    return RecommendationList(
        recs.owner,
        tuple(recs.candidates[r] for r in order),
        tuple(recs.scores[r] for r in order),
    )


def recommend_from_matrix(
    matrix: SimilarityMatrix,
    profiles: Sequence[LearnerProfile],
    preferences: Sequence[Preference],
    ks: int | Iterable[int],
    taxonomy: Taxonomy,
    locations: LocationTable,
    reciprocal: bool = True,
    rerank: bool = True,
):
    """Top-K lists (optionally priority re-ranked) for every learner in ``matrix``.

    Returns a dict ``owner -> RecommendationList`` when ``ks`` is an int, or
    a dict ``K -> {owner -> RecommendationList}`` when it is an iterable; the
    full ordering is computed once and shared across the K values.
    """
    single = isinstance(ks, (int, np.integer))
    k_values = [int(ks)] if single else sorted({int(k) for k in ks})
    if not k_values or min(k_values) < 1:
        raise ValueError("K must be a positive integer")
    by_id = {p.id: p for p in profiles}
    prefs = {p.learner_id: p for p in preferences}
    scores = reciprocal_matrix(matrix) if reciprocal else np.asarray(matrix.values)
    ids = np.asarray(matrix.ids)
    out: dict[int, dict[int, RecommendationList]] = {k: {} for k in k_values}
    for i, uid in enumerate(matrix.ids):
        cand, vals = _ranked(ids, scores[i], i, max(k_values))
        for k in k_values:
            recs = RecommendationList(int(uid), tuple(int(c) for c in cand[:k]), tuple(float(v) for v in vals[:k]))
            if rerank:
                recs = priority_rerank(recs, prefs[int(uid)], by_id, taxonomy, locations)
            out[k][int(uid)] = recs
    return out[k_values[0]] if single else out


def recommend_all(
    profiles: Sequence[LearnerProfile],
    preferences: Sequence[Preference],
    k: int,
    taxonomy: Taxonomy,
    locations: LocationTable,
    workers: int = 1,
) -> dict[int, RecommendationList]:
    """Build the similarity matrix once, then rank and re-rank every learner."""
    matrix = build_similarity_matrix(profiles, preferences, taxonomy, locations, workers=workers)
    return recommend_from_matrix(matrix, profiles, preferences, k, taxonomy, locations)
