"""Preference-to-profile distances and the directed similarity matrix.

The distance from learner ``x`` to learner ``y`` compares ``x``'s stated
preferences with ``y``'s attributes.  Each of the five attribute distances
lies in [0, 1]; attributes without a preference contribute 0, and the sum is
always divided by five.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .profiles import (
    ATTRIBUTES,
    LearnerProfile,
    LocationScope,
    LocationTable,
    ParseError,
    Preference,
)
from .taxonomy import Taxonomy

log = logging.getLogger(__name__)

N_ATTRIBUTES = len(ATTRIBUTES)
MAX_LEVEL_GAP = 4

__all__ = [
    "MAX_LEVEL_GAP",
    "AttributeDistances",
    "SimilarityMatrix",
    "ordinal_distance",
    "nominal_distance",
    "location_distance",
    "attribute_distances",
    "distance_score",
    "build_similarity_matrix",
]


def ordinal_distance(pref_levels: Iterable[int], value: int, max_gap: int = MAX_LEVEL_GAP) -> float:
    """Gap from ``value`` to the nearest acceptable level, scaled by ``max_gap``."""
    return min(abs(level - value) for level in pref_levels) / max_gap


def nominal_distance(pref, actual) -> int:
    return 0 if pref == actual else 1


def location_distance(
    scope: LocationScope,
    city_x: str,
    city_y: str,
    table: LocationTable,
    unknown: set[str] | None = None,
) -> int:
    """0 when the two cities agree under ``scope``, else 1.

    A city missing from ``table`` always yields 1; its name is added to
    ``unknown`` when a set is supplied.
    """
    scope = LocationScope(scope)
    info_x, info_y = table.lookup(city_x), table.lookup(city_y)
    if info_x is None or info_y is None:
        missing = [c for c, info in ((city_x, info_x), (city_y, info_y)) if info is None]
        if unknown is not None:
            unknown.update(missing)
        log.warning("unknown city %s; location distance set to 1", ", ".join(map(repr, missing)))
        return 1
    if scope is LocationScope.SAME_CITY:
        return nominal_distance(table.key(city_x), table.key(city_y))
    if scope is LocationScope.SAME_COUNTRY:
        return nominal_distance(info_x[0].casefold(), info_y[0].casefold())
    return nominal_distance(info_x[1], info_y[1])


@dataclass(frozen=True)
class AttributeDistances:
    """Per-attribute distances in :data:`ATTRIBUTES` order.

    ``expressed[i]`` is False when the preference left attribute ``i``
    undefined; the matching entry in ``values`` is then 0.
    """

    values: tuple[float, ...]
    expressed: tuple[bool, ...]

    def __getitem__(self, attribute: str) -> float:
        return self.values[ATTRIBUTES.index(attribute)]

    def score(self) -> float:
        total = 0.0
        for v in self.values:
            total = total + v
        return total / N_ATTRIBUTES


def attribute_distances(
    pref: Preference,
    profile: LearnerProfile,
    taxonomy: Taxonomy,
    locations: LocationTable,
    owner: LearnerProfile | None = None,
    unknown: set[str] | None = None,
) -> AttributeDistances:
    """Distances between ``pref`` and ``profile`` for all five attributes.

    ``owner`` is the profile of the learner holding ``pref``; it is needed
    only for the location term, which compares the two learners' cities.
    """
    values = []
    for attribute in ATTRIBUTES:
        wanted = pref.value(attribute)
        if wanted is None:
            values.append(0.0)
        elif attribute == "age":
            values.append(ordinal_distance(wanted, profile.age_level))
        elif attribute == "gen":
            values.append(float(nominal_distance(wanted, profile.gender)))
        elif attribute == "loc":
            if owner is None:
                raise ValueError("owner profile required to score a location preference")
            values.append(float(location_distance(wanted, owner.location, profile.location, locations, unknown)))
        elif attribute == "qua":
            values.append(ordinal_distance(wanted, profile.qualification))
        else:
            values.append(taxonomy.interest_distance(wanted, profile.interests))
    expressed = tuple(pref.value(a) is not None for a in ATTRIBUTES)
    return AttributeDistances(tuple(values), expressed)


def distance_score(
    pref: Preference,
    profile: LearnerProfile,
    taxonomy: Taxonomy,
    locations: LocationTable,
    owner: LearnerProfile | None = None,
) -> float:
    """Mean of the five attribute distances from ``pref`` to ``profile``."""
    if pref.learner_id == profile.id:
        raise ValueError("a learner is not scored against itself")
    return attribute_distances(pref, profile, taxonomy, locations, owner).score()


@dataclass(frozen=True)
class SimilarityMatrix:
    """Directed distances: ``values[i, j]`` scores learner ``ids[i]``'s
    preferences against learner ``ids[j]``'s profile.  The diagonal is NaN."""

    ids: tuple[int, ...]
    values: np.ndarray
    unknown_cities: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.values.shape != (len(self.ids), len(self.ids)):
            raise ValueError("matrix shape does not match id list")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate learner id in matrix")
        object.__setattr__(self, "_pos", {uid: i for i, uid in enumerate(self.ids)})
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return len(self.ids)

    def position(self, uid: int) -> int:
        try:
            return self._pos[uid]
        except KeyError:
            raise KeyError(f"learner {uid} is not in the matrix") from None

    def __getitem__(self, pair: tuple[int, int]) -> float:
        x, y = pair
        return float(self.values[self.position(x), self.position(y)])

    def to_csv(self, decimals: int = 6) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["user_id", *self.ids])
        for i, uid in enumerate(self.ids):
            row = [uid]
            for j in range(len(self.ids)):
                row.append("x" if i == j else f"{self.values[i, j]:.{decimals}f}")
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> SimilarityMatrix:
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows or rows[0][0].strip() != "user_id":
            raise ParseError("matrix CSV must start with a 'user_id' header")
        ids = tuple(int(c) for c in rows[0][1:])
        values = np.full((len(ids), len(ids)), np.nan)
        if [int(r[0]) for r in rows[1:]] != list(ids):
            raise ParseError("matrix row ids must match the header")
        for i, row in enumerate(rows[1:]):
            for j, cell in enumerate(row[1:]):
                if i != j:
                    values[i, j] = float(cell)
        return cls(ids, values)


class _Encoded:
    """Column-oriented numeric encoding of a population for vectorised scoring."""

    def __init__(self, profiles, preferences, taxonomy, locations):
        m = len(profiles)
        self.m = m
        self.age = np.array([p.age_level for p in profiles])
        self.qua = np.array([p.qualification for p in profiles])
        self.gender = np.array([p.gender == "F" for p in profiles], dtype=np.int8)

        # Per-owner gap to the nearest acceptable level, for each of the 5 levels.
        self.age_gap = np.zeros((m, 5))
        self.qua_gap = np.zeros((m, 5))
        self.has_age = np.zeros(m, bool)
        self.has_qua = np.zeros(m, bool)
        self.want_gender = np.full(m, -1, dtype=np.int8)
        self.scope = [None] * m
        for i, pref in enumerate(preferences):
            if pref.age is not None:
                self.has_age[i] = True
                self.age_gap[i] = [min(abs(lv - v) for lv in pref.age) for v in range(5)]
            if pref.qualification is not None:
                self.has_qua[i] = True
                self.qua_gap[i] = [min(abs(lv - v) for lv in pref.qualification) for v in range(5)]
            if pref.gender is not None:
                self.want_gender[i] = pref.gender == "F"
            self.scope[i] = pref.location

        self.unknown: set[str] = set()
        codes = {LocationScope.SAME_CITY: {}, LocationScope.SAME_COUNTRY: {}, LocationScope.SAME_TIMEZONE: {}}
        self.loc_code = {s: np.full(m, -1) for s in codes}
        for j, p in enumerate(profiles):
            info = locations.lookup(p.location)
            if info is None:
                self.unknown.add(p.location)
                continue
            keys = {
                LocationScope.SAME_CITY: locations.key(p.location),
                LocationScope.SAME_COUNTRY: info[0].casefold(),
                LocationScope.SAME_TIMEZONE: info[1],
            }
            for s, k in keys.items():
                self.loc_code[s][j] = codes[s].setdefault(k, len(codes[s]))

        table = taxonomy.similarity_table()
        c = table.shape[0]
        self.offered = np.zeros((m, c))
        for j, p in enumerate(profiles):
            self.offered[j, [taxonomy.index(t) for t in p.interests]] = 1.0
        # best[i, k]: highest similarity between any concept owner i wants and concept k.
        self.has_int = np.zeros(m, bool)
        self.best = np.zeros((m, c))
        for i, pref in enumerate(preferences):
            if pref.interests is not None:
                self.has_int[i] = True
                self.best[i] = table[[taxonomy.index(t) for t in pref.interests]].max(axis=0)
        self.used_concepts = np.flatnonzero(self.offered.any(axis=0))

    def rows(self, lo: int, hi: int) -> np.ndarray:
        cols = np.arange(self.m)
        d_age = np.where(self.has_age[lo:hi, None], self.age_gap[lo:hi][:, self.age] / MAX_LEVEL_GAP, 0.0)

        want = self.want_gender[lo:hi, None]
        d_gen = np.where(want >= 0, (want != self.gender[None, :]).astype(float), 0.0)

        d_loc = np.zeros((hi - lo, self.m))
        for r, i in enumerate(range(lo, hi)):
            scope = self.scope[i]
            if scope is None:
                continue
            code = self.loc_code[scope]
            d_loc[r] = ((code != code[i]) | (code < 0) | (code[i] < 0)).astype(float)

        d_qua = np.where(self.has_qua[lo:hi, None], self.qua_gap[lo:hi][:, self.qua] / MAX_LEVEL_GAP, 0.0)

        sim = np.zeros((hi - lo, self.m))
        best = self.best[lo:hi]
        for k in self.used_concepts:
            np.maximum(sim, best[:, k, None] * self.offered[None, :, k], out=sim)
        d_int = np.where(self.has_int[lo:hi, None], 1 - sim, 0.0)

        # Summed in attribute order so each entry equals the scalar path bit for bit.
        score = (((d_age + d_gen) + d_loc) + d_qua) + d_int
        score = score / N_ATTRIBUTES
        score[np.arange(hi - lo), cols[lo:hi]] = np.nan
        return score


def build_similarity_matrix(
    profiles: Sequence[LearnerProfile],
    preferences: Sequence[Preference],
    taxonomy: Taxonomy,
    locations: LocationTable,
    workers: int = 1,
    block: int = 256,
) -> SimilarityMatrix:
    """Score every learner's preferences against every other learner's profile.

    Args:
        profiles: the population; row/column order follows this sequence.
        preferences: exactly one record per profile, in any order.
        workers: number of threads scoring row blocks. The result does not
            depend on this value.

    Raises:
        ValueError: when a profile has no preference record or vice versa.
        UnknownConceptError: when an interest is not in ``taxonomy``.
    """
    by_owner = {p.learner_id: p for p in preferences}
    ids = tuple(p.id for p in profiles)
    missing = [uid for uid in ids if uid not in by_owner]
    if missing:
        raise ValueError(f"no preference record for learner(s) {missing}")
    extra = sorted(set(by_owner) - set(ids))
    if extra:
        raise ValueError(f"preference record(s) for unknown learner(s) {extra}")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate learner id")
    if not profiles:
        return SimilarityMatrix((), np.zeros((0, 0)))

    enc = _Encoded(profiles, [by_owner[uid] for uid in ids], taxonomy, locations)
    if enc.unknown:
        log.warning(
            "%d unknown cit%s (location distance 1): %s",
            len(enc.unknown),
            "y" if len(enc.unknown) == 1 else "ies",
            ", ".join(sorted(enc.unknown)),
        )
    spans = [(lo, min(lo + block, enc.m)) for lo in range(0, enc.m, block)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: enc.rows(*s), spans))
    else:
        parts = [enc.rows(*s) for s in spans]
    return SimilarityMatrix(ids, np.vstack(parts), frozenset(enc.unknown))
