"""Seeded synthetic learner populations for benchmarking.

Configuration files are plain ``key = value`` lines; list values are
comma-separated.  Unset keys keep their defaults::

    size = 1000
    seed = 7
    age_weights = 0.15, 0.35, 0.25, 0.12, 0.13
    interest_count = 1, 3
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bundled
from .profiles import ATTRIBUTES, LearnerProfile, LocationScope, Preference

__all__ = ["GenConfig", "generate", "load_config", "AGE_SPANS"]

# Inclusive age range sampled for each age level.
AGE_SPANS = ((16, 19), (20, 24), (25, 29), (30, 34), (35, 60))


@dataclass
class GenConfig:
    size: int = 1000
    seed: int = 0
    age_weights: tuple[float, ...] = (0.15, 0.35, 0.25, 0.12, 0.13)
    male_ratio: float = 0.6
    cities: tuple[str, ...] = ()
    qualification_weights: tuple[float, ...] = (0.05, 0.30, 0.35, 0.25, 0.05)
    interests: tuple[str, ...] = ()
    interest_count: tuple[int, int] = (1, 3)
    # Probability that a preference is stated, per attribute (age, gen, loc, qua, int).
    define_probability: tuple[float, ...] = (0.6, 0.4, 0.4, 0.5, 0.7)
    priority_probability: float = 0.3
    own_interest_probability: float = 0.5

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.size < 2:
            raise ValueError("population size must be at least 2")
        for name in ("age_weights", "qualification_weights"):
            w = getattr(self, name)
            if len(w) != 5 or min(w) < 0 or sum(w) <= 0:
                raise ValueError(f"{name} needs five non-negative weights")
        probs = [self.male_ratio, self.priority_probability, self.own_interest_probability, *self.define_probability]
        if any(not 0 <= p <= 1 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if len(self.define_probability) != len(ATTRIBUTES):
            raise ValueError("define_probability needs one value per attribute")
        if not any(self.define_probability):
            raise ValueError("at least one attribute needs a non-zero definition probability")
        lo, hi = self.interest_count
        if not 1 <= lo <= hi:
            raise ValueError("interest_count must satisfy 1 <= min <= max")


def load_config(text: str) -> GenConfig:
    """Parse ``key = value`` lines into a :class:`GenConfig`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[gen]\n" + text)
    known = {f.name: f for f in fields(GenConfig)}
    kwargs = {}
    for key, raw in parser["gen"].items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        default = getattr(GenConfig(), key)
        if isinstance(default, tuple):
            items = [s.strip() for s in raw.split(",") if s.strip()]
            cast = str if key in ("cities", "interests") else (int if key == "interest_count" else float)
            kwargs[key] = tuple(cast(s) for s in items)
        elif isinstance(default, int):
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    return GenConfig(**kwargs)


def read_config(path: str | Path) -> GenConfig:
    return load_config(Path(path).read_text(encoding="utf-8"))


def _normalized(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return w / w.sum()


def _level_set(rng: np.random.Generator) -> frozenset[int]:
    """A single level, an at-most threshold or an at-least threshold."""
    form = rng.integers(3)
    pivot = int(rng.integers(5))
    if form == 0:
        return frozenset({pivot})
    if form == 1:
        return frozenset(range(0, pivot + 1))
    return frozenset(range(pivot, 5))


def generate(config: GenConfig | None = None, taxonomy=None, locations=None) -> tuple[list[LearnerProfile], list[Preference]]:
    """Draw ``config.size`` profiles with one preference record each.

    Output depends only on ``config`` (including its seed) and the two
    lookup tables, which default to the bundled ones.
    """
    config = config or GenConfig()
    config.validate()
    if taxonomy is None:
        taxonomy = bundled.taxonomy()
    if locations is None:
        locations = bundled.locations()
    cities = list(config.cities) or locations.cities()
    pool = list(config.interests) or taxonomy.leaves()
    if not cities:
        raise ValueError("city pool is empty")
    if not pool:
        raise ValueError("interest pool is empty")
    for concept in pool:
        taxonomy.name(concept)
    lo, hi = config.interest_count
    hi = min(hi, len(pool))
    lo = min(lo, hi)

    rng = np.random.default_rng(config.seed)
    age_w = _normalized(config.age_weights)
    qua_w = _normalized(config.qualification_weights)
    scopes = list(LocationScope)

    profiles, prefs = [], []
    for uid in range(1, config.size + 1):
        level = int(rng.choice(5, p=age_w))
        a_lo, a_hi = AGE_SPANS[level]
        n_int = int(rng.integers(lo, hi + 1))
        own = frozenset(pool[i] for i in rng.choice(len(pool), size=n_int, replace=False))
        profile = LearnerProfile(
            id=uid,
            age=int(rng.integers(a_lo, a_hi + 1)),
            gender="M" if rng.random() < config.male_ratio else "F",
            location=cities[int(rng.integers(len(cities)))],
            qualification=int(rng.choice(5, p=qua_w)),
            interests=own,
        )
        profiles.append(profile)

        while True:
            defined = [a for a, p in zip(ATTRIBUTES, config.define_probability) if rng.random() < p]
            if defined:
                break
        values = {}
        if "age" in defined:
            values["age"] = _level_set(rng)
        if "gen" in defined:
            values["gender"] = "M" if rng.random() < 0.5 else "F"
        if "loc" in defined:
            values["location"] = scopes[int(rng.integers(len(scopes)))]
        if "qua" in defined:
            values["qualification"] = _level_set(rng)
        if "int" in defined:
            if rng.random() < config.own_interest_probability:
                values["interests"] = frozenset({sorted(own)[int(rng.integers(len(own)))]})
            else:
                values["interests"] = frozenset({pool[int(rng.integers(len(pool)))]})
        priorities = frozenset(a for a in defined if rng.random() < config.priority_probability)
        prefs.append(Preference(learner_id=uid, priorities=priorities, **values))
    return profiles, prefs
