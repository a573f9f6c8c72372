"""Accessors for the data files shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .evaluation import RecommendationSet, parse_recommendations
from .profiles import LearnerProfile, LocationTable, Preference, parse_locations, parse_preferences, parse_profiles
from .taxonomy import Taxonomy, load_taxonomy


def path(name: str) -> Path:
    """Filesystem path of a bundled data file (e.g. ``"taxonomy.csv"``)."""
    return Path(str(resources.files("reciprec.data").joinpath(name)))


def _text(name: str) -> str:
    return resources.files("reciprec.data").joinpath(name).read_text(encoding="utf-8")


def taxonomy() -> Taxonomy:
    return load_taxonomy(_text("taxonomy.csv"))


def locations() -> LocationTable:
    return parse_locations(_text("locations.csv"))


def sample_profiles() -> list[LearnerProfile]:
    """The four-learner sample population."""
    return parse_profiles(_text("sample_profiles.csv"))


def sample_preferences() -> list[Preference]:
    return parse_preferences(_text("sample_preferences.csv"))


def sample_recommendations() -> RecommendationSet:
    """Five-deep ranked lists for six learners; truncate to evaluate at K=3."""
    return parse_recommendations(_text("six_learner_recs.csv"))
