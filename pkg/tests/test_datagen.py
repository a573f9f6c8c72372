import math
from collections import Counter

import pytest

from reciprec.datagen import GenConfig, generate, load_config
from reciprec.profiles import format_preferences, format_profiles, parse_preferences, parse_profiles


def test_deterministic():
    a = generate(GenConfig(size=1000, seed=7))
    b = generate(GenConfig(size=1000, seed=7))
    assert format_profiles(a[0]) == format_profiles(b[0])
    assert format_preferences(a[1]) == format_preferences(b[1])


def test_seeds_differ():
    a, _ = generate(GenConfig(size=50, seed=1))
    b, _ = generate(GenConfig(size=50, seed=2))
    assert [(p.age, p.gender, p.location, p.qualification, p.interests) for p in a] != [
        (p.age, p.gender, p.location, p.qualification, p.interests) for p in b
    ]


def test_two_learners(taxonomy):
    profiles, prefs = generate(GenConfig(size=2, seed=0))
    assert [p.id for p in profiles] == [1, 2] == [p.learner_id for p in prefs]
    for p in profiles:
        assert all(t in taxonomy for t in p.interests)
    for pref in prefs:
        assert pref.defined() and pref.priorities <= pref.defined()


def _within_three_sigma(counts, weights, n):
    weights = [w / sum(weights) for w in weights]
    for level, w in enumerate(weights):
        sigma = math.sqrt(n * w * (1 - w))
        assert abs(counts.get(level, 0) - n * w) <= 3 * sigma, (level, counts, weights)


def test_histograms_match_configured_weights():
    config = GenConfig(size=1000, seed=11)
    profiles, _ = generate(config)
    _within_three_sigma(Counter(p.age_level for p in profiles), config.age_weights, 1000)
    _within_three_sigma(Counter(p.qualification for p in profiles), config.qualification_weights, 1000)
    males = sum(p.gender == "M" for p in profiles)
    assert abs(males - 600) <= 3 * math.sqrt(1000 * 0.6 * 0.4)


def test_round_trip_through_files():
    profiles, prefs = generate(GenConfig(size=200, seed=5))
    assert parse_profiles(format_profiles(profiles)) == profiles
    assert parse_preferences(format_preferences(prefs)) == prefs


def test_config_file():
    config = load_config("size = 12\nseed = 3  # comment\nage_weights = 1, 0, 0, 0, 0\ninterest_count = 2, 2\n")
    assert (config.size, config.seed, config.interest_count) == (12, 3, (2, 2))
    profiles, _ = generate(config)
    assert all(p.age_level == 0 and len(p.interests) == 2 for p in profiles)


@pytest.mark.parametrize(
    "kwargs",
    [{"size": 1}, {"male_ratio": 1.5}, {"age_weights": (1, 2)}, {"define_probability": (0, 0, 0, 0, 0)}],
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        GenConfig(**kwargs)


def test_unknown_config_key():
    with pytest.raises(ValueError, match="colour"):
        load_config("colour = red\n")


def test_empty_pools():
    from reciprec.profiles import LocationTable

    with pytest.raises(ValueError, match="city"):
        generate(GenConfig(size=5), locations=LocationTable())
