import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reciprec.taxonomy import Taxonomy, TaxonomyError, UnknownConceptError, load_taxonomy


def test_construction(small_taxonomy):
    assert len(small_taxonomy) == 7
    assert small_taxonomy.depth("ML") == 4
    assert small_taxonomy.depth("root") == 1
    assert small_taxonomy.root == "root"
    assert set(small_taxonomy.leaves()) == {"football", "ML", "soccer"}


@pytest.mark.parametrize(
    "text, message",
    [
        ("a,b\nb,a\n", "cycle"),
        ("", "no root"),
        ("# only a comment\n", "no root"),
        ("r,a\nr,b\nq,c\n", "multiple roots"),
        ("r,a\nr,b\na,c\nb,c\n", "conflicting parents"),
        ("r,a\nb,c\nc,b\n", "cycle"),
        ("r,a,b\n", "expected"),
    ],
)
def test_invalid_edge_lists(text, message):
    with pytest.raises(TaxonomyError, match=message):
        load_taxonomy(text)


def test_repeated_identical_edge_is_fine():
    assert len(load_taxonomy("r,a\nr,a\n")) == 2


def test_lcs(small_taxonomy):
    assert small_taxonomy.lcs("football", "soccer") == "sports"
    assert small_taxonomy.lcs("ML", "ML") == "ML"
    assert small_taxonomy.lcs("football", "ML") == "root"
    assert small_taxonomy.lcs("AI", "ML") == "AI"


def test_names_are_case_insensitive(small_taxonomy):
    assert small_taxonomy.lcs("FOOTBALL", "Soccer") == "sports"
    assert small_taxonomy.name("ml") == "ML"


def test_unknown_concept(small_taxonomy):
    with pytest.raises(UnknownConceptError, match="cricket"):
        small_taxonomy.wu_palmer("cricket", "soccer")
    with pytest.raises(UnknownConceptError):
        small_taxonomy.lcs("ML", "chess")
    with pytest.raises(UnknownConceptError, match="chess"):
        small_taxonomy.interest_distance({"chess"}, {"ML"})


def test_wu_palmer_values(small_taxonomy):
    # Hand-evaluated on the seven-node fixture: depths root=1, sports=2, football=3, ML=4.
    assert small_taxonomy.wu_palmer("soccer", "soccer") == 1.0
    assert small_taxonomy.wu_palmer("football", "soccer") == pytest.approx(4 / 6)
    assert small_taxonomy.wu_palmer("football", "ML") == pytest.approx(2 / 7)
    assert small_taxonomy.wu_palmer("AI", "ML") == pytest.approx(6 / 7)


def test_interest_distance(small_taxonomy):
    assert small_taxonomy.interest_distance({"Football"}, {"Football"}) == 0.0
    assert small_taxonomy.interest_distance({"Football"}, {"soccer"}) == pytest.approx(1 / 3, abs=5e-4)
    assert small_taxonomy.interest_distance({"Soccer", "AI"}, {"ML"}) == pytest.approx(1 / 7)
    assert small_taxonomy.interest_distance({"Soccer", "AI"}, {"ML"}) == pytest.approx(0.143, abs=5e-4)


def test_similarity_table_matches_pairwise(taxonomy):
    table = taxonomy.similarity_table()
    for a, b in itertools.product(taxonomy, repeat=2):
        assert table[taxonomy.index(a), taxonomy.index(b)] == taxonomy.wu_palmer(a, b)


@st.composite
def random_tree(draw):
    n = draw(st.integers(1, 25))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n + 1)]
    edges = [(f"n{p}", f"n{i}") for i, p in enumerate(parents, 1)]
    return Taxonomy(edges), n


@given(random_tree(), st.data())
def test_wu_palmer_bounds_and_symmetry(tree, data):
    tax, n = tree
    a = data.draw(st.sampled_from(list(tax)))
    b = data.draw(st.sampled_from(list(tax)))
    sim = tax.wu_palmer(a, b)
    assert sim == tax.wu_palmer(b, a)
    assert 0 < sim <= 1
    assert (sim == 1) == (a == b)
    assert tax.interest_distance({a, b}, {a}) == 0


@given(st.integers(2, 30), st.data())
def test_deeper_common_ancestor_never_lowers_similarity(length, data):
    # Two leaves hanging off a chain; moving their branch point down the chain
    # deepens the LCS and must not decrease similarity.
    chain = [(f"c{i}", f"c{i + 1}") for i in range(length - 1)]
    lo = data.draw(st.integers(0, length - 2))
    hi = data.draw(st.integers(lo, length - 1))
    sims = []
    for branch in (lo, hi):
        # Leaves sit at a fixed depth so only the LCS moves.
        pad_a = [(f"c{branch}", "a0")] + [(f"a{i}", f"a{i + 1}") for i in range(length - branch - 1)]
        pad_b = [(f"c{branch}", "b0")] + [(f"b{i}", f"b{i + 1}") for i in range(length - branch - 1)]
        tax = Taxonomy(chain + pad_a + pad_b)
        leaf_a, leaf_b = f"a{length - branch - 1}", f"b{length - branch - 1}"
        assert tax.depth(leaf_a) == length + 1
        sims.append(tax.wu_palmer(leaf_a, leaf_b))
    assert sims[0] <= sims[1]
