from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zagreb_lab import IndexBundle, apply_attachment_delta, compute_bundle


def test_clique_bundle():
    b = compute_bundle([2, 2, 2])
    assert b == IndexBundle(zagreb=12, cubic=24, quartic=48)


def test_spine_with_leaf():
    b = compute_bundle([2, 1], leaf_count=1)
    assert b.zagreb == 6
    assert b.cubic == 10
    assert b.quartic == 18


def test_star_center_with_five_leaves():
    # star on n=5 leaves: Z = n^2 + n
    b = compute_bundle([5], leaf_count=5)
    assert b.zagreb == 30


def test_empty():
    assert compute_bundle([]) == IndexBundle(0, 0, 0)


def test_single_attachment_delta():
    b = IndexBundle(2, 2, 2)
    after = apply_attachment_delta(b, [1], 1)
    assert after.zagreb == 6  # 2 + 2*1 + 2
    assert after.quartic == 18  # degrees (2,1,1)


def test_clique_attachment_delta():
    b = compute_bundle([2, 2, 2])
    after = apply_attachment_delta(b, [2, 2], 2)
    assert after.zagreb == 26
    assert after == compute_bundle([3, 3, 2, 2])


@given(
    degrees=st.lists(st.integers(min_value=0, max_value=30), min_size=1, max_size=12),
    data=st.data(),
)
def test_delta_matches_recomputation(degrees, data):
    k = data.draw(st.integers(min_value=1, max_value=len(degrees)))
    parents = data.draw(
        st.lists(
            st.sampled_from(range(len(degrees))), min_size=k, max_size=k, unique=True
        )
    )
    before = compute_bundle(degrees)
    after = apply_attachment_delta(before, [degrees[p] for p in parents], len(parents))
    updated = [d + 1 if i in parents else d for i, d in enumerate(degrees)]
    assert after == compute_bundle(updated + [len(parents)])


@given(
    degrees=st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=15),
    leaves=st.integers(min_value=0, max_value=10),
)
def test_power_sum_ordering_for_positive_degrees(degrees, leaves):
    b = compute_bundle(degrees, leaf_count=leaves)
    assert b.zagreb <= b.cubic <= b.quartic
    assert b.zagreb >= sum(degrees) + leaves


def test_delta_strictly_increases():
    b = compute_bundle([1, 1])
    after = apply_attachment_delta(b, [1], 1)
    assert after.zagreb > b.zagreb
    assert after.cubic > b.cubic
    assert after.quartic > b.quartic
