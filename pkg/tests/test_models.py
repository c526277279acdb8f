import numpy as np
import pytest

from zagreb_lab import (
    Caterpillar,
    DegenerateDistributionError,
    ExtendedRRT,
    ParameterError,
    Port,
    RngStream,
    grow_to,
    init_state,
    sample_degree_proportional,
    sample_uniform_subset,
    step,
)

# chi-square upper critical values at alpha = 0.001
CHI2_CRIT = {2: 13.816, 9: 27.877}


def test_spec_validation():
    with pytest.raises(ParameterError):
        ExtendedRRT(m0=2, m=3)  # m > m0
    with pytest.raises(ParameterError):
        ExtendedRRT(m0=0, m=0)
    with pytest.raises(ParameterError):
        Caterpillar(m=1)
    ExtendedRRT(m0=1, m=1)
    Caterpillar(m=2)


def test_init_states():
    s = init_state(ExtendedRRT(m0=3, m=2))
    assert s.n == 1 and s.degrees == [2, 2, 2] and s.bundle.zagreb == 12

    s = init_state(ExtendedRRT(m0=1, m=1))
    assert s.degrees == [0] and s.bundle.zagreb == 0

    s = init_state(Port())
    assert s.n == 2 and s.degrees == [1, 1]
    assert s.bundle.zagreb == 2 and s.bundle.cubic == 2

    s = init_state(Caterpillar(m=2))
    assert s.n == 0 and s.degrees == [1, 1] and s.bundle.zagreb == 2

    s = init_state(Caterpillar(m=4))
    assert s.degrees == [1, 2, 2, 1]
    assert s.bundle.zagreb == 4 * 4 - 6


def test_ext_rrt_first_step_from_isolated_node():
    # m0=1: the unique degree-0 node must be selected
    state = init_state(ExtendedRRT(m0=1, m=1))
    record = step(state, RngStream(123))
    assert record.chosen_parents == (0,)
    assert record.degree_before == (0,)
    assert state.degrees == [1, 1]
    assert state.bundle.zagreb == 2


def test_ext_rrt_unique_subset_forced():
    # m0=2, m=2 at n=2: only one 2-subset exists
    state = init_state(ExtendedRRT(m0=2, m=2))
    record = step(state, RngStream(5))
    assert sorted(record.chosen_parents) == [0, 1]


def test_step_parent_counts_and_distinctness():
    for spec, want in [(ExtendedRRT(5, 3), 3), (Port(), 1), (Caterpillar(3), 1)]:
        state = init_state(spec)
        rng = RngStream(99, 3)
        for _ in range(40):
            record = step(state, rng)
            assert len(record.chosen_parents) == want
            assert len(set(record.chosen_parents)) == want


def test_grow_to_forced_small_cases():
    # 3-node tree is a path regardless of randomness
    assert grow_to(Port(), 3, RngStream(0)).bundle.zagreb == 6
    assert grow_to(ExtendedRRT(1, 1), 3, RngStream(1)).bundle.zagreb == 6
    st = grow_to(Caterpillar(2), 1, RngStream(2))
    assert st.bundle.zagreb == 6  # spine (2,1) plus one leaf


def test_grow_to_below_initial_time():
    with pytest.raises(ParameterError):
        grow_to(Port(), 1, RngStream(0))
    with pytest.raises(ParameterError):
        grow_to(Caterpillar(2), -1, RngStream(0))


def test_grow_to_observer_sees_every_step():
    records = []
    state = grow_to(Port(), 30, RngStream(11), observer=records.append)
    assert [r.time for r in records] == list(range(3, 31))
    assert state.n == 30


def test_determinism_and_stream_independence():
    for spec in (ExtendedRRT(3, 2), Port(), Caterpillar(3)):
        a = grow_to(spec, 60, RngStream(42, 7)).degrees
        b = grow_to(spec, 60, RngStream(42, 7)).degrees
        assert a == b
        c = grow_to(spec, 60, RngStream(42, 8)).degrees
        assert a != c  # overwhelmingly likely for 60 steps


@pytest.mark.parametrize(
    "spec",
    [ExtendedRRT(3, 2), ExtendedRRT(1, 1), Port(), Caterpillar(2), Caterpillar(5)],
    ids=str,
)
def test_long_run_invariants(spec):
    """Degree totals, node counts, and incremental indices over 10^4 steps."""
    state = init_state(spec)
    rng = RngStream(1234, 0)
    target = state.n + 10_000
    check_at = set(range(state.n, target + 1, 1000)) | {target}
    while state.n < target:
        record = step(state, rng)
        # chosen parents gained exactly one degree each
        for parent, before in zip(record.chosen_parents, record.degree_before):
            assert state.degrees[parent] == before + 1
        if state.n in check_at:
            assert state.bundle == state.recomputed_bundle()
            n = state.n
            if isinstance(spec, ExtendedRRT):
                assert len(state.degrees) == spec.m0 + n - 1
                assert sum(state.degrees) == spec.m0 * (spec.m0 - 1) + 2 * spec.m * (n - 1)
            elif isinstance(spec, Port):
                assert len(state.degrees) == n
                assert sum(state.degrees) == 2 * (n - 1)
                assert 4 * n - 6 <= state.bundle.zagreb <= n * (n - 1)
            else:
                assert state.leaf_count == n
                assert sum(state.degrees) == n + 2 * spec.m - 2
                assert min(state.degrees) >= 1
    assert state.total_degree == sum(state.degrees)


def test_sample_uniform_subset_validation_and_edges():
    rng = RngStream(0)
    assert sorted(sample_uniform_subset(2, 2, rng)) == [0, 1]
    with pytest.raises(ParameterError):
        sample_uniform_subset(3, 4, rng)
    with pytest.raises(ParameterError):
        sample_uniform_subset(3, 0, rng)


def test_sample_uniform_subset_singletons_uniform():
    rng = RngStream(31337)
    draws = 30_000
    counts = [0, 0, 0]
    for _ in range(draws):
        (j,) = sample_uniform_subset(3, 1, rng)
        counts[j] += 1
    expected = draws / 3
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    assert chi2 < CHI2_CRIT[2]


def test_sample_uniform_subset_pairs_goodness_of_fit():
    # all 10 pairs from N=5 equiprobable; chi-square at alpha=0.001
    rng = RngStream(777)
    draws = 1_000_000
    counts = {}
    for _ in range(draws):
        pair = tuple(sorted(sample_uniform_subset(5, 2, rng)))
        counts[pair] = counts.get(pair, 0) + 1
    assert len(counts) == 10
    expected = draws / 10
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < CHI2_CRIT[9]


def test_sample_degree_proportional_exact_edges():
    rng = RngStream(1)
    assert sample_degree_proportional([0, 5, 0], rng) == 1
    with pytest.raises(DegenerateDistributionError):
        sample_degree_proportional([0, 0], rng)
    with pytest.raises(ParameterError):
        sample_degree_proportional([1, -1], rng)


def test_sample_degree_proportional_frequencies():
    # weights (3,2,1): frequencies within 4 sigma of (1/2, 1/3, 1/6)
    rng = RngStream(2024)
    draws = 1_000_000
    counts = [0, 0, 0]
    for _ in range(draws):
        counts[sample_degree_proportional([3, 2, 1], rng)] += 1
    for c, p in zip(counts, (0.5, 1 / 3, 1 / 6)):
        sigma = (p * (1 - p) * draws) ** 0.5
        assert abs(c - p * draws) <= 4 * sigma


def test_port_state_requires_endpoint_list():
    state = init_state(Port())
    state.endpoints = None
    with pytest.raises(ParameterError):
        step(state, RngStream(0))


def test_rng_stream_replays_and_matches_vector_draws():
    a = RngStream(9, 4)
    b = RngStream(9, 4)
    xs = [a.uniform() for _ in range(64)]
    assert np.allclose(xs, b.uniforms(64)) and xs == list(b2 for b2 in RngStream(9, 4).uniforms(64))
