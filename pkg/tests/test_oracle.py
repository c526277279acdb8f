from fractions import Fraction

import pytest

from zagreb_lab import (
    BudgetExceededError,
    Caterpillar,
    ExtendedRRT,
    ParameterError,
    Port,
    UndefinedSkewnessError,
    enumerate_distribution,
    history_count,
)

F = Fraction


def test_port_n4_atoms():
    dist = enumerate_distribution(Port(), 4)
    assert dist.atoms == {
        (10, 18, 34): F(1, 2),  # path
        (12, 30, 84): F(1, 2),  # star
    }


def test_caterpillar_m2_n2_atoms():
    dist = enumerate_distribution(Caterpillar(2), 2)
    assert dist.atoms == {
        (12, 30, 84): F(2, 3),  # spine (3,1) + 2 leaves
        (10, 18, 34): F(1, 3),  # spine (2,2) + 2 leaves
    }


def test_ext_rrt_m0_1_n4_atoms():
    dist = enumerate_distribution(ExtendedRRT(1, 1), 4)
    assert dist.atoms == {
        (12, 30, 84): F(1, 3),
        (10, 18, 34): F(2, 3),
    }


def test_support_sizes():
    assert len(enumerate_distribution(Port(), 4).atoms) == 2
    assert len(enumerate_distribution(ExtendedRRT(2, 1), 3).atoms) == 2


@pytest.mark.parametrize(
    "spec,n",
    [
        (Port(), 7),
        (ExtendedRRT(3, 2), 5),
        (ExtendedRRT(3, 3), 5),
        (Caterpillar(2), 6),
        (Caterpillar(3), 6),
    ],
    ids=str,
)
def test_probabilities_sum_to_one(spec, n):
    dist = enumerate_distribution(spec, n)
    assert dist.total_probability() == 1


def test_port_bounds_hold_on_support():
    for n in range(3, 9):
        dist = enumerate_distribution(Port(), n)
        for (z, _, _) in dist.atoms:
            assert 4 * n - 6 <= z <= n * (n - 1)


def test_moments_port_n4():
    dist = enumerate_distribution(Port(), 4)
    assert dist.moment("Z", 1) == 11
    assert dist.moment("Z", 2) == 122
    assert dist.moment("Y", 1) == 24
    assert dist.moment("X", 1) == 59
    assert dist.mixed_moment(1, 1) == 270
    assert dist.variance("Z") == 1


def test_mixed_moment_port_n2_and_degenerate():
    dist = enumerate_distribution(Port(), 2)
    assert dist.atoms == {(2, 2, 2): F(1)}
    assert dist.mixed_moment(1, 1) == 4
    assert dist.moment("Z", 1) == 2  # single atom: the atom's value
    assert dist.mixed_moment(2, 3) == 2**2 * 2**3


def test_moment_validation():
    dist = enumerate_distribution(Port(), 3)
    with pytest.raises(ParameterError):
        dist.moment("Z", 0)
    with pytest.raises(UndefinedSkewnessError):
        dist.skewness("Z")  # deterministic at n=3


def test_history_counts():
    assert history_count(Port(), 9) == 40320  # 2*3*...*8
    assert history_count(Caterpillar(3), 8) == 3**8
    assert history_count(ExtendedRRT(3, 3), 6) == 1 * 4 * 10 * 20 * 35


def test_budget_refusal_reports_count():
    spec = ExtendedRRT(3, 3)
    with pytest.raises(BudgetExceededError) as info:
        enumerate_distribution(spec, 12)
    assert info.value.history_count == history_count(spec, 12)
    assert info.value.history_count > 10**7
    # a tighter explicit budget refuses earlier
    with pytest.raises(BudgetExceededError):
        enumerate_distribution(Port(), 9, budget=1000)


def test_sorted_atoms_ordering():
    atoms = enumerate_distribution(Port(), 6).sorted_atoms()
    zs = [z for (z, _, _), _ in atoms]
    assert zs == sorted(zs)
