"""Exhaustive enumeration of growth histories with exact probabilities.

For small n every history of a model can be enumerated and weighted by the
product of its step probabilities, giving the full distribution of the index
bundle as exact rationals.  All three indices are functions of the degree
multiset alone, so histories reaching the same multiset are merged eagerly;
this keeps the state space tiny even when the raw history count is large.

The raw history count is checked against a budget first and the call refuses
outright when it would be exceeded: a truncated enumeration would silently
bias every downstream comparison.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import BudgetExceededError, ParameterError, UndefinedSkewnessError
from .models import Caterpillar, ExtendedRRT, ModelSpec, Port
from .moments import exact_skewness

DEFAULT_BUDGET = 10**7


@dataclass
class ExactDistribution:
    """Joint law of (zagreb, cubic, quartic) at time n, as exact rationals."""

    model: ModelSpec
    n: int
    atoms: dict[tuple[int, int, int], Fraction]

    _WHICH = {"Z": 0, "Y": 1, "X": 2}

    def total_probability(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0))

    def moment(self, which: str = "Z", k: int = 1) -> Fraction:
        """E[index^k] for index ``which`` in {"Z", "Y", "X"}."""
        if k < 1:
            raise ParameterError(f"moment order must be >= 1, got {k}")
        pos = self._WHICH[which]
        return sum(
            (Fraction(v[pos]) ** k * p for v, p in self.atoms.items()), Fraction(0)
        )

    def mixed_moment(self, z_power: int, y_power: int) -> Fraction:
        """E[Z^a Y^b]."""
        return sum(
            (Fraction(v[0]) ** z_power * Fraction(v[1]) ** y_power * p
             for v, p in self.atoms.items()),
            Fraction(0),
        )

    def variance(self, which: str = "Z") -> Fraction:
        return self.moment(which, 2) - self.moment(which, 1) ** 2

    def skewness(self, which: str = "Z") -> float:
        """Standardized third central moment, exact up to the final root."""
        m1 = self.moment(which, 1)
        m2 = self.moment(which, 2)
        m3 = self.moment(which, 3)
        var = m2 - m1 * m1
        if var == 0:
            raise UndefinedSkewnessError(f"{which} is deterministic at n={self.n}")
        mu3 = m3 - 3 * m1 * m2 + 2 * m1**3
        return exact_skewness(mu3, var)

    def sorted_atoms(self) -> list[tuple[tuple[int, int, int], Fraction]]:
        return sorted(self.atoms.items(), key=lambda item: item[0])


def history_count(spec: ModelSpec, n: int) -> int:
    """Number of raw growth histories up to time n (before multiset merging)."""
    if isinstance(spec, ExtendedRRT):
        if n < 1:
            raise ParameterError(f"n must be >= 1, got {n}")
        count = 1
        for t in range(2, n + 1):
            count *= comb(spec.m0 + t - 2, spec.m)
        return count
    if isinstance(spec, Port):
        if n < 2:
            raise ParameterError(f"n must be >= 2, got {n}")
        count = 1
        for t in range(3, n + 1):
            count *= t - 1
        return count
    if isinstance(spec, Caterpillar):
        if n < 0:
            raise ParameterError(f"n must be >= 0, got {n}")
        return spec.m**n
    raise ParameterError(f"unknown model spec: {spec!r}")


def enumerate_distribution(
    spec: ModelSpec, n: int, budget: int = DEFAULT_BUDGET
) -> ExactDistribution:
    """Full exact distribution of the index bundle at time n.

    Depth-first over attachment choices with exact step probabilities,
    merging states on the sorted degree multiset after every step.
    """
    raw = history_count(spec, n)
    if raw > budget:
        raise BudgetExceededError(raw, budget)

    if isinstance(spec, ExtendedRRT):
        states = _enumerate_ext_rrt(spec, n)
        leaf_add = 0
    elif isinstance(spec, Port):
        states = _enumerate_port(n)
        leaf_add = 0
    else:
        states = _enumerate_caterpillar(spec, n)
        leaf_add = n  # n leaves of degree 1, folded into every power sum

    atoms: dict[tuple[int, int, int], Fraction] = defaultdict(Fraction)
    for degrees, p in states.items():
        z = sum(d * d for d in degrees) + leaf_add
        y = sum(d**3 for d in degrees) + leaf_add
        x = sum(d**4 for d in degrees) + leaf_add
        atoms[(z, y, x)] += p
    return ExactDistribution(model=spec, n=n, atoms=dict(atoms))


def _enumerate_ext_rrt(spec: ExtendedRRT, n: int) -> dict[tuple[int, ...], Fraction]:
    m0, m = spec.m0, spec.m
    start = (0,) if m0 == 1 else tuple([m0 - 1] * m0)
    states = {start: Fraction(1)}
    for t in range(2, n + 1):
        existing = m0 + t - 2
        weight = Fraction(1, comb(existing, m))
        nxt: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for degrees, p in states.items():
            share = p * weight
            for subset in combinations(range(existing), m):
                new = list(degrees)
                for j in subset:
                    new[j] += 1
                new.append(m)
                nxt[tuple(sorted(new))] += share
        states = dict(nxt)
    return states


def _enumerate_port(n: int) -> dict[tuple[int, ...], Fraction]:
    states = {(1, 1): Fraction(1)}
    for t in range(3, n + 1):
        total = 2 * (t - 2)
        nxt: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for degrees, p in states.items():
            count: dict[int, int] = defaultdict(int)
            for d in degrees:
                count[d] += 1
            for d, c in count.items():
                new = list(degrees)
                new.remove(d)
                new.append(d + 1)
                new.append(1)
                nxt[tuple(sorted(new))] += p * Fraction(d * c, total)
        states = dict(nxt)
    return states


def _enumerate_caterpillar(spec: Caterpillar, n: int) -> dict[tuple[int, ...], Fraction]:
    m = spec.m
    start = tuple(sorted([1] + [2] * (m - 2) + [1]))
    states = {start: Fraction(1)}
    for t in range(1, n + 1):
        total = t - 1 + 2 * m - 2
        nxt: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for degrees, p in states.items():
            count: dict[int, int] = defaultdict(int)
            for d in degrees:
                count[d] += 1
            for d, c in count.items():
                new = list(degrees)
                new.remove(d)
                new.append(d + 1)
                nxt[tuple(sorted(new))] += p * Fraction(d * c, total)
        states = dict(nxt)
    return states
