"""The three random growth processes and their reproducible simulation.

Models
------
ExtendedRRT(m0, m)
    Starts from m0 mutually connected nodes (an isolated node when m0 = 1).
    Each step joins a newcomer to a uniformly random m-subset of the existing
    nodes.  Time n = 1 is the initial clique; the node arriving at time n
    brings the node count to m0 + n - 1.

Port
    Plain-oriented recursive tree.  Starts at time n = 2 as a single edge;
    each step attaches a newcomer to an existing node chosen with probability
    proportional to its degree.

Caterpillar(m)
    A fixed spine of m >= 2 nodes in a path.  Each step attaches a leaf to a
    spine node chosen with probability proportional to its spine degree.
    Time n counts attached leaves, starting at n = 0.

Randomness
----------
Every trajectory is a pure function of an :class:`RngStream`, a (seed,
stream_id) pair mapped onto a counter-based Philox generator.  Each step
consumes a fixed number of uniform doubles (m for ExtendedRRT, one
otherwise), so distinct stream ids give independent replicates and the same
stream replays the same trajectory, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateDistributionError, ParameterError
from .indices import IndexBundle, apply_attachment_delta, compute_bundle

RNG_ALGORITHM = "philox4x64"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExtendedRRT:
    """Uniform m-subset attachment on top of an initial m0-clique."""

    m0: int
    m: int = 1

    def __post_init__(self):
        if self.m0 < 1:
            raise ParameterError(f"m0 must be >= 1, got {self.m0}")
        if not 1 <= self.m <= self.m0:
            raise ParameterError(
                f"m must satisfy 1 <= m <= m0, got m={self.m}, m0={self.m0}"
            )

    initial_n = 1


@dataclass(frozen=True)
class Port:
    """Degree-proportional (preferential) attachment tree."""

    initial_n = 2


@dataclass(frozen=True)
class Caterpillar:
    """Leaves attached to a fixed m-node spine, degree-proportionally."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ParameterError(f"spine size m must be >= 2, got {self.m}")

    initial_n = 0


ModelSpec = Union[ExtendedRRT, Port, Caterpillar]


@dataclass(frozen=True)
class StepRecord:
    """One attachment event: which parents were chosen and their prior degrees."""

    time: int
    chosen_parents: tuple[int, ...]
    degree_before: tuple[int, ...]


class RngStream:
    """Reproducible uniform stream identified by (seed, stream_id).

    Backed by numpy's Philox counter generator (four 64-bit counters, period
    2^256) keyed with the two identifiers, so distinct stream ids are
    statistically independent and identical pairs replay identical streams.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        self._generator = np.random.Generator(np.random.Philox(key=key))

    def uniform(self) -> float:
        """Next uniform double in [0, 1)."""
        return float(self._generator.random())

    def uniforms(self, count: int) -> np.ndarray:
        """Next ``count`` uniform doubles, in stream order."""
        return self._generator.random(count)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass
class GrowthState:
    """Mutable state of one growing network.

    ``degrees`` lists one entry per node for ExtendedRRT and Port; for
    Caterpillar it holds the m spine degrees and ``leaf_count`` counts the
    attached degree-1 leaves.  ``total_degree`` tracks sum(degrees) (spine
    only for caterpillars).  ``endpoints`` is the Port sampling structure:
    both endpoints of every edge, so a uniform element is degree-proportional.
    """

    spec: ModelSpec
    n: int
    degrees: list[int] = field(repr=False)
    leaf_count: int
    total_degree: int
    bundle: IndexBundle
    endpoints: Optional[list[int]] = field(default=None, repr=False)

    @property
    def node_count(self) -> int:
        if isinstance(self.spec, Caterpillar):
            return len(self.degrees) + self.leaf_count
        return len(self.degrees)

    def recomputed_bundle(self) -> IndexBundle:
        """From-scratch bundle over all node degrees (checks the incremental one)."""
        return compute_bundle(self.degrees, self.leaf_count)


def init_state(spec: ModelSpec) -> GrowthState:
    """Initial state of a model at its starting time."""
    if isinstance(spec, ExtendedRRT):
        degrees = [spec.m0 - 1] * spec.m0
        return GrowthState(
            spec=spec,
            n=1,
            degrees=degrees,
            leaf_count=0,
            total_degree=spec.m0 * (spec.m0 - 1),
            bundle=compute_bundle(degrees),
        )
    if isinstance(spec, Port):
        degrees = [1, 1]
        return GrowthState(
            spec=spec,
            n=2,
            degrees=degrees,
            leaf_count=0,
            total_degree=2,
            bundle=compute_bundle(degrees),
            endpoints=[0, 1],
        )
    if isinstance(spec, Caterpillar):
        m = spec.m
        degrees = [1] + [2] * (m - 2) + [1]
        return GrowthState(
            spec=spec,
            n=0,
            degrees=degrees,
            leaf_count=0,
            total_degree=2 * (m - 1),
            bundle=compute_bundle(degrees),
        )
    raise ParameterError(f"unknown model spec: {spec!r}")


def sample_uniform_subset(n_items: int, m: int, rng: RngStream) -> tuple[int, ...]:
    """m distinct indices from range(n_items), every m-subset equally likely.

    Partial Fisher-Yates over a virtual identity array with sparse swap
    tracking: O(m) time and memory per call regardless of n_items.  Consumes
    exactly m uniforms.
    """
    if m < 1 or m > n_items:
        raise ParameterError(f"need 1 <= m <= n_items, got m={m}, n_items={n_items}")
    swaps: dict[int, int] = {}
    picks = []
    for k in range(m):
        j = k + int(rng.uniform() * (n_items - k))
        if j >= n_items:  # guard the u ~ 1.0 rounding edge
            j = n_items - 1
        picks.append(swaps.get(j, j))
        swaps[j] = swaps.get(k, k)
    return tuple(picks)


def sample_degree_proportional(weights: Sequence[int], rng: RngStream) -> int:
    """Index j with probability weights[j] / sum(weights).

    Linear cumulative scan; intended for short weight vectors (the
    caterpillar spine).  Consumes exactly one uniform.
    """
    total = 0
    for w in weights:
        if w < 0:
            raise ParameterError(f"weights must be nonnegative, got {w}")
        total += w
    if total <= 0:
        raise DegenerateDistributionError("all weights are zero")
    target = rng.uniform() * total
    acc = 0
    for j, w in enumerate(weights):
        acc += w
        if target < acc:
            return j
    return len(weights) - 1  # float edge: target landed on the total


def step(state: GrowthState, rng: RngStream) -> StepRecord:
    """Advance the state by one attachment, updating indices incrementally."""
    spec = state.spec
    if isinstance(spec, ExtendedRRT):
        n_existing = len(state.degrees)
        parents = sample_uniform_subset(n_existing, spec.m, rng)
        before = tuple(state.degrees[p] for p in parents)
        for p in parents:
            state.degrees[p] += 1
        state.degrees.append(spec.m)
        state.total_degree += 2 * spec.m
        newcomer = spec.m
    elif isinstance(spec, Port):
        if state.endpoints is None:
            raise ParameterError("Port state lacks its endpoint list; use init_state")
        idx = int(rng.uniform() * len(state.endpoints))
        if idx >= len(state.endpoints):
            idx = len(state.endpoints) - 1
        parent = state.endpoints[idx]
        parents = (parent,)
        before = (state.degrees[parent],)
        new_node = len(state.degrees)
        state.degrees[parent] += 1
        state.degrees.append(1)
        state.endpoints.append(parent)
        state.endpoints.append(new_node)
        state.total_degree += 2
        newcomer = 1
    elif isinstance(spec, Caterpillar):
        parent = sample_degree_proportional(state.degrees, rng)
        parents = (parent,)
        before = (state.degrees[parent],)
        state.degrees[parent] += 1
        state.leaf_count += 1
        state.total_degree += 1  # spine side only; the new leaf is implicit
        newcomer = 1
    else:
        raise ParameterError(f"unknown model spec: {spec!r}")

    state.n += 1
    state.bundle = apply_attachment_delta(state.bundle, before, newcomer)
    return StepRecord(time=state.n, chosen_parents=parents, degree_before=before)


def grow_to(
    spec: ModelSpec,
    n_target: int,
    rng: RngStream,
    observer: Optional[Callable[[StepRecord], None]] = None,
) -> GrowthState:
    """Grow a fresh trajectory to time ``n_target``.

    ``observer``, when given, receives every StepRecord in order.
    """
    state = init_state(spec)
    if n_target < state.n:
        raise ParameterError(
            f"n_target={n_target} is below the model's initial time {state.n}"
        )
    while state.n < n_target:
        record = step(state, rng)
        if observer is not None:
            observer(record)
    return state
