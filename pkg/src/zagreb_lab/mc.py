"""Monte Carlo replication harness with exact-integer accumulation.

Replicate i of a run draws its whole trajectory from ``RngStream(seed, i)``,
so the sample set is a pure function of (model, n, R, seed): worker count and
batch size change nothing.  Power sums of the (integer) Zagreb values are
accumulated as Python ints, which makes the merge order-free and the derived
moments bit-reproducible, with no floating accumulation error at any scale.

Internally replicates advance in vectorized batches that consume each
replicate's uniform stream in exactly the order the scalar simulator in
:mod:`zagreb_lab.models` does, so both produce identical trajectories from
identical streams (this equivalence is tested).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ParameterError, UndefinedSkewnessError
from .models import (
    _MASK64,
    Caterpillar,
    ExtendedRRT,
    ModelSpec,
    Port,
    RNG_ALGORITHM,
)
from .moments import clt_params

WORKERS_ENV_VAR = "ZAGREB_LAB_WORKERS"

_CHUNK_DOUBLES = 1 << 22  # per-batch uniform buffer target (32 MB of float64)


# ---------------------------------------------------------------------------
# Normal CDF
#
# Abramowitz-Stegun style rational-polynomial approximation of erf:
#     erf(x) ~ 1 - (a1 t + a2 t^2 + a3 t^3 + a4 t^4 + a5 t^5) exp(-x^2),
#     t = 1 / (1 + p x),  x >= 0,
# with |error| <= 1.5e-7.  Phi(x) = (1 + erf(x / sqrt(2))) / 2 halves the
# error bound, giving |Phi error| < 7.5e-8.  Constants are fixed here and
# unit-tested against tabulated values.

_ERF_P = 0.3275911
_ERF_A = (0.254829592, -0.284496736, 1.421413741, -1.453152027, 1.061405429)
_SQRT_HALF = 0.7071067811865476

NORMAL_CDF_MAX_ERROR = 7.5e-8


def normal_cdf(x):
    """Standard normal CDF, vectorized, absolute error below 7.5e-8."""
    arr = np.asarray(x, dtype=np.float64)
    ax = np.abs(arr) * _SQRT_HALF
    t = 1.0 / (1.0 + _ERF_P * ax)
    a1, a2, a3, a4, a5 = _ERF_A
    poly = t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))))
    erf_abs = 1.0 - poly * np.exp(-ax * ax)
    phi = 0.5 * (1.0 + np.where(arr >= 0, erf_abs, -erf_abs))
    if np.isscalar(x) or arr.ndim == 0:
        return float(phi)
    return phi


# ---------------------------------------------------------------------------
# Vectorized batch simulation


class _BatchStreams:
    """Stream-ordered uniform blocks for a batch of replicate ids.

    Draw b of replicate i equals draw b of ``RngStream(seed, i)``: one
    template Philox is re-keyed per replicate per chunk (much cheaper than a
    Generator object per replicate) and its counter advanced to the chunk
    offset.  Philox emits 4 doubles per counter block, so every chunk except
    the last must hold a multiple of 4 doubles; ``_aligned_span`` arranges
    that.
    """

    def __init__(self, seed: int, ids: np.ndarray):
        self._seed = int(seed) & _MASK64
        self._ids = ids
        self._philox = np.random.Philox(key=np.zeros(2, dtype=np.uint64))
        self._gen = np.random.Generator(self._philox)
        self._consumed = 0  # doubles handed out per replicate so far

    def draw(self, span: int, per_step: int) -> np.ndarray:
        count = span * per_step
        assert self._consumed % 4 == 0, "chunk boundary lost 4-alignment"
        blocks = self._consumed // 4
        out = np.empty((len(self._ids), count))
        philox = self._philox
        gen = self._gen
        state = philox.state
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        state["uinteger"] = 0
        inner = state["state"]
        inner["counter"][:] = 0
        key = inner["key"]
        key[0] = self._seed
        for b, sid in enumerate(self._ids):
            key[1] = int(sid) & _MASK64
            philox.state = state
            if blocks:
                philox.advance(blocks)
            out[b] = gen.random(count)
        self._consumed += count
        return out.reshape(len(self._ids), span, per_step)


def _aligned_span(span_max: int, remaining: int) -> int:
    """Steps for the next chunk; non-final chunks stay multiples of 4."""
    span = min(span_max, remaining)
    if span < remaining:
        span = min(remaining, max(4, span - span % 4))
    return span


def _batch_subset(u: np.ndarray, n_items: int, m: int) -> np.ndarray:
    """Vectorized partial Fisher-Yates; row-wise mirror of sample_uniform_subset."""
    batch = u.shape[0]
    picks = np.empty((batch, m), dtype=np.int64)
    keys = np.empty((batch, m), dtype=np.int64)
    vals = np.empty((batch, m), dtype=np.int64)
    for k in range(m):
        j = k + (u[:, k] * (n_items - k)).astype(np.int64)
        np.minimum(j, n_items - 1, out=j)
        pick = j.copy()
        swap_in = np.full(batch, k, dtype=np.int64)
        for kk in range(k):
            hit = keys[:, kk] == j
            pick[hit] = vals[hit, kk]
            hit = keys[:, kk] == k
            swap_in[hit] = vals[hit, kk]
        picks[:, k] = pick
        keys[:, k] = j
        vals[:, k] = swap_in
    return picks


def _batch_ext_rrt(spec: ExtendedRRT, n: int, streams, collect_degrees: bool):
    m0, m = spec.m0, spec.m
    batch = len(streams._ids)
    deg = np.zeros((batch, m0 + n - 1), dtype=np.int64)
    deg[:, :m0] = m0 - 1
    z = np.full(batch, m0 * (m0 - 1) ** 2, dtype=np.int64)
    rows = np.arange(batch)
    t = 2
    span_max = max(1, _CHUNK_DOUBLES // max(batch * m, 1))
    while t <= n:
        span = _aligned_span(span_max, n - t + 1)
        u = streams.draw(span, m)
        for s in range(span):
            tt = t + s
            existing = m0 + tt - 2
            picks = _batch_subset(u[:, s, :], existing, m)
            before = deg[rows[:, None], picks]
            z += 2 * before.sum(axis=1) + (m * m + m)
            deg[rows[:, None], picks] = before + 1
            deg[:, existing] = m
        t += span
    return (z, deg, 0) if collect_degrees else (z, None, 0)


def _batch_port(n: int, streams, collect_degrees: bool):
    batch = len(streams._ids)
    deg = np.zeros((batch, n), dtype=np.int64)
    deg[:, :2] = 1
    endpoints = np.zeros((batch, 2 * (n - 1)), dtype=np.int64)
    endpoints[:, 1] = 1
    z = np.full(batch, 2, dtype=np.int64)
    rows = np.arange(batch)
    t = 3
    span_max = max(1, _CHUNK_DOUBLES // max(batch, 1))
    while t <= n:
        span = _aligned_span(span_max, n - t + 1)
        u = streams.draw(span, 1)
        for s in range(span):
            tt = t + s
            length = 2 * (tt - 2)
            idx = (u[:, s, 0] * length).astype(np.int64)
            np.minimum(idx, length - 1, out=idx)
            parent = endpoints[rows, idx]
            dp = deg[rows, parent]
            z += 2 * dp + 2
            deg[rows, parent] = dp + 1
            deg[:, tt - 1] = 1
            endpoints[:, length] = parent
            endpoints[:, length + 1] = tt - 1
        t += span
    return (z, deg, 0) if collect_degrees else (z, None, 0)


def _batch_caterpillar(spec: Caterpillar, n: int, streams, collect_degrees: bool):
    m = spec.m
    batch = len(streams._ids)
    spine = np.full((batch, m), 2, dtype=np.int64)
    spine[:, 0] = 1
    spine[:, m - 1] = 1
    z = np.full(batch, 4 * m - 6, dtype=np.int64)
    rows = np.arange(batch)
    t = 1
    span_max = max(1, _CHUNK_DOUBLES // max(batch, 1))
    while t <= n:
        span = _aligned_span(span_max, n - t + 1)
        u = streams.draw(span, 1)
        for s in range(span):
            tt = t + s
            total = tt - 1 + 2 * m - 2
            target = u[:, s, 0] * total
            cum = np.cumsum(spine, axis=1)
            parent = (cum <= target[:, None]).sum(axis=1)
            np.minimum(parent, m - 1, out=parent)
            dp = spine[rows, parent]
            z += 2 * dp + 2
            spine[rows, parent] = dp + 1
        t += span
    return (z, spine, n) if collect_degrees else (z, None, n)


def simulate_batch(
    spec: ModelSpec,
    n: int,
    seed: int,
    stream_ids: Sequence[int],
    collect_degrees: bool = False,
):
    """Final Zagreb values for the given replicate stream ids.

    Returns (z, degrees, leaf_count); ``degrees`` is None unless requested.
    Trajectories are identical to ``models.grow_to`` with the same
    (seed, stream_id).
    """
    ids = np.asarray(stream_ids, dtype=np.int64)
    streams = _BatchStreams(seed, ids)
    if isinstance(spec, ExtendedRRT):
        if n < 1:
            raise ParameterError(f"n must be >= 1, got {n}")
        return _batch_ext_rrt(spec, n, streams, collect_degrees)
    if isinstance(spec, Port):
        if n < 2:
            raise ParameterError(f"n must be >= 2, got {n}")
        return _batch_port(n, streams, collect_degrees)
    if isinstance(spec, Caterpillar):
        if n < 0:
            raise ParameterError(f"n must be >= 0, got {n}")
        return _batch_caterpillar(spec, n, streams, collect_degrees)
    raise ParameterError(f"unknown model spec: {spec!r}")


# ---------------------------------------------------------------------------
# Replication harness


@dataclass
class SampleSummary:
    """Deterministic summary of R independent replicates.

    ``mean`` and ``variance`` are exact rationals derived from the integer
    power sums; two runs with equal (model, n, replicates, seed) agree on
    every field except ``wall_time`` for any worker count.
    """

    model: ModelSpec
    n: int
    replicates: int
    seed: int
    sum_z: int
    sum_z2: int
    sum_z3: int
    sum_z4: int
    mean: Fraction
    variance: Fraction
    skewness: Optional[float]
    se_mean: float
    se_variance: float
    se_skewness: float
    wall_time: float
    workers: int
    rng_algorithm: str = RNG_ALGORITHM
    ks_statistic: Optional[float] = None
    samples: Optional[np.ndarray] = field(default=None, repr=False)


def _central_sums(r: int, s1: int, s2: int, s3: int, s4: int):
    m1 = Fraction(s1, r)
    c2 = Fraction(s2) - Fraction(s1 * s1, r)
    c3 = Fraction(s3) - 3 * m1 * s2 + 2 * m1**3 * r
    c4 = Fraction(s4) - 4 * m1 * s3 + 6 * m1**2 * s2 - 3 * m1**4 * r
    return m1, c2, c3, c4


def _adjusted_skewness(r: int, c2: Fraction, c3: Fraction) -> float:
    m2 = c2 / r
    m3 = c3 / r
    g1 = float(m3) / float(m2) ** 1.5
    return g1 * (r * (r - 1)) ** 0.5 / (r - 2)


def _power_sums(z: np.ndarray) -> tuple[int, int, int, int]:
    """Exact sums of z, z^2, z^3, z^4 over an int64 vector.

    Uses int64 vector arithmetic when the fourth-power sum provably fits,
    otherwise falls back to Python big ints.
    """
    count = len(z)
    zmax = int(z.max()) if count else 0
    if count and zmax**4 * count < 2**62:
        z2 = z * z
        return (
            int(z.sum()),
            int(z2.sum()),
            int((z2 * z).sum()),
            int((z2 * z2).sum()),
        )
    s1 = s2 = s3 = s4 = 0
    for v in map(int, z):
        v2 = v * v
        s1 += v
        s2 += v2
        s3 += v2 * v
        s4 += v2 * v2
    return s1, s2, s3, s4


def _worker_range(args):
    spec, n, seed, lo, hi, batch_size, keep = args
    s1 = s2 = s3 = s4 = 0
    kept = [] if keep else None
    for start in range(lo, hi, batch_size):
        ids = np.arange(start, min(start + batch_size, hi), dtype=np.int64)
        z, _, _ = simulate_batch(spec, n, seed, ids)
        d1, d2, d3, d4 = _power_sums(z)
        s1 += d1
        s2 += d2
        s3 += d3
        s4 += d4
        if keep:
            kept.append(z)
    samples = np.concatenate(kept) if keep else None
    return lo, s1, s2, s3, s4, samples


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        workers = int(env) if env else 1
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    return workers


def run_replicates(
    spec: ModelSpec,
    n: int,
    replicates: int,
    seed: int,
    workers: Optional[int] = None,
    batch_size: int = 2048,
    keep_samples: bool = False,
) -> SampleSummary:
    """Simulate R independent trajectories and summarize the Zagreb values.

    Replicate i uses stream id i; the summary is bit-identical for any
    ``workers`` and ``batch_size``.
    """
    if replicates < 2:
        raise ParameterError(f"need at least 2 replicates, got {replicates}")
    workers = resolve_workers(workers)
    t0 = time.perf_counter()

    bounds = np.linspace(0, replicates, workers + 1).astype(int)
    jobs = [
        (spec, n, seed, int(lo), int(hi), batch_size, keep_samples)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    if len(jobs) == 1:
        results = [_worker_range(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker_range, jobs))
    results.sort(key=lambda item: item[0])

    s1 = sum(r[1] for r in results)
    s2 = sum(r[2] for r in results)
    s3 = sum(r[3] for r in results)
    s4 = sum(r[4] for r in results)
    samples = np.concatenate([r[5] for r in results]) if keep_samples else None

    r = replicates
    m1, c2, c3, c4 = _central_sums(r, s1, s2, s3, s4)
    variance = c2 / (r - 1)
    se_mean = (float(variance) / r) ** 0.5
    # SE of the sample variance from the empirical fourth central moment
    m2c = c2 / r
    m4c = c4 / r
    var_of_s2 = (m4c - Fraction(r - 3, r - 1) * m2c * m2c) / r
    se_variance = max(0.0, float(var_of_s2)) ** 0.5
    if r > 3:
        se_skewness = (6.0 * r * (r - 1) / ((r - 2) * (r + 1) * (r + 3))) ** 0.5
    else:
        se_skewness = float("inf")
    skewness = _adjusted_skewness(r, c2, c3) if (c2 > 0 and r >= 3) else None

    return SampleSummary(
        model=spec,
        n=n,
        replicates=r,
        seed=seed,
        sum_z=s1,
        sum_z2=s2,
        sum_z3=s3,
        sum_z4=s4,
        mean=m1,
        variance=variance,
        skewness=skewness,
        se_mean=se_mean,
        se_variance=se_variance,
        se_skewness=se_skewness,
        wall_time=time.perf_counter() - t0,
        workers=workers,
        samples=samples,
    )


def empirical_skewness(summary: SampleSummary) -> float:
    """Adjusted Fisher-Pearson skewness from the exact power sums."""
    if summary.replicates < 3:
        raise ParameterError("skewness needs at least 3 replicates")
    _, c2, c3, _ = _central_sums(
        summary.replicates, summary.sum_z, summary.sum_z2, summary.sum_z3, summary.sum_z4
    )
    if c2 == 0:
        raise UndefinedSkewnessError("sample variance is zero")
    return _adjusted_skewness(summary.replicates, c2, c3)


def standardize_clt(
    samples: Union[SampleSummary, Sequence[int], np.ndarray],
    n: Optional[int] = None,
    m: Optional[int] = None,
) -> np.ndarray:
    """(Z - (5m^2+m) n) / (2m sqrt(m+1) sqrt(n)) per replicate.

    Accepts a SampleSummary built with ``keep_samples=True`` (reading n and m
    from it) or a raw value array plus explicit n and m.
    """
    if isinstance(samples, SampleSummary):
        if not isinstance(samples.model, ExtendedRRT):
            raise ParameterError("CLT standardization applies to extended networks")
        if samples.samples is None:
            raise ParameterError("summary was built without keep_samples=True")
        n = samples.n
        m = samples.model.m
        values = np.asarray(samples.samples, dtype=np.float64)
    else:
        if n is None or m is None:
            raise ParameterError("raw samples need explicit n and m")
        values = np.asarray(samples, dtype=np.float64)
    params = clt_params(n, m)
    return (values - params.centering) / params.scale


def ks_normal(samples) -> float:
    """Kolmogorov-Smirnov statistic sup |ECDF - Phi| against N(0, 1)."""
    values = np.sort(np.asarray(samples, dtype=np.float64))
    r = len(values)
    if r < 100:
        raise ParameterError(f"need at least 100 samples for a KS statistic, got {r}")
    cdf = normal_cdf(values)
    i = np.arange(1, r + 1)
    d_plus = np.max(i / r - cdf)
    d_minus = np.max(cdf - (i - 1) / r)
    return float(max(d_plus, d_minus))
