"""Autocorrelation estimators, neutral-degree statistics and neutral networks."""

from __future__ import annotations

import collections
import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

from .landscape import Landscape
from .unionfind import DisjointSet
from .walks import WalkTrace, sample_starts

DEFAULT_MAX_LAG = 20
DEFAULT_EXHAUSTIVE_LIMIT = 20


class DegenerateSeriesError(ValueError):
    """The series has zero variance, so its autocorrelation is undefined."""


class UndefinedCorrelationLengthError(ValueError):
    pass


class NoUsableSeriesError(ValueError):
    def __init__(self, message: str, num_discarded: int):
        super().__init__(message)
        self.num_discarded = num_discarded


class EnumerationLimitError(ValueError):
    pass


def _check_series(series, max_lag):
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("series needs at least 2 observations")
    if not 0 <= max_lag < y.size:
        raise ValueError(f"max_lag must lie in [0, {y.size - 1}]")
    if np.ptp(y) == 0:
        raise DegenerateSeriesError("constant series")
    return y


def autocorrelation(series: Sequence[float], max_lag: int = DEFAULT_MAX_LAG) -> np.ndarray:
    """Sample autocorrelation r(0..max_lag).

    Uses the whole-series mean and the full-length sum of squares as
    denominator for every lag, so r(0) = 1 and |r(k)| <= 1.
    """
    y = _check_series(series, max_lag)
    y = y - y.mean()
    denom = y @ y
    if denom == 0:
        raise DegenerateSeriesError("variance underflows to zero")
    n = y.size
    rho = np.array([y[: n - k] @ y[k:] for k in range(max_lag + 1)]) / denom
    rho[0] = 1.0
    return rho


def autocorrelation_naive(series: Sequence[float], max_lag: int = DEFAULT_MAX_LAG) -> list[float]:
    """Reference double loop for :func:`autocorrelation`."""
    _check_series(series, max_lag)
    values = [float(v) for v in series]
    n = len(values)
    mean = math.fsum(values) / n
    denom = math.fsum((v - mean) ** 2 for v in values)
    if denom == 0:
        raise DegenerateSeriesError("variance underflows to zero")
    out = []
    for k in range(max_lag + 1):
        num = 0.0
        for t in range(n - k):
            num += (values[t] - mean) * (values[t + k] - mean)
        out.append(num / denom)
    return out


def correlation_length(rho1: float) -> float:
    """tau = -1 / ln(rho1), defined for 0 < rho1 < 1."""
    if not rho1 > 0:
        raise UndefinedCorrelationLengthError(f"rho(1) = {rho1} <= 0: no positive correlation")
    if not rho1 < 1:
        raise UndefinedCorrelationLengthError(f"rho(1) = {rho1} >= 1: correlation length is infinite")
    return -1.0 / math.log(rho1)


def _maybe_tau(rho1: float) -> float | None:
    try:
        return correlation_length(rho1)
    except UndefinedCorrelationLengthError:
        return None


@dataclasses.dataclass
class AutocorrReport:
    """Per-lag mean autocorrelation over the usable series of a walk set.

    ``tau`` comes from the averaged ``rho[1]``. ``tau_walk_mean`` is the
    alternative summary: the mean of per-series correlation lengths over
    series whose own r(1) lies in (0, 1).
    """

    rho: np.ndarray
    tau: float | None
    num_series_used: int
    num_series_discarded: int
    total_observations: int
    num_degenerate: int = 0
    num_short: int = 0
    tau_walk_mean: float | None = None

    @property
    def max_lag(self) -> int:
        return len(self.rho) - 1


def average_autocorrelation(
    traces: Iterable[WalkTrace | Sequence[float]],
    max_lag: int = DEFAULT_MAX_LAG,
    min_usable_length: int = 20,
) -> AutocorrReport:
    """Unweighted per-lag mean of per-series autocorrelations.

    Series shorter than ``max(min_usable_length, max_lag + 1)`` and
    constant series are discarded and counted.
    """
    need = max(min_usable_length, max_lag + 1)
    rows = []
    walk_taus = []
    short = degenerate = 0
    observations = 0
    for trace in traces:
        series = trace.observations if isinstance(trace, WalkTrace) else trace
        if len(series) < need:
            short += 1
            continue
        try:
            r = autocorrelation(series, max_lag)
        except DegenerateSeriesError:
            degenerate += 1
            continue
        rows.append(r)
        observations += len(series)
        tau = _maybe_tau(r[1]) if max_lag >= 1 else None
        if tau is not None:
            walk_taus.append(tau)
    if not rows:
        raise NoUsableSeriesError(
            f"no usable series ({short} too short, {degenerate} constant)", short + degenerate
        )
    rho = np.mean(rows, axis=0)
    rho[0] = 1.0
    return AutocorrReport(
        rho=rho,
        tau=_maybe_tau(rho[1]) if max_lag >= 1 else None,
        num_series_used=len(rows),
        num_series_discarded=short + degenerate,
        total_observations=observations,
        num_degenerate=degenerate,
        num_short=short,
        tau_walk_mean=float(np.mean(walk_taus)) if walk_taus else None,
    )


@dataclasses.dataclass
class NeutralDegreeSummary:
    mean: float
    variance: float
    histogram: np.ndarray
    samples: int


def neutral_degree_stats(
    landscape: Landscape, samples: int, rng: np.random.Generator, chunk: int = 4096
) -> NeutralDegreeSummary:
    """Neutral degree over ``samples`` uniform solutions.

    ``variance`` is the population variance; ``histogram[d]`` counts
    samples with neutral degree d for d in 0..N.
    """
    starts = sample_starts(landscape, samples, rng)
    degrees = np.empty(samples, dtype=np.int64)
    for lo in range(0, samples, chunk):
        f, nf = landscape.neighbor_fitness_batch(starts[lo : lo + chunk])
        degrees[lo : lo + chunk] = (nf == f[:, None]).sum(axis=1)
    hist = np.bincount(degrees, minlength=landscape.dimension + 1)
    return NeutralDegreeSummary(
        mean=float(degrees.mean()),
        variance=float(degrees.var()),
        histogram=hist,
        samples=samples,
    )


@dataclasses.dataclass
class NetworkPartition:
    """Neutral networks of a landscape.

    ``assignment[c]`` is the network of the solution with integer code ``c``
    (bit i at weight 2**i). Networks are numbered in order of their smallest
    member, so equal partitions have equal arrays.
    """

    assignment: np.ndarray
    fitness: np.ndarray
    sizes: np.ndarray

    @property
    def num_networks(self) -> int:
        return len(self.sizes)

    def same_partition(self, other: NetworkPartition) -> bool:
        return np.array_equal(self.assignment, other.assignment)


def fitness_table(landscape: Landscape, chunk: int = 1 << 16) -> np.ndarray:
    n = landscape.dimension
    out = []
    for lo in range(0, 1 << n, chunk):
        codes = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.int64)
        out.append(landscape.fitness_batch(((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8)))
    return np.concatenate(out)


def _finish(labels: np.ndarray, table: np.ndarray) -> NetworkPartition:
    sizes = np.bincount(labels)
    _, first = np.unique(labels, return_index=True)
    return NetworkPartition(labels, table[first], sizes)


def enumerate_networks(
    landscape: Landscape,
    method: str = "bfs",
    limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> NetworkPartition:
    """Exact neutral-network partition of all 2^N solutions.

    ``method`` is ``"bfs"`` (breadth-first traversal of neutral edges) or
    ``"union-find"``. Both number networks identically.
    """
    n = landscape.dimension
    if n > limit:
        raise EnumerationLimitError(
            f"N={n} exceeds the exhaustive limit {limit} (2^{n} solutions)"
        )
    table = fitness_table(landscape)
    if method == "bfs":
        labels = _bfs_labels(table, n)
    elif method == "union-find":
        labels = _union_find_labels(table, n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _finish(labels, table)


def _bfs_labels(table: np.ndarray, n: int) -> np.ndarray:
    values = table.tolist()
    total = len(values)
    labels = [-1] * total
    masks = [1 << i for i in range(n)]
    next_id = 0
    for seed in range(total):
        if labels[seed] >= 0:
            continue
        labels[seed] = next_id
        level = values[seed]
        queue = collections.deque([seed])
        while queue:
            s = queue.popleft()
            for mask in masks:
                t = s ^ mask
                if labels[t] < 0 and values[t] == level:
                    labels[t] = next_id
                    queue.append(t)
        next_id += 1
    return np.array(labels, dtype=np.int64)


def _union_find_labels(table: np.ndarray, n: int) -> np.ndarray:
    codes = np.arange(len(table), dtype=np.int64)
    dsu = DisjointSet(len(table))
    for i in range(n):
        low = codes[(codes >> i) & 1 == 0]
        high = low | (1 << i)
        same = table[low] == table[high]
        for a, b in zip(low[same].tolist(), high[same].tolist()):
            dsu.union(a, b)
    return dsu.labels()
