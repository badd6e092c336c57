"""Random walks and neutral random walks over a landscape.

Every walk consumes its generator in a fixed order: the start (if sampled)
as N draws of ``integers(0, 2, dtype=uint8)``, then one ``random()`` per
step. A step with ``d`` candidate moves takes candidate ``floor(u * d)`` in
ascending bit order. The batched sampler :func:`evolvability_walks` follows
the same order per walk, so it reproduces the one-at-a-time functions
exactly.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .landscape import (
    BitString,
    EvolvabilityKind,
    Landscape,
    evolvability_from_neighbors,
    flip,
)
from .seeds import walk_rng


@dataclasses.dataclass(frozen=True)
class WalkConfig:
    walk_length: int = 100
    num_walks: int = 1000
    min_usable_length: int = 20
    seed: int = 0
    evolvability_kind: EvolvabilityKind = EvolvabilityKind.MAX_NEIGHBOR_FITNESS

    def __post_init__(self):
        if self.walk_length < 1 or self.num_walks < 1 or self.min_usable_length < 1:
            raise ValueError("walk_length, num_walks and min_usable_length must be positive")
        if self.min_usable_length > self.walk_length + 1:
            raise ValueError("min_usable_length cannot exceed walk_length + 1 observations")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclasses.dataclass
class WalkTrace:
    """Observations along one walk.

    ``solutions[t]`` is the solution behind ``observations[t]``.
    ``network_fitness`` is set for neutral walks only.
    """

    observations: np.ndarray
    terminated_early: bool
    start: BitString
    network_fitness: float | None = None
    solutions: np.ndarray | None = None

    def __len__(self):
        return len(self.observations)


def sample_starts(landscape: Landscape, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent uniform bit strings as a (count, N) array."""
    if count < 1:
        raise ValueError("count must be positive")
    return rng.integers(0, 2, size=(count, landscape.dimension), dtype=np.uint8)


def _pick(u: float, d: int) -> int:
    return min(int(u * d), d - 1)


def random_walk(landscape: Landscape, start, length: int, rng: np.random.Generator) -> WalkTrace:
    """Unconstrained walk: each step flips a uniformly chosen bit."""
    s = np.array(landscape.check(start))
    n = landscape.dimension
    solutions = np.empty((length + 1, n), dtype=np.uint8)
    obs = np.empty(length + 1)
    solutions[0] = s
    obs[0] = landscape.fitness(s)
    for t in range(1, length + 1):
        s[_pick(rng.random(), n)] ^= 1
        solutions[t] = s
        obs[t] = landscape.fitness(s)
    return WalkTrace(obs, False, landscape.check(start), None, solutions)


def _neutral_walk(landscape, start, length, rng, kind):
    s = landscape.check(start)
    f0 = landscape.fitness(s)
    visited = [s]
    nf = landscape.neighbor_fitness(s)
    evo = [evolvability_from_neighbors(nf, kind)] if kind is not None else None
    terminated = False
    for _ in range(length):
        moves = np.flatnonzero(nf == f0)
        if moves.size == 0:
            terminated = True
            break
        s = flip(s, int(moves[_pick(rng.random(), moves.size)]))
        visited.append(s)
        nf = landscape.neighbor_fitness(s)
        if evo is not None:
            evo.append(evolvability_from_neighbors(nf, kind))
    return f0, np.array(visited), evo, terminated


def neutral_random_walk(
    landscape: Landscape, start, length: int, rng: np.random.Generator
) -> WalkTrace:
    """Walk restricted to neutral neighbors; observations are fitness values.

    Stops early, with ``terminated_early`` set, at a solution with no
    neutral neighbor.
    """
    f0, visited, _, terminated = _neutral_walk(landscape, start, length, rng, None)
    obs = np.full(len(visited), float(f0))
    return WalkTrace(obs, terminated, visited[0], float(f0), visited)


def evolvability_walk(
    landscape: Landscape, start, config: WalkConfig, rng: np.random.Generator
) -> WalkTrace:
    """Neutral random walk observed through the evolvability function."""
    f0, visited, evo, terminated = _neutral_walk(
        landscape, start, config.walk_length, rng, config.evolvability_kind
    )
    return WalkTrace(np.asarray(evo, dtype=float), terminated, visited[0], float(f0), visited)


def evolvability_walks(
    landscape: Landscape,
    config: WalkConfig,
    starts: np.ndarray | None = None,
    keep_solutions: bool = True,
) -> list[WalkTrace]:
    """Run ``config.num_walks`` evolvability walks in lockstep.

    Walk ``w`` draws from ``walk_rng(config.seed, w)``; when ``starts`` is
    None its start is sampled from that stream first. The result for walk
    ``w`` equals ``evolvability_walk`` run alone with the same generator.
    """
    n, length, count = landscape.dimension, config.walk_length, config.num_walks
    rngs = [walk_rng(config.seed, w) for w in range(count)]
    if starts is None:
        x = np.concatenate([sample_starts(landscape, 1, r) for r in rngs])
    else:
        x = np.array(starts, dtype=np.uint8).reshape(count, n)
        if not np.all(x <= 1):
            raise ValueError("starts must be 0/1")
    u = np.stack([r.random(length) for r in rngs])

    starts_out = x.copy()
    f, nf = landscape.neighbor_fitness_batch(x)
    network = f.astype(float)
    obs = np.empty((count, length + 1))
    obs[:, 0] = evolvability_from_neighbors(nf, config.evolvability_kind)
    sols = np.empty((count, length + 1, n), dtype=np.uint8) if keep_solutions else None
    if sols is not None:
        sols[:, 0] = x
    sizes = np.ones(count, dtype=np.int64)
    terminated = np.zeros(count, dtype=bool)

    active = np.arange(count)
    f_act, nf_act = f, nf
    for t in range(length):
        neutral = nf_act == f_act[:, None]
        degree = neutral.sum(axis=1)
        stuck = degree == 0
        if stuck.any():
            terminated[active[stuck]] = True
            keep = ~stuck
            active, neutral, degree = active[keep], neutral[keep], degree[keep]
        if active.size == 0:
            break
        pick = np.minimum((u[active, t] * degree).astype(np.int64), degree - 1)
        bit = (np.cumsum(neutral, axis=1) <= pick[:, None]).sum(axis=1)
        x[active, bit] ^= 1
        f_act, nf_act = landscape.neighbor_fitness_batch(x[active])
        obs[active, t + 1] = evolvability_from_neighbors(nf_act, config.evolvability_kind)
        if sols is not None:
            sols[active, t + 1] = x[active]
        sizes[active] += 1

    traces = []
    for w in range(count):
        traces.append(
            WalkTrace(
                observations=obs[w, : sizes[w]].copy(),
                terminated_early=bool(terminated[w]),
                start=starts_out[w],
                network_fitness=float(network[w]),
                solutions=None if sols is None else sols[w, : sizes[w]],
            )
        )
    return traces
