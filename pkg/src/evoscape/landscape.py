"""Landscape abstraction over fixed-length bit strings.

A landscape couples a dimension N with a deterministic fitness function on
{0,1}^N. The neighborhood is always the N single-bit flips, so neighbor i of
``s`` is ``s`` with bit i inverted and ``s`` is never its own neighbor.

Bit strings are plain ``numpy`` arrays of dtype ``uint8``. Helpers accept
anything array-like (lists, tuples, strings such as ``"0101"``) and validate
through :func:`as_bitstring`.
"""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

BitString = np.ndarray


class EvolvabilityKind(enum.Enum):
    """Scalar summaries of how good the neighborhood of a solution is."""

    MAX_NEIGHBOR_FITNESS = "max"


def as_bitstring(s, length: int | None = None) -> BitString:
    """Validate ``s`` and return it as a read-only ``uint8`` array.

    Strings are read character by character, so ``"01"`` means bit 0 is 0
    and bit 1 is 1.
    """
    if isinstance(s, str):
        s = [int(c) for c in s]
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("bit string must be a non-empty 1-d sequence")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bit string elements must be 0 or 1")
    if length is not None and arr.size != length:
        raise ValueError(f"bit string has length {arr.size}, expected {length}")
    out = arr.astype(np.uint8, copy=True)
    out.flags.writeable = False
    return out


def bits_to_int(s: BitString) -> int:
    """Encode a bit string as an integer with bit i of ``s`` at weight 2**i."""
    return int(np.dot(np.asarray(s, dtype=np.int64), 1 << np.arange(len(s), dtype=np.int64)))


def int_to_bits(value: int, length: int) -> BitString:
    return ((value >> np.arange(length)) & 1).astype(np.uint8)


def all_solutions(length: int) -> np.ndarray:
    """Every bit string of the given length, row r encoding the integer r."""
    codes = np.arange(1 << length, dtype=np.int64)
    return ((codes[:, None] >> np.arange(length)) & 1).astype(np.uint8)


class Landscape:
    """Base class: subclasses provide ``dimension`` and ``fitness``.

    The batch methods have generic fallbacks; subclasses override them when a
    vectorized evaluation is available. Instances are treated as immutable.
    """

    dimension: int

    def fitness(self, s: BitString) -> float:
        raise NotImplementedError

    def fitness_batch(self, solutions: np.ndarray) -> np.ndarray:
        """Fitness of every row of a (W, N) array."""
        return np.array([self.fitness(row) for row in solutions])

    def neighbor_fitness(self, s: BitString) -> np.ndarray:
        """Fitness of the N neighbors of ``s``, indexed by flipped bit."""
        _, nf = self.neighbor_fitness_batch(np.asarray(s, dtype=np.uint8)[None, :])
        return nf[0]

    def neighbor_fitness_batch(self, solutions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(f, nf)``: fitness per row, and an (W, N) array of neighbor fitnesses."""
        solutions = np.asarray(solutions, dtype=np.uint8)
        w, n = solutions.shape
        f = self.fitness_batch(solutions)
        nf = np.empty((w, n), dtype=f.dtype)
        flipped = solutions.copy()
        for i in range(n):
            flipped[:, i] ^= 1
            nf[:, i] = self.fitness_batch(flipped)
            flipped[:, i] ^= 1
        return f, nf

    def check(self, s) -> BitString:
        return as_bitstring(s, self.dimension)


class ConstantLandscape(Landscape):
    """f(s) = value everywhere; every neighbor is neutral."""

    def __init__(self, dimension: int, value: float = 0.0):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.value = float(value)

    def fitness(self, s):
        return self.value

    def fitness_batch(self, solutions):
        return np.full(len(solutions), self.value)

    def __repr__(self):
        return f"ConstantLandscape(dimension={self.dimension}, value={self.value})"


class PopcountLandscape(Landscape):
    """f(s) = number of ones; no neighbor is ever neutral."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    def fitness(self, s):
        return int(np.sum(s, dtype=np.int64))

    def fitness_batch(self, solutions):
        return np.asarray(solutions, dtype=np.int64).sum(axis=1)

    def neighbor_fitness_batch(self, solutions):
        solutions = np.asarray(solutions, dtype=np.int64)
        f = solutions.sum(axis=1)
        return f, f[:, None] + 1 - 2 * solutions

    def __repr__(self):
        return f"PopcountLandscape(dimension={self.dimension})"


def flip(s: BitString, bit: int) -> BitString:
    out = np.array(s, dtype=np.uint8)
    out[bit] ^= 1
    return out


def neighbors(landscape: Landscape, s) -> list[BitString]:
    """The N Hamming-1 neighbors of ``s`` in ascending bit order."""
    s = landscape.check(s)
    return [flip(s, i) for i in range(landscape.dimension)]


def neutral_neighbors(landscape: Landscape, s) -> list[BitString]:
    s = landscape.check(s)
    f = landscape.fitness(s)
    nf = landscape.neighbor_fitness(s)
    return [flip(s, i) for i in np.flatnonzero(nf == f)]


def neutral_degree(landscape: Landscape, s) -> int:
    s = landscape.check(s)
    return int(np.count_nonzero(landscape.neighbor_fitness(s) == landscape.fitness(s)))


def evolvability(
    landscape: Landscape,
    s,
    kind: EvolvabilityKind = EvolvabilityKind.MAX_NEIGHBOR_FITNESS,
) -> float:
    """Evolvability of ``s``; the maximal variant is the best neighbor fitness."""
    s = landscape.check(s)
    return float(evolvability_from_neighbors(landscape.neighbor_fitness(s), kind))


def evolvability_from_neighbors(nf: np.ndarray, kind: EvolvabilityKind) -> np.ndarray:
    """Apply ``kind`` along the last axis of a neighbor-fitness array."""
    if kind is EvolvabilityKind.MAX_NEIGHBOR_FITNESS:
        return np.max(nf, axis=-1)
    raise ValueError(f"unsupported evolvability kind: {kind!r}")


__all__: Sequence[str] = [
    "BitString",
    "ConstantLandscape",
    "EvolvabilityKind",
    "Landscape",
    "PopcountLandscape",
    "all_solutions",
    "as_bitstring",
    "bits_to_int",
    "evolvability",
    "evolvability_from_neighbors",
    "flip",
    "int_to_bits",
    "neighbors",
    "neutral_degree",
    "neutral_neighbors",
]
