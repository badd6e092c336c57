"""MAX-k-SAT instances: generation, DIMACS I/O and clause-count evaluation.

Variable ``i`` (1-based, as in DIMACS) is stored at bit index ``i - 1``.
Fitness is the number of satisfied clauses.
"""

from __future__ import annotations

import dataclasses
import functools

import numpy as np

from .landscape import BitString, Landscape, all_solutions, as_bitstring

# Rows per chunk in batch evaluation, bounds the (rows, m, k) temporaries.
_CHUNK = 4096


class DimacsError(ValueError):
    """Malformed DIMACS input. ``line`` is the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclasses.dataclass(frozen=True)
class CnfFormula:
    """A CNF formula with clauses stored as tuples of signed DIMACS literals.

    Every clause mentions distinct variables in ``[1, num_vars]``; the formula
    may repeat clauses.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be positive")
        clauses = tuple(tuple(int(lit) for lit in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for j, clause in enumerate(clauses):
            if not clause:
                raise ValueError(f"clause {j} is empty")
            seen = set()
            for lit in clause:
                v = abs(lit)
                if lit == 0 or v > self.num_vars:
                    raise ValueError(f"clause {j}: literal {lit} out of range")
                if v in seen:
                    raise ValueError(f"clause {j}: variable {v} repeated")
                seen.add(v)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def alpha(self) -> float:
        return self.num_clauses / self.num_vars

    @property
    def k(self) -> int | None:
        """Common clause width, or None for an empty or mixed-width formula."""
        widths = {len(c) for c in self.clauses}
        return widths.pop() if len(widths) == 1 else None

    @functools.cached_property
    def literal_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(var, positive, mask)`` arrays of shape (m, kmax), var 0-based.

        Mixed-width formulas are padded; padded slots have ``mask`` False.
        """
        m = len(self.clauses)
        kmax = max((len(c) for c in self.clauses), default=1)
        var = np.zeros((m, kmax), dtype=np.int64)
        pos = np.zeros((m, kmax), dtype=bool)
        mask = np.zeros((m, kmax), dtype=bool)
        for j, clause in enumerate(self.clauses):
            w = len(clause)
            var[j, :w] = [abs(lit) - 1 for lit in clause]
            pos[j, :w] = [lit > 0 for lit in clause]
            mask[j, :w] = True
        return var, pos, mask

    @functools.cached_property
    def occurrences(self) -> tuple[tuple[tuple[int, bool], ...], ...]:
        """Per bit index, the ``(clause index, literal is positive)`` pairs."""
        occ: list[list[tuple[int, bool]]] = [[] for _ in range(self.num_vars)]
        for j, clause in enumerate(self.clauses):
            for lit in clause:
                occ[abs(lit) - 1].append((j, lit > 0))
        return tuple(tuple(o) for o in occ)


@dataclasses.dataclass(frozen=True)
class InstanceSpec:
    num_vars: int
    num_clauses: int
    literals_per_clause: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be positive")
        if self.num_clauses < 0:
            raise ValueError("num_clauses must be non-negative")
        if not 1 <= self.literals_per_clause <= self.num_vars:
            raise ValueError("literals_per_clause must lie in [1, num_vars]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def generate(spec: InstanceSpec) -> CnfFormula:
    """Draw a uniform random k-SAT formula.

    The stream is ``numpy.random.Generator(PCG64(seed))``. For each clause in
    turn, k distinct variables are drawn with ``choice(N, k, replace=False)``
    (literal order is draw order), then k polarities with
    ``integers(0, 2, k)`` where 1 means positive.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n, k = spec.num_vars, spec.literals_per_clause
    clauses = []
    for _ in range(spec.num_clauses):
        variables = rng.choice(n, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k)
        clauses.append(tuple(int(v) if sg else -int(v) for v, sg in zip(variables, signs)))
    return CnfFormula(n, tuple(clauses))


def evaluate(formula: CnfFormula, s) -> int:
    """Number of clauses satisfied by ``s``."""
    s = as_bitstring(s, formula.num_vars)
    if not formula.clauses:
        return 0
    var, pos, mask = formula.literal_arrays
    sat = ((s[var] == 1) == pos) & mask
    return int(np.count_nonzero(sat.any(axis=1)))


def evaluate_batch(formula: CnfFormula, solutions: np.ndarray) -> np.ndarray:
    solutions = np.asarray(solutions, dtype=np.uint8)
    if not formula.clauses:
        return np.zeros(len(solutions), dtype=np.int64)
    var, pos, mask = formula.literal_arrays
    out = np.empty(len(solutions), dtype=np.int64)
    for lo in range(0, len(solutions), _CHUNK):
        x = solutions[lo : lo + _CHUNK].astype(bool)
        sat = (x[:, var] == pos) & mask
        out[lo : lo + _CHUNK] = sat.any(axis=2).sum(axis=1)
    return out


def evaluate_flip_delta(formula: CnfFormula, s, current_fitness: int, bit: int) -> int:
    """Change in satisfied clauses when ``bit`` of ``s`` is flipped.

    Only the clauses containing the flipped variable are inspected.
    ``current_fitness`` must equal ``evaluate(formula, s)``.
    """
    if not 0 <= bit < formula.num_vars:
        raise ValueError(f"bit {bit} out of range [0, {formula.num_vars})")
    s = as_bitstring(s, formula.num_vars)
    delta = 0
    value = int(s[bit])
    for j, positive in formula.occurrences[bit]:
        others = False
        for lit in formula.clauses[j]:
            v = abs(lit) - 1
            if v != bit and (s[v] == 1) == (lit > 0):
                others = True
                break
        if others:
            continue
        before = (value == 1) == positive
        delta += -1 if before else 1
    return delta


class IncrementalEvaluator:
    """Single-walker scratch state: per-clause true-literal counts.

    Flip deltas cost O(occurrences of the variable) instead of O(m k).
    Not shareable between concurrent walkers.
    """

    def __init__(self, formula: CnfFormula, s=None):
        self.formula = formula
        self._occ = formula.occurrences
        self.bits = [0] * formula.num_vars
        self.counts = [0] * formula.num_clauses
        self.fitness = 0
        if s is not None:
            self.reset(s)

    def reset(self, s) -> None:
        s = as_bitstring(s, self.formula.num_vars)
        self.bits = [int(b) for b in s]
        self.counts = [
            sum((self.bits[abs(lit) - 1] == 1) == (lit > 0) for lit in clause)
            for clause in self.formula.clauses
        ]
        self.fitness = sum(c > 0 for c in self.counts)

    def delta(self, bit: int) -> int:
        d = 0
        value = self.bits[bit]
        counts = self.counts
        for j, positive in self._occ[bit]:
            if (value == 1) == positive:
                if counts[j] == 1:
                    d -= 1
            elif counts[j] == 0:
                d += 1
        return d

    def flip(self, bit: int) -> int:
        """Flip ``bit`` in place and return the new fitness."""
        value = self.bits[bit]
        counts = self.counts
        for j, positive in self._occ[bit]:
            if (value == 1) == positive:
                counts[j] -= 1
                if counts[j] == 0:
                    self.fitness -= 1
            else:
                counts[j] += 1
                if counts[j] == 1:
                    self.fitness += 1
        self.bits[bit] = 1 - value
        return self.fitness

    def solution(self) -> BitString:
        return as_bitstring(self.bits)


class MaxSatLandscape(Landscape):
    """Satisfied-clause count as a landscape over the formula's variables.

    For ``num_vars <= table_limit`` all 2^N fitnesses are tabulated on first
    use and neighborhoods become table lookups.
    """

    def __init__(self, formula: CnfFormula, table_limit: int = 16):
        self.formula = formula
        self.dimension = formula.num_vars
        self.table_limit = table_limit
        self._table: np.ndarray | None = None
        self._weights = np.int64(1) << np.arange(self.dimension, dtype=np.int64)

    def __repr__(self):
        return f"MaxSatLandscape(N={self.dimension}, m={self.formula.num_clauses})"

    @property
    def table(self) -> np.ndarray | None:
        if self._table is None and self.dimension <= self.table_limit:
            self._table = evaluate_batch(self.formula, all_solutions(self.dimension))
        return self._table

    def fitness(self, s):
        return evaluate(self.formula, s)

    def fitness_batch(self, solutions):
        table = self.table
        if table is not None:
            return table[np.asarray(solutions, dtype=np.int64) @ self._weights]
        return evaluate_batch(self.formula, solutions)

    def neighbor_fitness_batch(self, solutions):
        solutions = np.asarray(solutions, dtype=np.uint8)
        table = self.table
        if table is not None:
            codes = solutions.astype(np.int64) @ self._weights
            return table[codes], table[codes[:, None] ^ self._weights[None, :]]
        w = len(solutions)
        f = np.empty(w, dtype=np.int64)
        nf = np.empty((w, self.dimension), dtype=np.int64)
        for lo in range(0, w, _CHUNK):
            f[lo : lo + _CHUNK], nf[lo : lo + _CHUNK] = _clause_scan(
                self.formula, solutions[lo : lo + _CHUNK]
            )
        return f, nf


def _clause_scan(formula: CnfFormula, solutions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fitness and all N flip results for each row, from per-clause counts."""
    w, n = solutions.shape
    if not formula.clauses:
        zeros = np.zeros(w, dtype=np.int64)
        return zeros, np.zeros((w, n), dtype=np.int64)
    var, pos, mask = formula.literal_arrays
    true_lit = (solutions.astype(bool)[:, var] == pos) & mask
    counts = true_lit.sum(axis=2)
    f = np.count_nonzero(counts, axis=1).astype(np.int64)
    # Flipping a true literal breaks its clause when it is the only true one;
    # flipping a false literal repairs an unsatisfied clause.
    breaks = true_lit & (counts == 1)[:, :, None]
    makes = ~true_lit & mask & (counts == 0)[:, :, None]
    contrib = makes.astype(np.int64) - breaks.astype(np.int64)
    index = (np.arange(w, dtype=np.int64)[:, None, None] * n + var[None]).ravel()
    delta = np.bincount(index, weights=contrib.ravel(), minlength=w * n)
    return f, f[:, None] + delta.reshape(w, n).astype(np.int64)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text; errors carry the offending line number."""
    header = None
    header_line = 0
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    current_start = 0
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsError(lineno, f"duplicate header (first on line {header_line})")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(lineno, "header must read 'p cnf <vars> <clauses>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(lineno, "header counts must be integers") from None
            if n < 1 or m < 0:
                raise DimacsError(lineno, "header counts out of range")
            header, header_line = (n, m), lineno
            continue
        if header is None:
            raise DimacsError(lineno, "clause before 'p cnf' header")
        n, m = header
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsError(lineno, f"invalid literal {token!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(lineno, "literal 0 with empty clause body")
                if len(clauses) == m:
                    raise DimacsError(current_start, f"more clauses than the {m} declared")
                if len({abs(x) for x in current}) != len(current):
                    raise DimacsError(lineno, "variable repeated within clause")
                clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > n:
                raise DimacsError(lineno, f"variable {abs(lit)} exceeds declared {n}")
            if not current:
                current_start = lineno
            current.append(lit)
    if header is None:
        raise DimacsError(max(last_line, 1), "missing 'p cnf' header")
    if current:
        raise DimacsError(current_start, "clause not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(
            max(last_line, 1), f"found {len(clauses)} clauses, header declares {header[1]}"
        )
    return CnfFormula(header[0], tuple(clauses))


def write_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path) -> CnfFormula:
    with open(path, encoding="ascii") as fh:
        return parse_dimacs(fh.read())
