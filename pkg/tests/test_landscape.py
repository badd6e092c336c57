import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoscape.landscape import (
    ConstantLandscape,
    Landscape,
    PopcountLandscape,
    as_bitstring,
    bits_to_int,
    evolvability,
    int_to_bits,
    neighbors,
    neutral_degree,
    neutral_neighbors,
)
from evoscape.maxsat import CnfFormula, MaxSatLandscape

from .conftest import truth_table_count

bitstrings = st.integers(1, 12).flatmap(
    lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n)
)


def test_neighbors_n2():
    out = neighbors(ConstantLandscape(2), "00")
    assert [list(x) for x in out] == [[1, 0], [0, 1]]


def test_neighbors_n1():
    assert [list(x) for x in neighbors(ConstantLandscape(1), [1])] == [[0]]


def test_neighbors_n16_distinct(rng):
    s = rng.integers(0, 2, 16)
    out = neighbors(ConstantLandscape(16), s)
    assert len(out) == 16
    assert len({tuple(x) for x in out}) == 16
    assert all(np.sum(x != s) == 1 for x in out)


def test_length_mismatch():
    with pytest.raises(ValueError):
        neighbors(ConstantLandscape(3), "01")
    with pytest.raises(ValueError):
        as_bitstring([0, 2])


@given(bitstrings)
def test_neighbors_involution(bits):
    land = ConstantLandscape(len(bits))
    s = as_bitstring(bits)
    for i, t in enumerate(neighbors(land, s)):
        assert not np.array_equal(t, s)
        assert np.array_equal(neighbors(land, t)[i], s)


def test_constant_and_popcount_neutrality(rng):
    for _ in range(20):
        s = rng.integers(0, 2, 8)
        assert neutral_degree(ConstantLandscape(8, 1.5), s) == 8
        assert len(neutral_neighbors(ConstantLandscape(8), s)) == 8
        assert neutral_degree(PopcountLandscape(8), s) == 0
        assert neutral_neighbors(PopcountLandscape(8), s) == []


def test_neutral_neighbors_three_clause_formula():
    clauses = [(1, 2, 3), (-1, 2, 4), (1, -3, -4)]
    land = MaxSatLandscape(CnfFormula(4, clauses))
    s = as_bitstring("0000")
    # oracle: evaluate the four neighbors directly
    f0 = truth_table_count(clauses, s)
    expected = [t for t in neighbors(land, s) if truth_table_count(clauses, t) == f0]
    got = neutral_neighbors(land, s)
    assert [list(x) for x in got] == [list(x) for x in expected] == [[1, 0, 0, 0], [0, 0, 0, 1]]
    assert neutral_degree(land, s) == 2


def test_evolvability_examples():
    assert evolvability(ConstantLandscape(5, 3.0), "01010") == 3.0
    assert evolvability(PopcountLandscape(4), "0101") == 3
    assert evolvability(PopcountLandscape(4), "1111") == 3


@settings(max_examples=50)
@given(bitstrings)
def test_evolvability_is_max_over_neighbors(bits):
    land = PopcountLandscape(len(bits))
    ef = evolvability(land, bits)
    fits = [land.fitness(t) for t in neighbors(land, bits)]
    assert ef == max(fits)
    assert all(ef >= f for f in fits)


@given(bitstrings)
def test_neutral_subset_and_degree_range(bits):
    land = MaxSatLandscape(CnfFormula(len(bits), [(1,)] if len(bits) == 1 else [(1, -2)]))
    f = land.fitness(bits)
    nn = neutral_neighbors(land, bits)
    all_n = {tuple(x) for x in neighbors(land, bits)}
    assert all(tuple(x) in all_n and land.fitness(x) == f for x in nn)
    assert 0 <= neutral_degree(land, bits) <= len(bits)


def test_generic_batch_fallback_matches_scalar(rng, sat16):
    class Slow(Landscape):
        dimension = 16

        def fitness(self, s):
            return sat16.fitness(s)

    x = rng.integers(0, 2, (5, 16)).astype(np.uint8)
    f1, nf1 = Slow().neighbor_fitness_batch(x)
    f2, nf2 = sat16.neighbor_fitness_batch(x)
    assert np.array_equal(f1, f2) and np.array_equal(nf1, nf2)


def test_int_roundtrip():
    for v in (0, 1, 5, 1023):
        assert bits_to_int(int_to_bits(v, 10)) == v
