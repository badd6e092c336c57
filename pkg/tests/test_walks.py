import numpy as np
import pytest

from evoscape.landscape import (
    ConstantLandscape,
    PopcountLandscape,
    evolvability,
    flip,
    neighbors,
    neutral_degree,
    neutral_neighbors,
)
from evoscape.maxsat import evaluate
from evoscape.seeds import walk_rng
from evoscape.stats import autocorrelation, autocorrelation_naive
from evoscape.walks import (
    WalkConfig,
    evolvability_walk,
    evolvability_walks,
    neutral_random_walk,
    random_walk,
    sample_starts,
)


def test_random_walk_constant():
    tr = random_walk(ConstantLandscape(6, 2.0), "010101", 50, np.random.default_rng(0))
    assert len(tr) == 51 and np.all(tr.observations == 2.0)
    assert not tr.terminated_early


def test_random_walk_single_bit_alternates():
    tr = random_walk(PopcountLandscape(1), [0], 9, np.random.default_rng(0))
    assert list(tr.observations) == [0, 1] * 5
    assert [list(s) for s in tr.solutions] == [[0], [1]] * 5


def test_random_walk_steps_are_neighbors(rng):
    land = PopcountLandscape(16)
    tr = random_walk(land, np.zeros(16, dtype=np.uint8), 200, rng)
    diffs = np.abs(np.diff(tr.solutions.astype(int), axis=0)).sum(axis=1)
    assert np.all(diffs == 1)


def test_random_walk_popcount_autocorrelation_matches_naive(rng):
    land = PopcountLandscape(16)
    tr = random_walk(land, rng.integers(0, 2, 16), 10_000, rng)
    fast = autocorrelation(tr.observations, 1)[1]
    slow = autocorrelation_naive(tr.observations, 1)[1]
    assert abs(fast - slow) <= 1e-12
    # one-flip popcount walk: rho(1) = 1 - 2/N in expectation
    assert fast == pytest.approx(1 - 2 / 16, abs=0.03)


def test_neutral_walk_popcount_stops_immediately(rng):
    tr = neutral_random_walk(PopcountLandscape(8), rng.integers(0, 2, 8), 100, rng)
    assert len(tr) == 1 and tr.terminated_early


def test_neutral_walk_constant():
    tr = neutral_random_walk(ConstantLandscape(8, 4.0), "00000000", 100, np.random.default_rng(1))
    assert len(tr) == 101 and not tr.terminated_early
    assert np.all(tr.observations == 4.0) and tr.network_fitness == 4.0


def test_neutral_walk_stays_on_network(sat16, rng):
    for _ in range(50):
        tr = neutral_random_walk(sat16, rng.integers(0, 2, 16), 100, rng)
        assert len(tr) <= 101
        for s in tr.solutions:
            assert evaluate(sat16.formula, s) == tr.network_fitness
        if tr.terminated_early:
            assert neutral_degree(sat16, tr.solutions[-1]) == 0


def test_evolvability_walk_constant_and_short():
    cfg = WalkConfig(walk_length=30, num_walks=1, min_usable_length=20)
    tr = evolvability_walk(ConstantLandscape(5, 3.0), "01011", cfg, np.random.default_rng(0))
    assert np.all(tr.observations == 3.0) and len(tr) == 31
    tr = evolvability_walk(PopcountLandscape(5), "01011", cfg, np.random.default_rng(0))
    assert len(tr) == 1 and tr.terminated_early and tr.observations[0] == 4


def test_evolvability_walk_matches_neighborhood_max(sat16, rng):
    cfg = WalkConfig(walk_length=100)
    tr = evolvability_walk(sat16, rng.integers(0, 2, 16), cfg, rng)
    for s, ef in zip(tr.solutions, tr.observations):
        direct = max(evaluate(sat16.formula, t) for t in neighbors(sat16, s))
        assert ef == direct == evolvability(sat16, s)
        if neutral_degree(sat16, s) >= 1:
            assert ef >= tr.network_fitness


def test_batched_walks_equal_single_walks(sat16, sat64):
    for land in (sat16, sat64, ConstantLandscape(6), PopcountLandscape(6)):
        cfg = WalkConfig(walk_length=60, num_walks=25, seed=4242)
        batch = evolvability_walks(land, cfg)
        for w, tr in enumerate(batch):
            r = walk_rng(cfg.seed, w)
            start = sample_starts(land, 1, r)[0]
            single = evolvability_walk(land, start, cfg, r)
            assert np.array_equal(tr.start, start)
            assert np.array_equal(tr.observations, single.observations)
            assert np.array_equal(tr.solutions, single.solutions)
            assert tr.terminated_early == single.terminated_early
            assert tr.network_fitness == single.network_fitness


def test_batched_walks_given_starts(sat16, rng):
    starts = rng.integers(0, 2, (10, 16)).astype(np.uint8)
    cfg = WalkConfig(walk_length=20, num_walks=10, seed=3)
    out = evolvability_walks(sat16, cfg, starts=starts)
    assert all(np.array_equal(t.start, s) for t, s in zip(out, starts))


def test_walk_determinism(sat16):
    cfg = WalkConfig(walk_length=50, num_walks=40, seed=17)
    a = evolvability_walks(sat16, cfg)
    b = evolvability_walks(sat16, cfg)
    assert all(np.array_equal(x.observations, y.observations) for x, y in zip(a, b))
    c = evolvability_walks(sat16, WalkConfig(walk_length=50, num_walks=40, seed=18))
    assert any(not np.array_equal(x.observations, y.observations) for x, y in zip(a, c))


def test_uniform_neutral_neighbor_choice(sat16, rng):
    # find a solution with several neutral neighbors
    while True:
        s = rng.integers(0, 2, 16).astype(np.uint8)
        nn = neutral_neighbors(sat16, s)
        if len(nn) >= 4:
            break
    d = len(nn)
    trials = 20_000
    counts = {tuple(t): 0 for t in nn}
    for _ in range(trials):
        tr = neutral_random_walk(sat16, s, 1, rng)
        counts[tuple(tr.solutions[1])] += 1
    expected = trials / d
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    # chi-square with d-1 dof; 40 is far beyond the 99.9% quantile for d <= 16
    assert chi2 < 40


def test_sample_starts(rng):
    one = sample_starts(PopcountLandscape(1), 4000, rng)[:, 0]
    ones = int(one.sum())
    # chi-square with 1 dof at 99.9%: 10.83
    assert (ones - 2000) ** 2 / 2000 + (2000 - ones) ** 2 / 2000 < 10.83
    many = sample_starts(PopcountLandscape(16), 1000, rng)
    assert many.shape == (1000, 16)
    means = many.mean(axis=0)
    assert np.all((means >= 0.45) & (means <= 0.55))
    a = sample_starts(PopcountLandscape(16), 5, np.random.default_rng(9))
    b = sample_starts(PopcountLandscape(16), 5, np.random.default_rng(9))
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        sample_starts(PopcountLandscape(3), 0, rng)


def test_walk_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(walk_length=10, min_usable_length=20)
    with pytest.raises(ValueError):
        WalkConfig(num_walks=0)
