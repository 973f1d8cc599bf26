from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fourvertex.errors import InvalidState, NoEdges, TooLarge
from fourvertex.even import FerroIsingInstance, exact_even_sum
from fourvertex.instances import random_ferro
from fourvertex.worm import (
    WormKernel,
    check_laziness,
    check_measure_lower_bound,
    check_reversibility,
    exact_mixing_time,
    measure_lower_bound_report,
    mixing_bound,
    run_batch,
    sample_even,
    sample_even_batch,
)

from conftest import ScriptedRng


def test_single_edge_weights(single_edge):
    k = WormKernel(single_edge)
    assert k.stationary_weight(0) == 2
    assert k.stationary_weight(1) == Fraction(6, 5)


def test_single_edge_kernel(single_edge):
    k = WormKernel(single_edge)
    assert k.transition_probability(0, 1) == Fraction(3, 10)
    assert k.transition_probability(1, 0) == Fraction(1, 2)
    assert k.transition_probability(0, 0) == Fraction(7, 10)
    assert k.transition_probability(1, 1) == Fraction(1, 2)
    assert check_reversibility(k)


def test_triangle_kernel(triangle):
    k = WormKernel(triangle)
    assert len(k.states()) == 2 * (1 + 3)
    assert check_reversibility(k)
    assert check_laziness(k)
    assert check_measure_lower_bound(k)


def test_non_adjacent_is_zero(triangle):
    k = WormKernel(triangle)
    assert k.transition_probability(0, 0b111) == 0


def test_corrupted_kernel_is_caught(triangle):
    class Corrupted(WormKernel):
        def transition_probability(self, a, b):
            p = super().transition_probability(a, b)
            return p / 2 if a == 0 and b != 0 else p

    assert not check_reversibility(Corrupted(triangle))


def test_invalid_states():
    square = FerroIsingInstance.from_couplings(4, [(0, 1, 3), (1, 2, 3), (2, 3, 3), (0, 3, 3)])
    k = WormKernel(square)
    with pytest.raises(InvalidState):
        k.stationary_weight(0b0101)  # two disjoint edges: four odd vertices
    with pytest.raises(InvalidState):
        k.stationary_weight(1 << 7)
    with pytest.raises(NoEdges):
        WormKernel(FerroIsingInstance(3, ()))


def test_step_forced_flip(single_edge):
    k = WormKernel(single_edge)
    rng = ScriptedRng(uniforms=[0.7, 0.5], ints=[0, 0])
    assert k.step(0, rng) == 1


def test_step_forced_reject(single_edge):
    k = WormKernel(single_edge)
    assert k.step(0, ScriptedRng(uniforms=[0.7, 0.65], ints=[1, 0])) == 0


def test_step_lazy(single_edge):
    k = WormKernel(single_edge)
    rng = ScriptedRng(uniforms=[0.2])
    assert k.step(1, rng) == 1
    assert rng.calls == [("random", 0.2)]


@pytest.mark.parametrize("head", [0, 1])
def test_step_closes_worm(single_edge, head):
    k = WormKernel(single_edge)
    assert k.step(1, ScriptedRng(uniforms=[0.9, 0.999], ints=[head, 0])) == 0


def test_step_matches_kernel(triangle):
    """Empirical one-step frequencies from every state agree with the exact row."""
    k = WormKernel(triangle)
    rng = np.random.default_rng(2)
    draws = 20000
    for a in k.states():
        counts = {}
        for _ in range(draws):
            b = k.step(a, rng)
            counts[b] = counts.get(b, 0) + 1
        row = k.row(a)
        row[a] = k.transition_probability(a, a)
        assert set(counts) <= set(row)
        for b, p in row.items():
            se = (float(p) * (1 - float(p)) / draws) ** 0.5
            assert abs(counts.get(b, 0) / draws - float(p)) <= 5 * se + 1e-9


@given(st.integers(2, 6), st.floats(0.3, 1.0), st.integers(0, 2**32 - 1))
def test_random_kernels_are_reversible_and_lazy(m, p, seed):
    ferro = random_ferro(m, p, np.random.default_rng(seed))
    for comp in ferro.components():
        k = WormKernel(ferro, comp)
        assert check_reversibility(k)
        assert check_laziness(k)
        rep = measure_lower_bound_report(k)
        assert rep["pi_form_holds"] and rep["w_form_holds"]


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_chain_stays_in_state_space(m, seed):
    rng = np.random.default_rng(seed)
    ferro = random_ferro(m, 0.8, rng)
    for comp in ferro.components():
        k = WormKernel(ferro, comp)
        s = 0
        for _ in range(200):
            s = k.step(s, rng)
            assert len(k.odd_vertices(s)) in (0, 2)


def test_measure_bound_single_edge(single_edge):
    rep = measure_lower_bound_report(WormKernel(single_edge))
    assert rep["min_pi"] == Fraction(3, 8)
    assert rep["bound"] == Fraction(3, 20)
    assert rep["pi_form_holds"]


def test_mixing_bound_value_and_monotonicity(single_edge):
    k = WormKernel(single_edge)
    assert mixing_bound(k, 0.1) == pytest.approx(537.562, rel=1e-6)
    assert mixing_bound(k, 0.2) < mixing_bound(k, 0.1)
    double_x = WormKernel(FerroIsingInstance.from_x(2, [(0, 1, Fraction(6, 7))]))
    smaller = WormKernel(FerroIsingInstance.from_x(2, [(0, 1, Fraction(3, 7))]))
    assert mixing_bound(double_x, 0.1) < mixing_bound(smaller, 0.1)
    with pytest.raises(ValueError):
        mixing_bound(k, 1.5)


def test_exact_mixing_time(triangle):
    k = WormKernel(triangle)
    t = exact_mixing_time(k, 0.01)
    assert t >= 1
    assert exact_mixing_time(k, 0.01, from_empty=True) <= t
    with pytest.raises(TooLarge):
        exact_mixing_time(k, 1e-12, max_steps=3)


def test_sample_even_single_edge(single_edge):
    k = WormKernel(single_edge)
    assert all(sample_even(k, 25, seed=s) == frozenset() for s in range(20))


def test_sample_even_triangle(triangle):
    k = WormKernel(triangle)
    out = sample_even_batch(k, 60, 40000, np.random.default_rng(4))
    full = out.all(axis=1).mean()
    assert abs(full - 1 / 9) < 0.01
    assert not (out.any(axis=1) & ~out.all(axis=1)).any()
    assert exact_even_sum(triangle) == Fraction(9, 8)


def test_batch_matches_stationary(triangle):
    k = WormKernel(triangle)
    states = k.states()
    pi = k.stationary(states)
    edges, _ = run_batch(k, 80, 40000, np.random.default_rng(8))
    masks = edges.astype(np.int64) @ (1 << np.arange(k.num_edges))
    freq = np.array([(masks == s).mean() for s in states])
    assert 0.5 * np.abs(freq - pi).sum() < 0.02


def test_long_run_frequencies(single_edge):
    k = WormKernel(single_edge)
    rng = np.random.default_rng(9)
    s, hits, n = 0, 0, 40000
    for _ in range(n):
        s = k.step(s, rng)
        hits += s
    # pi({e}) = (6/5) / (2 + 6/5) = 3/8
    assert abs(hits / n - 3 / 8) < 0.02
