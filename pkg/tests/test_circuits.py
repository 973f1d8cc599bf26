import numpy as np
import pytest
from hypothesis import given, strategies as st

from fourvertex.circuits import apply_flips, circuit_partition, classify, decompose, decomposition_report
from fourvertex.errors import MismatchedDecomposition
from fourvertex.instances import double_loop, doubled_cycle, random_four_regular, swap_slots, theta4, theta4_swapped_14
from fourvertex.model import brute_force_partition


def test_theta4_circuits():
    dec = decompose(theta4(2))
    assert [c.dart_labels() for c in dec.circuits] == [
        ["0.1", "0.4", "1.4", "1.1"],
        ["0.2", "0.3", "1.3", "1.2"],
    ]
    assert dec.parity[dec.circuits[0].initial_dart] == 0


def test_doubled_4cycle_circuits():
    dec = decompose(doubled_cycle(4))
    assert dec.m == 4
    assert all(len(c.darts) == 4 for c in dec.circuits)


def test_double_loop_circuit():
    inst = double_loop(2)
    dec = decompose(inst)
    assert dec.m == 1
    assert dec.circuits[0].darts == (0, 3, 2, 1)
    graph = classify(inst, dec)
    assert graph.pairs == {}
    assert (graph.const_beta_exponent, graph.const_one_count) == (0, 1)


def test_theta4_classify():
    inst = theta4(2)
    graph = classify(inst, decompose(inst))
    assert graph.pairs == {(0, 1): (2, 0)}
    assert graph.const_beta_exponent == graph.const_one_count == 0


def test_theta4_swap_14_gives_one_agree_one_disagree():
    inst = theta4_swapped_14(2)
    graph = classify(inst, decompose(inst))
    assert graph.pairs == {(0, 1): (1, 1)}
    assert brute_force_partition(inst) == 4 * 2  # all four assignments weigh beta


def test_theta4_swap_12_34_keeps_both_agree():
    # Swapping 1<->2 and 3<->4 at v exchanges which circuit owns each pair
    # but leaves both vertices agree: (A, D) stays (2, 0), and Z stays 10.
    inst = swap_slots(swap_slots(theta4(2), 1, 1, 2), 1, 3, 4)
    graph = classify(inst, decompose(inst))
    assert graph.pairs == {(0, 1): (2, 0)}
    assert brute_force_partition(inst) == 10


@pytest.mark.parametrize("flips, expected", [((0, 0), (2, 0)), ((1, 1), (2, 0)), ((1, 0), (0, 2)), ((0, 1), (0, 2))])
def test_apply_flips_theta4(flips, expected):
    inst = theta4(2)
    graph = classify(inst, decompose(inst))
    assert apply_flips(graph, flips).pairs[(0, 1)] == expected


def test_flip_equals_reroot_by_one():
    inst = theta4(2)
    dec = decompose(inst)
    moved = classify(inst, dec.rerooted(0, 1))
    assert moved == apply_flips(classify(inst, dec), (1, 0))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.data())
def test_reroot_matches_flips(n, seed, data):
    inst = random_four_regular(n, np.random.default_rng(seed))
    dec = decompose(inst)
    graph = classify(inst, dec)
    offsets = [data.draw(st.integers(0, len(c.darts) - 1)) for c in dec.circuits]
    moved = dec
    for cid, k in enumerate(offsets):
        moved = moved.rerooted(cid, k)
    flips = [k % 2 for k in offsets]
    assert classify(inst, moved) == apply_flips(graph, flips)


@given(st.integers(1, 7), st.integers(0, 2**32 - 1), st.data())
def test_apply_flips_is_an_involution(n, seed, data):
    inst = random_four_regular(n, np.random.default_rng(seed))
    graph = classify(inst, decompose(inst))
    flips = data.draw(st.lists(st.integers(0, 1), min_size=graph.m, max_size=graph.m))
    assert apply_flips(apply_flips(graph, flips), flips) == graph
    assert graph.num_vertices_accounted == n


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.sampled_from(["1/3", "1/2", "1", "2", "3"]))
def test_circuit_partition_matches_oracle(n, seed, beta):
    inst = random_four_regular(n, np.random.default_rng(seed), beta=beta)
    assert circuit_partition(inst) == brute_force_partition(inst)


def test_circuits_partition_darts():
    inst = random_four_regular(6, np.random.default_rng(1))
    dec = decompose(inst)
    darts = sorted(d for c in dec.circuits for d in c.darts)
    assert darts == list(range(inst.num_darts))
    assert all(len(c.darts) % 2 == 0 for c in dec.circuits)


def test_mismatched_decomposition():
    with pytest.raises(MismatchedDecomposition):
        classify(theta4(2), decompose(doubled_cycle(3)))
    dec = decompose(theta4(2))
    with pytest.raises(MismatchedDecomposition):
        classify(theta4_swapped_14(2), dec)


def test_report_shape():
    inst = theta4(2)
    dec = decompose(inst)
    rep = decomposition_report(inst, dec, classify(inst, dec))
    assert rep["m"] == 2
    assert rep["pairs"] == [{"i": 0, "j": 1, "A": 2, "D": 0}]
