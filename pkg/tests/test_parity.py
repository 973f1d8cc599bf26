import itertools

import numpy as np
from hypothesis import given, strategies as st

from fourvertex.circuits import apply_flips, classify, decompose
from fourvertex.instances import odd_cycle_instance, random_four_regular, theta4, theta4_swapped_14
from fourvertex.parity import Infeasible, ParitySystem, build_system, satisfies, solve, solve_report


def exhaustive(system):
    return [v for v in itertools.product((0, 1), repeat=system.num_vars) if satisfies(system, v)]


def graph_of(inst):
    return classify(inst, decompose(inst))


def test_theta4_systems():
    g = graph_of(theta4(2))
    assert build_system(g, 2).constraints == ((0, 1, 0),)
    assert build_system(g, "1/2").constraints == ((0, 1, 1),)
    assert build_system(g, 1).constraints == ()
    assert tuple(solve(build_system(g, 2))) == (0, 0)
    assert tuple(solve(build_system(g, "1/2"))) == (0, 1)


def test_tie_needs_no_flip():
    g = graph_of(theta4_swapped_14(2))
    assert build_system(g, 2).constraints == ((0, 1, 0),)


def test_odd_cycle_is_infeasible():
    g = graph_of(odd_cycle_instance(2))
    result = solve(build_system(g, 2))
    assert isinstance(result, Infeasible)
    assert sum(b for _, _, b in result.witness) % 2 == 1
    report = solve_report(build_system(g, 2), result)
    assert report["feasible"] is False and len(report["odd_cycle"]) == 3


def test_self_constraint():
    assert isinstance(solve(ParitySystem(1, ((0, 0, 1),))), Infeasible)
    assert tuple(solve(ParitySystem(1, ((0, 0, 0),)))) == (0,)


def witness_is_odd_cycle(witness):
    degree = {}
    for i, j, _ in witness:
        degree[i] = degree.get(i, 0) + 1
        degree[j] = degree.get(j, 0) + 1
    return all(d % 2 == 0 for d in degree.values()) and sum(b for *_, b in witness) % 2 == 1


@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_random_systems_match_exhaustive(m, seed, density):
    rng = np.random.default_rng(seed)
    cons = tuple(
        (i, j, int(rng.integers(0, 2)))
        for i, j in itertools.combinations(range(m), 2)
        if rng.random() < density * 3 / max(m, 1)
    )
    system = ParitySystem(m, cons)
    result = solve(system)
    feasible = bool(exhaustive(system))
    assert result.feasible == feasible
    if feasible:
        assert satisfies(system, result.values)
        assert satisfies(system, [1 - v for v in result.values])
    else:
        assert witness_is_odd_cycle(result.witness)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.sampled_from(["1/3", "1/2", "2", "3"]))
def test_flips_make_every_pair_ferromagnetic(n, seed, beta):
    inst = random_four_regular(n, np.random.default_rng(seed), beta=beta)
    g = graph_of(inst)
    result = solve(build_system(g, inst.beta))
    assert result.feasible == bool(exhaustive(build_system(g, inst.beta)))
    if result.feasible:
        fixed = apply_flips(g, result.values)
        for a, d in fixed.pairs.values():
            assert inst.beta ** (a - d) >= 1
