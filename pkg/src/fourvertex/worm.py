"""The worm process on even and near-even subgraphs of a ferromagnetic Ising graph.

States are edge subsets with zero or two odd-degree vertices, stored as
integer bitmasks over the kernel's local edge list.  The stationary weight is
``xi(S) * prod_{e in S} x_e`` with ``xi = m`` on even states and ``2`` on
near-even ones.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidState, NoEdges, TooLarge
from .even import FerroIsingInstance, cycle_basis_masks

MAX_STATES = 2**20


class WormState(NamedTuple):
    edges: frozenset[int]
    odd_vertices: tuple[int, ...]


class WormKernel:
    """Lazy Metropolis worm kernel on the given vertices of ``ferro``.

    ``vertices`` defaults to every vertex with at least one edge; isolated
    vertices never take part.  Local vertex ``k`` is ``self.vertices[k]`` and
    local edge ``k`` is ferro edge ``self.edge_ids[k]``.
    """

    def __init__(self, ferro: FerroIsingInstance, vertices: Sequence[int] | None = None):
        if vertices is None:
            vertices = [v for v in range(ferro.m) if ferro.degrees[v]]
        self.ferro = ferro
        self.vertices = tuple(sorted(vertices))
        pos = {v: k for k, v in enumerate(self.vertices)}
        self.edge_ids = tuple(k for k, e in enumerate(ferro.edges) if e.u in pos and e.v in pos)
        if not self.edge_ids:
            raise NoEdges("the worm kernel needs at least one edge")
        self.ends = tuple((pos[ferro.edges[k].u], pos[ferro.edges[k].v]) for k in self.edge_ids)
        self.x = tuple(ferro.edges[k].x for k in self.edge_ids)
        self.xf = tuple(float(x) for x in self.x)
        self.m = len(self.vertices)
        self.num_edges = len(self.ends)
        deg = [0] * self.m
        nbrs: list[list[tuple[int, int]]] = [[] for _ in range(self.m)]
        for k, (a, b) in enumerate(self.ends):
            deg[a] += 1
            deg[b] += 1
            nbrs[a].append((b, k))
            nbrs[b].append((a, k))
        if min(deg) == 0:
            raise ValueError("every kernel vertex needs an edge")
        self.deg = tuple(deg)
        self.nbrs = tuple(tuple(r) for r in nbrs)

    # -- state helpers -----------------------------------------------------

    def odd_vertices(self, state: int) -> tuple[int, ...]:
        par = [0] * self.m
        k = 0
        s = state
        while s:
            if s & 1:
                a, b = self.ends[k]
                par[a] ^= 1
                par[b] ^= 1
            s >>= 1
            k += 1
        return tuple(v for v in range(self.m) if par[v])

    def describe(self, state: int) -> WormState:
        return WormState(
            frozenset(self.edge_ids[k] for k in range(self.num_edges) if (state >> k) & 1),
            tuple(self.vertices[v] for v in self.odd_vertices(state)),
        )

    def _checked_odd(self, state: int) -> tuple[int, ...]:
        if state < 0 or state >> self.num_edges:
            raise InvalidState(f"state {state:#x} uses edges outside the kernel")
        odd = self.odd_vertices(state)
        if len(odd) not in (0, 2):
            raise InvalidState(f"state has {len(odd)} odd vertices")
        return odd

    def weight(self, state: int) -> Fraction:
        w = Fraction(1)
        for k in range(self.num_edges):
            if (state >> k) & 1:
                w *= self.x[k]
        return w

    def stationary_weight(self, state: int) -> Fraction:
        odd = self._checked_odd(state)
        return (self.m if not odd else 2) * self.weight(state)

    def states(self, max_states: int = MAX_STATES) -> list[int]:
        """Every even and near-even state."""
        basis = cycle_basis_masks(self.m, self.ends)
        n_pairs = self._connected_pairs()
        total = 2 ** len(basis) * (1 + len(n_pairs))
        if total > max_states:
            raise TooLarge(f"{total} worm states exceed the cap of {max_states}")
        evens = [0]
        for b in basis:
            evens += [s ^ b for s in evens]
        out = list(evens)
        for path in n_pairs.values():
            out.extend(path ^ s for s in evens)
        return out

    def _connected_pairs(self) -> dict[tuple[int, int], int]:
        """Spanning-forest path mask for every pair of vertices in one component."""
        comp = [-1] * self.m
        paths: list[dict[int, int]] = []
        for root in range(self.m):
            if comp[root] != -1:
                continue
            to_root = {root: 0}
            comp[root] = len(paths)
            stack = [root]
            while stack:
                a = stack.pop()
                for b, k in self.nbrs[a]:
                    if comp[b] == -1:
                        comp[b] = comp[root]
                        to_root[b] = to_root[a] | (1 << k)
                        stack.append(b)
            paths.append(to_root)
        out = {}
        for a, b in itertools.combinations(range(self.m), 2):
            if comp[a] == comp[b]:
                tr = paths[comp[a]]
                out[(a, b)] = tr[a] ^ tr[b]
        return out

    # -- kernel ------------------------------------------------------------

    def transition_probability(self, a: int, b: int) -> Fraction:
        odd_a = self._checked_odd(a)
        self._checked_odd(b)
        if a == b:
            return 1 - sum(self.row(a).values(), Fraction(0))
        diff = a ^ b
        if diff & (diff - 1):
            return Fraction(0)
        k = diff.bit_length() - 1
        u, v = self.ends[k]
        absent = not (a >> k) & 1
        x = self.x[k]
        du, dv = self.deg[u], self.deg[v]
        if not odd_a:
            return (x if absent else 1) * Fraction(1, 2 * self.m) * (Fraction(1, du) + Fraction(1, dv))
        if not self.odd_vertices(b):
            return (x if absent else 1) * Fraction(1, 4) * (Fraction(1, du) + Fraction(1, dv))
        if u not in odd_a:
            u, v = v, u
            du, dv = dv, du
        ratio = Fraction(du, dv) * (x if absent else 1 / x)
        return min(Fraction(1), ratio) / (4 * du)

    def row(self, a: int) -> dict[int, Fraction]:
        """Off-diagonal entries of row ``a`` (neighbors reachable by one toggle)."""
        odd_a = self._checked_odd(a)
        out = {}
        for k in range(self.num_edges):
            b = a ^ (1 << k)
            u, v = self.ends[k]
            odd_b = len(odd_a) + (-1 if u in odd_a else 1) + (-1 if v in odd_a else 1)
            if odd_b in (0, 2):
                out[b] = self.transition_probability(a, b)
        return out

    def step(self, state: int, rng) -> int:
        """One lazy step.  Draws: coin, vertex, neighbor, acceptance."""
        if rng.random() < 0.5:
            return state
        odd = self.odd_vertices(state)
        if odd:
            v = odd[int(rng.integers(0, 2))]
        else:
            v = int(rng.integers(0, self.m))
        u, k = self.nbrs[v][int(rng.integers(0, self.deg[v]))]
        present = (state >> k) & 1
        if not odd or u in odd:
            p = 1.0 if present else self.xf[k]
        else:
            p = min(1.0, self.deg[v] / self.deg[u] * (1.0 / self.xf[k] if present else self.xf[k]))
        if rng.random() < p:
            return state ^ (1 << k)
        return state

    def matrix(self, max_states: int = 4096) -> tuple[list[int], np.ndarray]:
        states = self.states(max_states)
        index = {s: i for i, s in enumerate(states)}
        P = np.zeros((len(states), len(states)))
        for i, s in enumerate(states):
            for t, p in self.row(s).items():
                P[i, index[t]] = float(p)
            P[i, i] = 1.0 - P[i].sum()
        return states, P

    def stationary(self, states: Sequence[int]) -> np.ndarray:
        w = np.array([float(self.stationary_weight(s)) for s in states])
        return w / w.sum()


# -- module-level operations -------------------------------------------------


def stationary_weight(kernel: WormKernel, state: int) -> Fraction:
    return kernel.stationary_weight(state)


def transition_probability(kernel: WormKernel, a: int, b: int) -> Fraction:
    return kernel.transition_probability(a, b)


def step(kernel: WormKernel, state: int, rng) -> int:
    return kernel.step(state, rng)


def check_reversibility(kernel: WormKernel, max_states: int = MAX_STATES) -> bool:
    """Exact detailed balance, nonnegativity and unit row sums on the whole state space."""
    states = kernel.states(max_states)
    valid = set(states)
    for a in states:
        row = kernel.row(a)
        if any(b not in valid for b in row):
            return False
        if any(p < 0 for p in row.values()):
            return False
        diag = kernel.transition_probability(a, a)
        if diag < 0 or diag + sum(row.values()) != 1:
            return False
        wa = kernel.stationary_weight(a)
        for b, p in row.items():
            if wa * p != kernel.stationary_weight(b) * kernel.transition_probability(b, a):
                return False
    return True


def check_laziness(kernel: WormKernel, max_states: int = MAX_STATES) -> bool:
    return all(kernel.transition_probability(s, s) >= Fraction(1, 2) for s in kernel.states(max_states))


def measure_lower_bound_report(kernel: WormKernel, max_states: int = MAX_STATES) -> dict:
    """Compare ``(1/2)(x_min/2)**|E|`` with the minimum of both ``pi_worm`` and ``w_worm``."""
    states = kernel.states(max_states)
    weights = [kernel.stationary_weight(s) for s in states]
    z = sum(weights)
    bound = Fraction(1, 2) * (min(kernel.x) / 2) ** kernel.num_edges
    min_w = min(weights)
    return {
        "bound": bound,
        "min_pi": min_w / z,
        "min_w": min_w,
        "pi_form_holds": min_w / z >= bound,
        "w_form_holds": min_w >= bound,
    }


def check_measure_lower_bound(kernel: WormKernel, max_states: int = MAX_STATES) -> bool:
    return measure_lower_bound_report(kernel, max_states)["pi_form_holds"]


def mixing_bound(kernel: WormKernel, epsilon: float) -> float:
    """Worm-process mixing-time bound with ``m`` circuit-graph vertices."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not kernel.num_edges:
        raise NoEdges("bound undefined without edges")
    m, ne = kernel.m, kernel.num_edges
    x_min = float(min(kernel.x))
    return 4 * m**5 * ne**2 * (math.log(2 / epsilon) / ne + math.log(2 / x_min))


def exact_mixing_time(kernel: WormKernel, epsilon: float, max_steps: int = 100_000, from_empty: bool = False) -> int:
    """Smallest ``t`` with ``max_x ||P^t(x, .) - pi||_TV <= epsilon`` by matrix powering."""
    states, P = kernel.matrix()
    pi = kernel.stationary(states)
    dist = np.eye(len(states))
    if from_empty:
        dist = dist[[states.index(0)]]
    for t in range(max_steps + 1):
        if 0.5 * np.abs(dist - pi).sum(axis=1).max() <= epsilon:
            return t
        dist = dist @ P
    raise TooLarge(f"not mixed to {epsilon} within {max_steps} steps")


# -- sampling ----------------------------------------------------------------


def sample_even(kernel: WormKernel, steps: int, seed=None) -> frozenset[int]:
    """Run ``steps`` moves from the empty state, restarting until the end state is even.

    Returns ferro edge indices.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        s = 0
        for _ in range(steps):
            s = kernel.step(s, rng)
        if not kernel.odd_vertices(s):
            return kernel.describe(s).edges


class _BatchTables:
    def __init__(self, kernel: WormKernel):
        dmax = max(kernel.deg)
        self.nbr = np.zeros((kernel.m, dmax), dtype=np.int64)
        self.nbr_edge = np.zeros((kernel.m, dmax), dtype=np.int64)
        for v, row in enumerate(kernel.nbrs):
            for j, (u, k) in enumerate(row):
                self.nbr[v, j] = u
                self.nbr_edge[v, j] = k
        self.deg = np.array(kernel.deg, dtype=np.int64)
        self.degf = self.deg.astype(float)
        self.x = np.array(kernel.xf)
        self.m = kernel.m


def run_batch(kernel: WormKernel, steps: int, count: int, rng: np.random.Generator, tables=None):
    """Advance ``count`` independent chains ``steps`` moves from the empty state.

    Returns ``(edges, odd)`` where ``edges`` is a ``(count, |E|)`` boolean
    array and ``odd`` a ``(count, 2)`` array of odd vertices (-1 when even).
    The per-chain draw order matches :meth:`WormKernel.step`.
    """
    tb = tables or _BatchTables(kernel)
    state = np.zeros((count, kernel.num_edges), dtype=bool)
    odd = np.full((count, 2), -1, dtype=np.int64)
    rows = np.arange(count)
    for _ in range(steps):
        draws = rng.random((4, count))
        move = draws[0] >= 0.5
        is_even = odd[:, 0] < 0
        pick = np.where(draws[1] < 0.5, odd[:, 0], odd[:, 1])
        v = np.where(is_even, np.minimum((draws[1] * tb.m).astype(np.int64), tb.m - 1), pick)
        j = np.minimum((draws[2] * tb.deg[v]).astype(np.int64), tb.deg[v] - 1)
        u = tb.nbr[v, j]
        k = tb.nbr_edge[v, j]
        present = state[rows, k]
        xk = tb.x[k]
        u_odd = (u == odd[:, 0]) | (u == odd[:, 1])
        simple = is_even | u_odd
        p_simple = np.where(present, 1.0, xk)
        ratio = tb.degf[v] / tb.degf[u] * np.where(present, 1.0 / xk, xk)
        p = np.where(simple, p_simple, np.minimum(1.0, ratio))
        acc = move & (draws[3] < p)
        if not acc.any():
            continue
        state[rows[acc], k[acc]] ^= True
        # odd-set update: even -> {v,u}; closing the worm -> {}; moving a head -> replace v by u
        new0 = np.where(is_even, v, np.where(u_odd, -1, np.where(odd[:, 0] == v, u, odd[:, 0])))
        new1 = np.where(is_even, u, np.where(u_odd, -1, np.where(odd[:, 1] == v, u, odd[:, 1])))
        odd[acc, 0] = new0[acc]
        odd[acc, 1] = new1[acc]
    return state, odd


def sample_even_batch(kernel: WormKernel, steps: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` even subgraphs (``(count, |E|)`` boolean, local edge order) with reruns."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    tb = _BatchTables(kernel)
    out = np.zeros((count, kernel.num_edges), dtype=bool)
    todo = np.arange(count)
    while todo.size:
        state, odd = run_batch(kernel, steps, todo.size, rng, tb)
        ok = odd[:, 0] < 0
        out[todo[ok]] = state[ok]
        todo = todo[~ok]
    return out
