"""Ferromagnetic Ising reduction and its even-subgraph (high-temperature) form.

After a parity solution is applied, circuit pair ``(u, v)`` carries
``beta_e = beta ** (A - D) >= 1`` and the partition function becomes

    Z = prefactor * sum_sigma prod_e beta_e ** [sigma_u == sigma_v]
      = prefactor * 2**m * prod_e (beta_e + 1) / 2 * sum_{S even} prod_{e in S} x_e

with ``x_e = (beta_e - 1) / (beta_e + 1)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .circuits import CircuitDecomposition, CircuitGraph, apply_flips, classify, decompose
from .errors import NoFerroReduction, NotFerromagnetic, TooLarge
from .model import FourVertexInstance
from .parity import build_system, solve

DEFAULT_EDGE_CAP = 24


def log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


@dataclass(frozen=True)
class FerroEdge:
    u: int
    v: int
    beta: Fraction

    @property
    def x(self) -> Fraction:
        return (self.beta - 1) / (self.beta + 1)


@dataclass(frozen=True)
class FerroIsingInstance:
    """Weighted circuit graph with every coupling ``beta_e > 1``.

    ``prefactor`` collects ``c**n``, ``beta**sum(D)`` and the constant
    single-circuit vertices; the ``2**m prod (beta_e+1)/2`` normalizer is kept
    separately (:attr:`normalizer`) so both the Ising and even-subgraph forms
    can be evaluated.
    """

    m: int
    edges: tuple[FerroEdge, ...]
    prefactor: Fraction = Fraction(1)
    dropped: int = 0
    flips: tuple[int, ...] = field(default=())

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if e.u == e.v:
                raise ValueError("self-loops are not allowed in a ferro instance")
            if not (0 <= e.u < self.m and 0 <= e.v < self.m):
                raise ValueError(f"edge ({e.u}, {e.v}) out of range")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            if e.beta <= 1:
                raise NotFerromagnetic(f"edge {key} has beta_e = {e.beta} <= 1")

    @classmethod
    def from_couplings(cls, m: int, couplings: Iterable[tuple[int, int, object]], prefactor=1) -> "FerroIsingInstance":
        """Build from ``(u, v, beta_e)``; couplings equal to 1 are dropped."""
        edges, dropped = [], 0
        for u, v, b in couplings:
            b = Fraction(b)
            if b == 1:
                dropped += 1
                continue
            edges.append(FerroEdge(u, v, b))
        return cls(m, tuple(edges), Fraction(prefactor), dropped)

    @classmethod
    def from_x(cls, m: int, weights: Iterable[tuple[int, int, object]]) -> "FerroIsingInstance":
        """Build from ``(u, v, x_e)`` with ``0 <= x_e < 1``."""
        return cls.from_couplings(m, ((u, v, (1 + Fraction(x)) / (1 - Fraction(x))) for u, v, x in weights))

    def scaled(self, t) -> "FerroIsingInstance":
        """Same graph with every ``x_e`` replaced by ``t * x_e`` (``0 < t <= 1``)."""
        t = Fraction(t)
        edges = tuple(FerroEdge(e.u, e.v, (1 + t * e.x) / (1 - t * e.x)) for e in self.edges)
        return FerroIsingInstance(self.m, edges, self.prefactor, self.dropped, self.flips)

    @property
    def x(self) -> tuple[Fraction, ...]:
        return tuple(e.x for e in self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.m
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return tuple(deg)

    @property
    def normalizer(self) -> Fraction:
        out = Fraction(2) ** self.m
        for e in self.edges:
            out *= (e.beta + 1) / 2
        return out

    @property
    def log_prefactor(self) -> float:
        return log_fraction(self.prefactor)

    @property
    def log_normalizer(self) -> float:
        return self.m * math.log(2) + sum(log_fraction((e.beta + 1) / 2) for e in self.edges)

    def components(self) -> list[list[int]]:
        """Vertex sets of connected components that contain at least one edge."""
        parent = list(range(self.m))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self.edges:
            parent[find(e.u)] = find(e.v)
        groups: dict[int, list[int]] = {}
        for v in range(self.m):
            if self.degrees[v]:
                groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def report(self) -> dict:
        return {
            "m": self.m,
            "edges": [
                {"u": e.u, "v": e.v, "beta_e": str(e.beta), "x_e": str(e.x), "x_e_float": float(e.x)}
                for e in self.edges
            ],
            "dropped_edges": self.dropped,
            "flips": list(self.flips),
            "prefactor": str(self.prefactor),
            "log_prefactor": self.log_prefactor,
            "log_normalizer": self.log_normalizer,
        }


def reduce(
    instance: FourVertexInstance,
    decomposition: CircuitDecomposition,
    fixed_graph: CircuitGraph,
    flips: Sequence[int] = (),
) -> FerroIsingInstance:
    """Turn a flip-corrected circuit graph into a ferromagnetic Ising instance."""
    beta = instance.beta
    if fixed_graph.m != decomposition.m:
        raise ValueError("circuit graph and decomposition disagree on m")
    couplings = []
    sum_d = 0
    for (i, j), (a, d) in fixed_graph.pairs.items():
        if (beta > 1 and a < d) or (beta < 1 and a > d):
            raise NotFerromagnetic(f"pair ({i}, {j}) has A={a}, D={d} at beta={beta}")
        sum_d += d
        couplings.append((i, j, beta ** (a - d)))
    prefactor = instance.c_factor * beta ** (sum_d + fixed_graph.const_beta_exponent)
    ferro = FerroIsingInstance.from_couplings(fixed_graph.m, couplings, prefactor)
    return FerroIsingInstance(ferro.m, ferro.edges, ferro.prefactor, ferro.dropped, tuple(flips))


@dataclass(frozen=True)
class Reduction:
    decomposition: CircuitDecomposition
    graph: CircuitGraph
    flips: tuple[int, ...]
    ferro: FerroIsingInstance


def reduce_instance(instance: FourVertexInstance) -> Reduction:
    """decompose -> classify -> solve the flip system -> reduce."""
    dec = decompose(instance)
    graph = classify(instance, dec)
    result = solve(build_system(graph, instance.beta))
    if not result.feasible:
        raise NoFerroReduction(
            f"flip system infeasible; odd cycle over circuit pairs {[c[:2] for c in result.witness]}"
        )
    flips = tuple(result.values)
    fixed = apply_flips(graph, flips)
    return Reduction(dec, graph, flips, reduce(instance, dec, fixed, flips))


# -- exact evaluation --------------------------------------------------------


def cycle_basis_masks(m: int, ends: Sequence[tuple[int, int]]) -> list[int]:
    """Fundamental cycles of a spanning forest, as edge bitmasks."""
    adj: dict[int, list[tuple[int, int]]] = {}
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    non_tree = []
    for k, (u, v) in enumerate(ends):
        ru, rv = find(u), find(v)
        if ru == rv:
            non_tree.append(k)
        else:
            parent[ru] = rv
            adj.setdefault(u, []).append((v, k))
            adj.setdefault(v, []).append((u, k))

    def path_mask(src, dst):
        prev = {src: (None, 0)}
        stack = [src]
        while stack:
            a = stack.pop()
            if a == dst:
                break
            for b, k in adj.get(a, ()):
                if b not in prev:
                    prev[b] = (a, k)
                    stack.append(b)
        mask, a = 0, dst
        while prev[a][0] is not None:
            a, k = prev[a]
            mask |= 1 << k
        return mask

    return [path_mask(*ends[k]) | (1 << k) for k in non_tree]


def even_subgraph_masks(ferro: FerroIsingInstance, max_edges: int = DEFAULT_EDGE_CAP) -> list[int]:
    if len(ferro.edges) > max_edges:
        raise TooLarge(f"{len(ferro.edges)} edges exceed the cap of {max_edges}")
    basis = cycle_basis_masks(ferro.m, [(e.u, e.v) for e in ferro.edges])
    out = [0]
    for b in basis:
        out += [s ^ b for s in out]
    return out


def mask_weight(mask: int, x: Sequence[Fraction]) -> Fraction:
    w = Fraction(1)
    k = 0
    while mask:
        if mask & 1:
            w *= x[k]
        mask >>= 1
        k += 1
    return w


def exact_even_sum(ferro: FerroIsingInstance, max_edges: int = DEFAULT_EDGE_CAP) -> Fraction:
    """Sum over even subgraphs of the product of ``x_e``."""
    x = ferro.x
    return sum((mask_weight(s, x) for s in even_subgraph_masks(ferro, max_edges)), Fraction(0))


def exact_partition_from_even(ferro: FerroIsingInstance, max_edges: int = DEFAULT_EDGE_CAP) -> Fraction:
    return ferro.prefactor * ferro.normalizer * exact_even_sum(ferro, max_edges)


def ising_partition(ferro: FerroIsingInstance, max_vertices: int = 22) -> Fraction:
    """Direct spin sum of the Ising form (isolated vertices contribute 2 each)."""
    active = [v for v in range(ferro.m) if ferro.degrees[v]]
    if len(active) > max_vertices:
        raise TooLarge(f"{len(active)} spins exceed the cap of {max_vertices}")
    z = sum((w for _, w in _gibbs_weights(ferro, active)), Fraction(0))
    return ferro.prefactor * 2 ** (ferro.m - len(active)) * z


def _gibbs_weights(ferro: FerroIsingInstance, vertices: Sequence[int]):
    pos = {v: k for k, v in enumerate(vertices)}
    local = [(pos[e.u], pos[e.v], e.beta) for e in ferro.edges if e.u in pos]
    for spins in itertools.product((0, 1), repeat=len(vertices)):
        w = Fraction(1)
        for a, b, beta in local:
            if spins[a] == spins[b]:
                w *= beta
        yield spins, w


def gibbs_spin_distribution(ferro: FerroIsingInstance, vertices: Sequence[int]) -> dict[tuple[int, ...], Fraction]:
    """Exact Gibbs law of the spins on ``vertices`` (a union of components)."""
    weights = dict(_gibbs_weights(ferro, vertices))
    z = sum(weights.values())
    return {s: w / z for s, w in weights.items()}


# -- even subgraph -> spins --------------------------------------------------


def _components(m: int, ends: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in ends:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return [find(v) for v in range(m)]


def spins_from_even(ferro: FerroIsingInstance, sample: Iterable[int], rng) -> tuple[int, ...]:
    """Spins from an even subgraph (a set of edge indices).

    Each edge outside the sample joins it independently with probability
    ``x_e``; every cluster of the union then receives one fair random spin.
    Draw order: one uniform per absent edge in edge order, then one bit per
    cluster ordered by smallest member.
    """
    chosen = set(sample)
    kept = []
    for k, e in enumerate(ferro.edges):
        if k in chosen:
            kept.append((e.u, e.v))
        elif rng.random() < float(e.x):
            kept.append((e.u, e.v))
    label = _components(ferro.m, kept)
    spin_of = {}
    for root in sorted(set(label)):
        spin_of[root] = int(rng.integers(0, 2))
    return tuple(spin_of[r] for r in label)


def spins_from_even_batch(ferro: FerroIsingInstance, samples: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Vectorized :func:`spins_from_even` for a ``(B, |E|)`` boolean array of samples."""
    samples = np.asarray(samples, dtype=bool)
    batch = samples.shape[0]
    m = ferro.m
    if not ferro.edges:
        return rng.integers(0, 2, size=(batch, m), dtype=np.int8)
    x = np.array([float(e.x) for e in ferro.edges])
    us = np.array([e.u for e in ferro.edges])
    vs = np.array([e.v for e in ferro.edges])
    present = samples | (rng.random(samples.shape) < x)
    label = np.tile(np.arange(m), (batch, 1))
    rows = np.arange(batch)
    while True:  # min-label propagation over present edges
        changed = False
        for k in range(len(us)):
            p = present[:, k]
            lu, lv = label[:, us[k]], label[:, vs[k]]
            lo = np.minimum(lu, lv)
            upd = p & (lu != lv)
            if upd.any():
                changed = True
                label[upd, us[k]] = lo[upd]
                label[upd, vs[k]] = lo[upd]
        if not changed:
            break
    bits = rng.integers(0, 2, size=(batch, m), dtype=np.int8)
    return bits[rows[:, None], label]


def coupling_distribution(ferro: FerroIsingInstance, vertices: Sequence[int]) -> dict[tuple[int, ...], Fraction]:
    """Exact law of the spins produced by :func:`spins_from_even` on ``vertices``.

    The even subgraph is drawn from its exact law; ``vertices`` must be a union
    of connected components so the edges among them are self-contained.
    """
    vset = set(vertices)
    pos = {v: k for k, v in enumerate(vertices)}
    local = [(pos[e.u], pos[e.v], e.x) for e in ferro.edges if e.u in vset]
    sub = FerroIsingInstance.from_x(len(vertices), ((a, b, x) for a, b, x in local))
    xs = [x for _, _, x in local]
    ends = [(a, b) for a, b, _ in local]
    evens = even_subgraph_masks(sub, max_edges=64)
    z0 = sum(mask_weight(s, xs) for s in evens)
    dist: dict[tuple[int, ...], Fraction] = {}
    for s in evens:
        p_s = mask_weight(s, xs) / z0
        free = [k for k in range(len(xs)) if not (s >> k) & 1]
        for added in itertools.product((0, 1), repeat=len(free)):
            p = p_s
            present = [ends[k] for k in range(len(xs)) if (s >> k) & 1]
            for k, bit in zip(free, added):
                p *= xs[k] if bit else 1 - xs[k]
                if bit:
                    present.append(ends[k])
            if not p:
                continue
            label = _components(len(vertices), present)
            roots = sorted(set(label))
            share = p / 2 ** len(roots)
            for bits in itertools.product((0, 1), repeat=len(roots)):
                spin_of = dict(zip(roots, bits))
                key = tuple(spin_of[r] for r in label)
                dist[key] = dist.get(key, Fraction(0)) + share
    return dist
