"""GF(2) systems choosing which circuits re-root so every interaction is ferromagnetic.

Each equation ``X_i xor X_j = b`` involves two variables, so the system is a
signed graph and union-find with parity decides it in near-linear time.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .circuits import CircuitGraph


@dataclass(frozen=True)
class ParitySystem:
    num_vars: int
    constraints: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class ParityAssignment:
    values: tuple[int, ...]
    feasible = True

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]


@dataclass(frozen=True)
class Infeasible:
    """No solution; ``witness`` lists constraints forming a cycle with odd right-hand side."""

    witness: tuple[tuple[int, int, int], ...]
    feasible = False


def build_system(graph: CircuitGraph, beta) -> ParitySystem:
    beta = Fraction(beta)
    if beta == 1:
        return ParitySystem(graph.m, ())
    if beta > 1:
        cons = tuple((i, j, int(a < d)) for (i, j), (a, d) in graph.pairs.items())
    else:
        cons = tuple((i, j, int(a > d)) for (i, j), (a, d) in graph.pairs.items())
    return ParitySystem(graph.m, cons)


def satisfies(system: ParitySystem, values) -> bool:
    return all(values[i] ^ values[j] == b for i, j, b in system.constraints)


def _tree_path(adj: dict[int, list[tuple[int, tuple[int, int, int]]]], src: int, dst: int):
    prev: dict[int, tuple[int, tuple[int, int, int]] | None] = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            break
        for w, con in adj.get(v, ()):
            if w not in prev:
                prev[w] = (v, con)
                queue.append(w)
    path = []
    v = dst
    while prev[v] is not None:
        u, con = prev[v]
        path.append(con)
        v = u
    return path[::-1]


def solve(system: ParitySystem) -> ParityAssignment | Infeasible:
    """Canonical solution: in every component the smallest variable is 0."""
    n = system.num_vars
    parent = list(range(n))
    rel = [0] * n  # parity of a variable relative to its parent

    def find(x: int) -> tuple[int, int]:
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        root, acc = x, 0
        for y in reversed(path):  # compress, accumulating parity from the root down
            acc ^= rel[y]
            rel[y] = acc
            parent[y] = root
        return root, (rel[path[0]] if path else 0)

    forest: dict[int, list[tuple[int, tuple[int, int, int]]]] = {}
    for con in system.constraints:
        i, j, b = con
        if i == j:
            if b:
                return Infeasible((con,))
            continue
        (ri, pi), (rj, pj) = find(i), find(j)
        if ri == rj:
            if pi ^ pj != b:
                return Infeasible(tuple(_tree_path(forest, i, j)) + (con,))
            continue
        parent[ri] = rj
        rel[ri] = pi ^ pj ^ b
        forest.setdefault(i, []).append((j, con))
        forest.setdefault(j, []).append((i, con))

    found = [find(x) for x in range(n)]
    anchor: dict[int, int] = {}
    for x, (r, p) in enumerate(found):
        anchor.setdefault(r, p)  # x increases, so the first hit is the smallest member
    return ParityAssignment(tuple(p ^ anchor[r] for r, p in found))


def solve_report(system: ParitySystem, result: ParityAssignment | Infeasible) -> dict:
    out: dict = {"feasible": result.feasible, "num_vars": system.num_vars,
                 "constraints": [list(c) for c in system.constraints]}
    if result.feasible:
        out["assignment"] = list(result.values)
    else:
        out["odd_cycle"] = [{"i": i, "j": j, "b": b} for i, j, b in result.witness]
    return out
