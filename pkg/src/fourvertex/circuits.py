"""Circuit decomposition, agree/disagree classification and the circuit graph.

The local weight forces ``x4 = not x1`` and ``x3 = not x2`` at every vertex,
and each edge forces its two dart values apart.  Following darts alternately
through a vertex (slot pairs 1-4 and 2-3) and across an edge therefore traces
closed trails whose dart values alternate; one bit per trail fixes them all.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import MismatchedDecomposition, TooLarge
from .model import Dart, FourVertexInstance, config_weight


def mate(d: int) -> int:
    """The dart paired with ``d`` at its own vertex (slots 1<->4, 2<->3)."""
    return d - d % 4 + 3 - d % 4


@dataclass(frozen=True)
class Circuit:
    id: int
    darts: tuple[int, ...]

    @property
    def initial_dart(self) -> int:
        return self.darts[0]

    @property
    def parity(self) -> dict[int, int]:
        return {d: pos % 2 for pos, d in enumerate(self.darts)}

    def dart_labels(self) -> list[str]:
        return [str(Dart.from_index(d)) for d in self.darts]


@dataclass(frozen=True)
class CircuitDecomposition:
    circuits: tuple[Circuit, ...]
    owner: tuple[int, ...]
    parity: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.circuits)

    @property
    def num_darts(self) -> int:
        return len(self.owner)

    def rerooted(self, circuit_id: int, offset: int) -> "CircuitDecomposition":
        """Move the initial dart of one circuit ``offset`` positions along its trail."""
        c = self.circuits[circuit_id]
        k = offset % len(c.darts)
        darts = c.darts[k:] + c.darts[:k]
        circuits = list(self.circuits)
        circuits[circuit_id] = Circuit(circuit_id, darts)
        parity = list(self.parity)
        for pos, d in enumerate(darts):
            parity[d] = pos % 2
        return CircuitDecomposition(tuple(circuits), self.owner, tuple(parity))

    def config_from_assignment(self, sigma: Sequence[int]) -> tuple[int, ...]:
        """Dart values when circuit ``i`` carries value ``sigma[i]`` at its initial dart."""
        return tuple(sigma[o] ^ p for o, p in zip(self.owner, self.parity))

    def assignment_from_config(self, config: Sequence[int]) -> tuple[int, ...]:
        return tuple(config[c.initial_dart] for c in self.circuits)


def decompose(instance: FourVertexInstance) -> CircuitDecomposition:
    """Trace the circuits, always starting from the smallest unused dart."""
    n_darts = instance.num_darts
    partner = instance.partner
    owner = [-1] * n_darts
    parity = [0] * n_darts
    circuits = []
    for start in range(n_darts):
        if owner[start] != -1:
            continue
        cid = len(circuits)
        trail = []
        d = start
        while True:
            for x in (d, mate(d)):
                parity[x] = len(trail) % 2
                owner[x] = cid
                trail.append(x)
            d = partner[trail[-1]]
            if d == start:
                break
        circuits.append(Circuit(cid, tuple(trail)))
    return CircuitDecomposition(tuple(circuits), tuple(owner), tuple(parity))


def _check_matches(instance: FourVertexInstance, dec: CircuitDecomposition) -> None:
    if dec.num_darts != instance.num_darts:
        raise MismatchedDecomposition("decomposition covers a different number of darts")
    seen = set()
    for c in dec.circuits:
        t = c.darts
        if len(t) % 2:
            raise MismatchedDecomposition(f"circuit {c.id} has odd length")
        for pos, d in enumerate(t):
            nxt = t[(pos + 1) % len(t)]
            if dec.owner[d] != c.id or dec.parity[d] != pos % 2:
                raise MismatchedDecomposition(f"owner/parity tables disagree with circuit {c.id}")
            hop_ok = nxt == mate(d) or nxt == instance.partner[d]
            if not hop_ok:
                raise MismatchedDecomposition(f"circuit {c.id} is not a trail of this instance")
        seen.update(t)
    if len(seen) != instance.num_darts:
        raise MismatchedDecomposition("circuits do not partition the darts")


@dataclass(frozen=True)
class CircuitGraph:
    """Circuit-pair interactions.

    ``pairs[(i, j)] = (A, D)`` for ``i < j``.  Vertices whose two slot pairs
    lie on the same circuit have a constant weight: ``beta`` for
    ``const_beta_exponent`` of them, 1 for ``const_one_count``.
    """

    m: int
    pairs: Mapping[tuple[int, int], tuple[int, int]]
    const_beta_exponent: int = 0
    const_one_count: int = 0

    def counts(self, i: int, j: int) -> tuple[int, int]:
        return self.pairs.get((min(i, j), max(i, j)), (0, 0))

    @property
    def num_vertices_accounted(self) -> int:
        return sum(a + d for a, d in self.pairs.values()) + self.const_beta_exponent + self.const_one_count

    def weight(self, sigma: Sequence[int], beta: Fraction) -> Fraction:
        """Spin-system weight of a circuit assignment (normalized, no ``c**n``)."""
        w = beta**self.const_beta_exponent
        for (i, j), (a, d) in self.pairs.items():
            w *= beta ** (a if sigma[i] == sigma[j] else d)
        return w


def classify(instance: FourVertexInstance, decomposition: CircuitDecomposition) -> CircuitGraph:
    _check_matches(instance, decomposition)
    owner, parity = decomposition.owner, decomposition.parity
    pairs: dict[tuple[int, int], list[int]] = {}
    const_beta = const_one = 0
    for v in range(instance.n):
        d1, d2 = 4 * v, 4 * v + 1  # darts x1 and x2
        i, j = owner[d1], owner[d2]
        agree = parity[d1] == parity[d2]
        if i == j:
            if agree:
                const_beta += 1
            else:
                const_one += 1
            continue
        ad = pairs.setdefault((min(i, j), max(i, j)), [0, 0])
        ad[0 if agree else 1] += 1
    return CircuitGraph(
        decomposition.m,
        {k: (a, d) for k, (a, d) in sorted(pairs.items())},
        const_beta,
        const_one,
    )


def apply_flips(graph: CircuitGraph, flips: Sequence[int]) -> CircuitGraph:
    """Swap A and D on every pair whose endpoints flip differently."""
    if len(flips) != graph.m:
        raise ValueError(f"need {graph.m} flip bits, got {len(flips)}")
    pairs = {
        (i, j): ((d, a) if flips[i] ^ flips[j] else (a, d)) for (i, j), (a, d) in graph.pairs.items()
    }
    return CircuitGraph(graph.m, pairs, graph.const_beta_exponent, graph.const_one_count)


def circuit_partition(
    instance: FourVertexInstance, decomposition: CircuitDecomposition | None = None, max_circuits: int = 20
) -> Fraction:
    """Partition function as a sum over the ``2**m`` circuit assignments.

    Each assignment is expanded to dart values and scored with
    :func:`config_weight`, so this route shares nothing with the classifier.
    """
    dec = decomposition or decompose(instance)
    if dec.m > max_circuits:
        raise TooLarge(f"{dec.m} circuits exceed the cap of {max_circuits}")
    return sum(
        (config_weight(instance, dec.config_from_assignment(s)) for s in itertools.product((0, 1), repeat=dec.m)),
        Fraction(0),
    )


def decomposition_report(instance: FourVertexInstance, dec: CircuitDecomposition, graph: CircuitGraph) -> dict:
    return {
        "m": dec.m,
        "circuits": [
            {"id": c.id, "darts": c.dart_labels(), "initial_dart": str(Dart.from_index(c.initial_dart))}
            for c in dec.circuits
        ],
        "pairs": [{"i": i, "j": j, "A": a, "D": d} for (i, j), (a, d) in graph.pairs.items()],
        "const_beta_exponent": graph.const_beta_exponent,
        "const_one_count": graph.const_one_count,
    }
