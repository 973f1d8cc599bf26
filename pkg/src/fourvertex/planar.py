"""Plane 4-regular instances: faces, face 2-coloring, canonical labels and the black-face graph.

Faces are traced with ``phi(d) = succ(partner(d))``: cross the edge, then
turn to the next dart counterclockwise.  With that convention the corner
between ``d`` and ``succ(d)`` at a vertex lies on the face containing
``succ(d)``.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BetaAtMostOne,
    InternalError,
    MissingOuterFace,
    NoEdges,
    NotFerromagnetic,
    NotPlanarEmbedding,
    RotationIncomplete,
    TooLarge,
)
from .model import Dart, FourVertexInstance

WHITE, BLACK = 0, 1
COLOR_NAMES = ("white", "black")


def _require_rotation(instance: FourVertexInstance) -> tuple[tuple[int, ...], ...]:
    if instance.rotation is None:
        raise RotationIncomplete("the instance has no rotation system")
    return instance.rotation


def successor_table(instance: FourVertexInstance) -> tuple[int, ...]:
    """``succ[d]``: the next dart counterclockwise around ``d``'s vertex."""
    rot = _require_rotation(instance)
    succ = [0] * instance.num_darts
    for v, order in enumerate(rot):
        for k in range(4):
            succ[4 * v + order[k] - 1] = 4 * v + order[(k + 1) % 4] - 1
    return tuple(succ)


def face_cycles(instance: FourVertexInstance) -> list[tuple[int, ...]]:
    """Dart cycles of the faces, each started at its smallest dart, ordered by that dart."""
    succ = successor_table(instance)
    partner = instance.partner
    seen = [False] * instance.num_darts
    faces = []
    for start in range(instance.num_darts):
        if seen[start]:
            continue
        face = []
        d = start
        while not seen[d]:
            seen[d] = True
            face.append(d)
            d = succ[partner[d]]
        faces.append(tuple(face))
    return faces


@dataclass(frozen=True)
class FaceSet:
    faces: tuple[tuple[int, ...], ...]
    outer: int
    face_of: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.faces)

    def labels(self) -> list[list[str]]:
        return [[str(Dart.from_index(d)) for d in f] for f in self.faces]


def trace_faces(instance: FourVertexInstance) -> FaceSet:
    faces = face_cycles(instance)
    if not instance.is_connected():
        raise NotPlanarEmbedding("face tracing needs a connected instance")
    euler = instance.n - len(instance.edges) + len(faces)
    if euler != 2:
        raise NotPlanarEmbedding(f"Euler characteristic {euler} != 2: the rotation system is not planar")
    if instance.outer is None:
        raise MissingOuterFace("name a dart on the outer face with an 'outer' line")
    face_of = [0] * instance.num_darts
    for i, f in enumerate(faces):
        for d in f:
            face_of[d] = i
    return FaceSet(tuple(faces), face_of[instance.outer.index], tuple(face_of))


@dataclass(frozen=True)
class FaceColoring:
    faces: FaceSet
    colors: tuple[int, ...]

    def swapped(self) -> "FaceColoring":
        """The other proper coloring (outer face black)."""
        return FaceColoring(self.faces, tuple(1 - c for c in self.colors))

    @property
    def black_faces(self) -> list[int]:
        return [i for i, c in enumerate(self.colors) if c == BLACK]

    def names(self) -> list[str]:
        return [COLOR_NAMES[c] for c in self.colors]


def face_adjacency(instance: FourVertexInstance, faces: FaceSet) -> list[set[int]]:
    """Faces on the two sides of every edge."""
    adj: list[set[int]] = [set() for _ in faces.faces]
    for d1, d2 in instance.edges:
        f, g = faces.face_of[d1.index], faces.face_of[d2.index]
        adj[f].add(g)
        adj[g].add(f)
    return adj


def two_color_faces(instance: FourVertexInstance, faces: FaceSet | None = None) -> FaceColoring:
    """Proper 2-coloring of the faces by BFS from the outer face, which is white."""
    faces = faces or trace_faces(instance)
    adj = face_adjacency(instance, faces)
    color = [-1] * len(faces)
    color[faces.outer] = WHITE
    queue = deque([faces.outer])
    while queue:
        f = queue.popleft()
        for g in sorted(adj[f]):
            if color[g] == -1:
                color[g] = 1 - color[f]
                queue.append(g)
            elif color[g] == color[f]:
                raise InternalError(f"faces {f} and {g} share an edge and a color: the dual is not bipartite")
    if -1 in color:
        raise InternalError("face-adjacency graph is disconnected")
    return FaceColoring(faces, tuple(color))


def _black_corner_starts(instance: FourVertexInstance, coloring: FaceColoring, v: int) -> list[int]:
    """Positions ``k`` in ``v``'s rotation where the corner ``(d_k, d_{k+1})`` is black."""
    order = instance.rotation[v]
    out = []
    for k in range(4):
        nxt = 4 * v + order[(k + 1) % 4] - 1
        if coloring.colors[coloring.faces.face_of[nxt]] == BLACK:
            out.append(k)
    if len(out) != 2 or (out[1] - out[0]) != 2:
        raise InternalError(f"vertex {v} does not alternate black and white corners")
    return out


def canonical_label(instance: FourVertexInstance, coloring: FaceColoring | None = None) -> FourVertexInstance:
    """Relabel slots so both slot pairs (1,4) and (2,3) bracket a black corner.

    In rotation order ``d1, d2, d3, d4`` with black corners ``(d1, d2)`` and
    ``(d3, d4)`` the new slots are ``d1 -> 1, d2 -> 4, d3 -> 2, d4 -> 3``.  Of
    the two admissible choices of ``d1`` the one with the smaller current slot
    is taken, so relabeling a canonical instance changes nothing.
    """
    coloring = coloring or two_color_faces(instance)
    rot = _require_rotation(instance)
    new_slot: dict[Dart, int] = {}
    new_rot = []
    for v in range(instance.n):
        order = rot[v]
        k = min(_black_corner_starts(instance, coloring, v), key=lambda k: order[k])
        ds = [order[(k + i) % 4] for i in range(4)]
        for old, new in zip(ds, (1, 4, 2, 3)):
            new_slot[Dart(v, old)] = new
        new_rot.append((1, 4, 2, 3))

    def fix(d: Dart) -> Dart:
        return Dart(d.vertex, new_slot[d])

    edges = tuple((fix(d1), fix(d2)) for d1, d2 in instance.edges)
    outer = fix(instance.outer) if instance.outer is not None else None
    return FourVertexInstance(instance.n, edges, instance.beta, instance.a, instance.c, tuple(new_rot), outer)


def is_canonical(instance: FourVertexInstance, coloring: FaceColoring | None = None) -> bool:
    return canonical_label(instance, coloring).edges == instance.edges


@dataclass(frozen=True)
class BlackFaceGraph:
    """One vertex per black face, one edge per vertex of G.

    ``multiplicity[(i, j)]`` counts parallel edges between black faces ``i < j``
    (indices into :attr:`faces`); vertices whose two black corners lie on the
    same face are counted in ``self_loops``.  ``k <= n`` unless H is a tree.
    """

    faces: tuple[int, ...]
    multiplicity: dict[tuple[int, int], int]
    self_loops: int
    n: int

    @property
    def k(self) -> int:
        return len(self.faces)

    @property
    def num_edges(self) -> int:
        return sum(self.multiplicity.values())

    def is_tree(self) -> bool:
        return self.self_loops == 0 and self.num_edges == self.k - 1

    def collapsed(self, beta) -> dict[tuple[int, int], Fraction]:
        beta = Fraction(beta)
        return {p: beta**mult for p, mult in self.multiplicity.items()}

    def report(self, beta) -> dict:
        return {
            "k": self.k,
            "black_faces": list(self.faces),
            "edges": [
                {"i": i, "j": j, "multiplicity": mult, "beta_e": str(b)}
                for ((i, j), mult), b in zip(self.multiplicity.items(), self.collapsed(beta).values())
            ],
            "self_loops": self.self_loops,
            "n": self.n,
        }


def build_black_face_graph(instance: FourVertexInstance, coloring: FaceColoring | None = None) -> BlackFaceGraph:
    coloring = coloring or two_color_faces(instance)
    black = coloring.black_faces
    index = {f: i for i, f in enumerate(black)}
    mult: Counter = Counter()
    loops = 0
    for v in range(instance.n):
        order = instance.rotation[v]
        ends = []
        for k in _black_corner_starts(instance, coloring, v):
            nxt = 4 * v + order[(k + 1) % 4] - 1
            ends.append(index[coloring.faces.face_of[nxt]])
        i, j = sorted(ends)
        if i == j:
            loops += 1
        else:
            mult[(i, j)] += 1
    graph = BlackFaceGraph(tuple(black), dict(sorted(mult.items())), loops, instance.n)
    # H is connected with n edges, so k <= n + 1 (equality exactly when H is a tree)
    if graph.num_edges + graph.self_loops != instance.n or graph.k > instance.n + 1:
        raise InternalError("black-face graph counts are inconsistent")
    return graph


def configuration_from_face_spins(
    instance: FourVertexInstance, graph: BlackFaceGraph, coloring: FaceColoring, spins
) -> tuple[int, ...]:
    """Dart values orienting every black face boundary by its spin.

    A traced face lies to the right of each of its darts read outward, so
    spin 0 (face on the left of the arrows) points every boundary edge into
    the vertex of the face's dart: that dart gets 0, its partner 1.  Spin 1
    reverses the boundary.  Every edge borders exactly one black face.
    """
    config = [-1] * instance.num_darts
    partner = instance.partner
    for spin, f in zip(spins, graph.faces):
        for d in coloring.faces.faces[f]:
            config[d] = spin
            config[partner[d]] = 1 - spin
    if -1 in config:
        raise InternalError("some edge borders no black face")
    return tuple(config)


def black_face_ising(graph: BlackFaceGraph, beta) -> tuple[Fraction, dict[tuple[int, int], Fraction]]:
    """``(prefactor, couplings)``: Z is ``prefactor * sum_sigma prod beta_e ** [sigma_i == sigma_j]``."""
    beta = Fraction(beta)
    return beta**graph.self_loops, graph.collapsed(beta)


def eq5_sum(k: int, couplings: dict[tuple[int, int], Fraction], max_spins: int = 20) -> Fraction:
    if k > max_spins:
        raise TooLarge(f"{k} black faces exceed the cap of {max_spins}")
    total = Fraction(0)
    for spins in itertools.product((0, 1), repeat=k):
        w = Fraction(1)
        for (i, j), b in couplings.items():
            if spins[i] == spins[j]:
                w *= b
        total += w
    return total


@dataclass(frozen=True)
class PlanarPartition:
    """Partition function of the canonically labeled instance."""

    log_value: float
    value: Fraction | None
    exact: bool
    graph: BlackFaceGraph
    estimate: object = None

    def report(self) -> dict:
        out = {"exact": self.exact, "log_value": self.log_value, "k": self.graph.k, "self_loops": self.graph.self_loops}
        if self.value is not None:
            out["Z"] = str(self.value)
        if self.estimate is not None:
            out["estimate"] = self.estimate.report()
        return out


def planar_partition(
    instance: FourVertexInstance,
    coloring: FaceColoring | None = None,
    *,
    max_spins: int = 20,
    method: str = "auto",
    eps: float = 0.1,
    delta: float = 0.25,
    seed=None,
    steps="auto",
) -> PlanarPartition:
    """Z of the canonical labeling of ``instance`` from the black-face graph.

    ``method`` is ``"exact"`` (the spin sum over black faces), ``"estimate"``
    (worm estimator on the black-face graph, needs ``beta > 1``) or ``"auto"``
    (exact when ``k <= max_spins``).
    """
    coloring = coloring or two_color_faces(instance)
    graph = build_black_face_graph(instance, coloring)
    scale = instance.c_factor
    prefactor, couplings = black_face_ising(graph, instance.beta)
    if method == "auto":
        method = "exact" if graph.k <= max_spins else "estimate"
    if method == "exact":
        z = scale * prefactor * eq5_sum(graph.k, couplings, max_spins)
        return PlanarPartition(_log(z), z, True, graph)
    if method != "estimate":
        raise ValueError(f"unknown method {method!r}")
    from .estimator import DEFAULT_SEED, estimate_Z0
    from .even import FerroIsingInstance

    if any(b < 1 for b in couplings.values()):
        raise NotFerromagnetic("the estimator path needs beta >= 1")
    ferro = FerroIsingInstance.from_couplings(graph.k, ((i, j, b) for (i, j), b in couplings.items()), scale * prefactor)
    est = estimate_Z0(ferro, eps, delta, DEFAULT_SEED if seed is None else seed, steps=steps)
    log_z = ferro.log_prefactor + ferro.log_normalizer + est.log_value
    return PlanarPartition(log_z, None, False, graph, est)


def _log(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def planar_mixing_bound(instance: FourVertexInstance, epsilon: float, coloring: FaceColoring | None = None) -> float:
    """Planar mixing-time bound with ``n`` the vertex count and ``beta_min`` over collapsed edges."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    graph = build_black_face_graph(instance, coloring)
    couplings = graph.collapsed(instance.beta)
    if not couplings:
        raise NoEdges("the black-face graph has no edges")
    beta_min = min(couplings.values())
    if beta_min <= 1:
        raise BetaAtMostOne(f"beta_min = {beta_min} must exceed 1")
    n = instance.n
    b = float(beta_min)
    return 4 * n**7 * (math.log(2 / epsilon) / n + math.log((b + 1) / (2 * (b - 1))))
