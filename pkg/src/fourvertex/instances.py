"""Named instances and random generators."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .model import Dart, FourVertexInstance


def theta4(beta=2, *, a=None, c=None) -> FourVertexInstance:
    """Two vertices joined by four parallel edges, slot ``i`` to slot ``i``.

    The embedding puts the edges around ``u`` in slot order; the outer face is
    the one between edges 4 and 1.
    """
    params = dict(a=a, c=c) if a is not None else dict(beta=beta)
    return FourVertexInstance.build(
        2,
        [(0, i, 1, i) for i in range(1, 5)],
        rotation=[(1, 2, 3, 4), (1, 4, 3, 2)],
        outer=(0, 1),
        **params,
    )


def theta4_swapped_14(beta=2) -> FourVertexInstance:
    """Theta4 with slots 1 and 4 exchanged at ``v``: one agree and one disagree vertex."""
    return FourVertexInstance.build(2, [(0, 1, 1, 4), (0, 2, 1, 2), (0, 3, 1, 3), (0, 4, 1, 1)], beta=beta)


def doubled_cycle(k: int, beta=2) -> FourVertexInstance:
    """Cycle of length ``k`` with every edge doubled; slots 1,4 face left, 2,3 face right."""
    edges = []
    for i in range(k):
        j = (i + 1) % k
        edges += [(i, 2, j, 1), (i, 3, j, 4)]
    return FourVertexInstance.build(k, edges, beta=beta)


def double_loop(beta=2, *, planar_outer=None) -> FourVertexInstance:
    """One vertex with a loop on slots (1,2) and a loop on slots (3,4)."""
    return FourVertexInstance.build(
        1,
        [(0, 1, 0, 2), (0, 3, 0, 4)],
        beta=beta,
        rotation=[(1, 2, 3, 4)],
        outer=planar_outer,
    )


def swap_slots(instance: FourVertexInstance, vertex: int, s: int, t: int) -> FourVertexInstance:
    """Exchange the labels of slots ``s`` and ``t`` at one vertex."""

    def fix(d: Dart) -> Dart:
        if d.vertex != vertex:
            return d
        return Dart(vertex, {s: t, t: s}.get(d.slot, d.slot))

    edges = tuple((fix(d1), fix(d2)) for d1, d2 in instance.edges)
    rotation = None
    if instance.rotation is not None:
        rotation = list(instance.rotation)
        rotation[vertex] = tuple({s: t, t: s}.get(x, x) for x in rotation[vertex])
    outer = fix(instance.outer) if instance.outer is not None else None
    return FourVertexInstance(instance.n, edges, instance.beta, instance.a, instance.c, rotation, outer)


def odd_cycle_instance(beta=2) -> FourVertexInstance:
    """Doubled triangle relabeled so the flip system for ``beta > 1`` has an odd cycle.

    Each circuit pair meets at a single vertex; an odd number of those are
    disagree-vertices, so no choice of flips makes all three pairs agree.
    """
    from .circuits import classify, decompose

    inst = doubled_cycle(3, beta)
    graph = classify(inst, decompose(inst))
    n_disagree = sum(1 for a, d in graph.pairs.values() if d > a)
    if n_disagree % 2 == 0:
        inst = swap_slots(inst, 0, 1, 4)
    return inst


def from_plane_drawing(coords, pairs, beta=2) -> FourVertexInstance:
    """Embedded instance from a straight-line drawing.

    Slots are numbered in order of first appearance in ``pairs``; rotations
    follow the drawing's counterclockwise angular order; the outer face is
    the one below the lowest vertex.
    """
    n = len(coords)
    next_slot = [1] * n
    edges = []
    dart_dir: dict[Dart, float] = {}
    for u, v in pairs:
        du, dv = Dart(u, next_slot[u]), Dart(v, next_slot[v])
        next_slot[u] += 1
        next_slot[v] += 1
        edges.append((du.vertex, du.slot, dv.vertex, dv.slot))
        (xu, yu), (xv, yv) = coords[u], coords[v]
        dart_dir[du] = math.atan2(yv - yu, xv - xu)
        dart_dir[dv] = math.atan2(yu - yv, xu - xv)
    rotation = []
    for v in range(n):
        ds = sorted((d for d in dart_dir if d.vertex == v), key=lambda d: dart_dir[d])
        rotation.append(tuple(d.slot for d in ds))
    low = min(range(n), key=lambda v: (coords[v][1], coords[v][0]))
    ds = sorted((d for d in dart_dir if d.vertex == low), key=lambda d: dart_dir[d])
    after_down = [d for d in ds if dart_dir[d] > -math.pi / 2]
    outer = after_down[0] if after_down else ds[0]
    return FourVertexInstance.build(n, edges, beta=beta, rotation=rotation, outer=outer)


def octahedron(beta=2) -> FourVertexInstance:
    """The octahedron drawn as two nested triangles (the medial graph of a tetrahedron)."""
    r3 = math.sqrt(3) / 2
    coords = [(0, 1), (-r3, -0.5), (r3, -0.5), (0, -3), (3 * r3, 1.5), (-3 * r3, 1.5)]
    pairs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 4), (0, 5), (1, 3), (1, 5), (2, 3), (2, 4)]
    return from_plane_drawing(coords, pairs, beta)


# -- random generators -------------------------------------------------------


def random_four_regular(n: int, rng: np.random.Generator, beta=2, max_tries: int = 1000) -> FourVertexInstance:
    """Uniform random pairing of the ``4n`` darts, conditioned on connectivity."""
    for _ in range(max_tries):
        darts = rng.permutation(4 * n)
        edges = []
        for k in range(0, 4 * n, 2):
            d1, d2 = Dart.from_index(int(darts[k])), Dart.from_index(int(darts[k + 1]))
            edges.append((d1.vertex, d1.slot, d2.vertex, d2.slot))
        inst = FourVertexInstance.build(n, edges, beta=beta)
        if inst.is_connected():
            return inst
    raise RuntimeError("could not draw a connected instance")


def _random_plane_graph(num_edges: int, rng: np.random.Generator):
    """Random connected plane multigraph (loops allowed) as a rotation system.

    Darts ``2k`` and ``2k+1`` form edge ``k``; ``sigma`` is the
    counterclockwise successor and ``vert`` the vertex of each dart.
    """
    sigma: dict[int, int] = {}
    vert: dict[int, int] = {}
    if rng.random() < 0.5:
        sigma.update({0: 0, 1: 1})
        vert.update({0: 0, 1: 1})
        n_vertices = 2
    else:
        sigma.update({0: 1, 1: 0})
        vert.update({0: 0, 1: 0})
        n_vertices = 1

    def pred(d):
        return next(y for y in sigma if sigma[y] == d)

    def insert_before(d, new):
        p = pred(d)
        sigma[p] = new
        sigma[new] = d
        vert[new] = vert[d]

    for k in range(1, num_edges):
        h, h2 = 2 * k, 2 * k + 1
        if rng.random() < 0.35:  # pendant edge to a new vertex
            d = int(rng.choice(sorted(sigma)))
            insert_before(d, h)
            sigma[h2] = h2
            vert[h2] = n_vertices
            n_vertices += 1
            continue
        faces = _faces(sigma)
        face = faces[int(rng.integers(len(faces)))]
        d1 = face[int(rng.integers(len(face)))]
        d2 = face[int(rng.integers(len(face)))]
        insert_before(d1, h)
        insert_before(d2, h2)
    faces = _faces(sigma)
    assert n_vertices - num_edges + len(faces) == 2, "generator produced a non-planar rotation"
    return sigma, vert, n_vertices


def _faces(sigma: dict[int, int]) -> list[list[int]]:
    seen: set[int] = set()
    faces = []
    for d in sorted(sigma):
        if d in seen:
            continue
        face = []
        x = d
        while x not in seen:
            seen.add(x)
            face.append(x)
            x = sigma[x ^ 1]
        faces.append(face)
    return faces


def medial_instance(sigma: dict[int, int], beta=2, rng: np.random.Generator | None = None, outer_face: int | None = None):
    """Medial graph of a plane graph given by its rotation (see :func:`_random_plane_graph`).

    Medial vertex ``k`` sits on edge ``k``; its four darts in counterclockwise
    order point to the corners NE, NW, SW, SE as seen with dart ``2k`` pointing
    east.  Slot labels are random when ``rng`` is given.
    """
    n = len(sigma) // 2
    slot_at = []
    for _ in range(n):
        perm = rng.permutation(4) + 1 if rng is not None else np.arange(1, 5)
        slot_at.append([int(s) for s in perm])
    NE, NW, SW, SE = range(4)

    def nw_of(y):
        return (y // 2, NW if y % 2 == 0 else SE)

    def sw_of(y):
        return (y // 2, SW if y % 2 == 0 else NE)

    edges = []
    for y in sorted(sigma):
        (k1, p1), (k2, p2) = nw_of(y), sw_of(sigma[y])
        edges.append((k1, slot_at[k1][p1], k2, slot_at[k2][p2]))
    rotation = [tuple(slot_at[k]) for k in range(n)]
    inst = FourVertexInstance.build(n, edges, beta=beta, rotation=rotation)
    from .planar import face_cycles

    faces = face_cycles(inst)
    if outer_face is None:
        outer_face = int(rng.integers(len(faces))) if rng is not None else 0
    outer = Dart.from_index(faces[outer_face % len(faces)][0])
    return FourVertexInstance.build(n, edges, beta=beta, rotation=rotation, outer=outer)


def random_planar(n: int, rng: np.random.Generator, beta=2) -> FourVertexInstance:
    """Random embedded planar 4-regular multigraph on ``n`` vertices with random slot labels."""
    sigma, _, _ = _random_plane_graph(n, rng)
    return medial_instance(sigma, beta, rng)


def random_ferro(m: int, p_edge: float, rng: np.random.Generator, denominators=(2, 3, 4, 5)):
    """Small random ferromagnetic graph with rational ``x_e`` in (0, 1)."""
    from .even import FerroIsingInstance

    weights = []
    for u in range(m):
        for v in range(u + 1, m):
            if rng.random() < p_edge:
                q = int(rng.choice(denominators))
                weights.append((u, v, Fraction(int(rng.integers(1, q)), q)))
    return FerroIsingInstance.from_x(m, weights)
