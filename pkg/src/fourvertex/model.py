"""Four-vertex instances: representation, file format and the brute-force oracle.

A vertex of a 4-regular multigraph owns four *darts* (half-edges) labeled by
slots 1..4.  An edge joins two darts.  A configuration assigns a bit to every
dart; bit 1 at ``(v, s)`` means the arrow on that edge points away from ``v``.
An edge is consistently oriented exactly when its two dart bits differ.

Darts are addressed either as :class:`Dart` tuples or by their integer index
``4 * vertex + slot - 1``; configurations are tuples indexed the same way.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    BadParams,
    MalformedLine,
    NotFourRegular,
    RotationIncomplete,
    SlotReused,
    TooLarge,
)

DEFAULT_DART_CAP = 32

# the four local patterns with nonzero weight, keyed by (x1, x2, x3, x4)
_BETA_PATTERNS = {(0, 0, 1, 1), (1, 1, 0, 0)}
_UNIT_PATTERNS = {(0, 1, 0, 1), (1, 0, 1, 0)}


class Dart(NamedTuple):
    vertex: int
    slot: int

    @property
    def index(self) -> int:
        return 4 * self.vertex + self.slot - 1

    @classmethod
    def from_index(cls, index: int) -> "Dart":
        return cls(index // 4, index % 4 + 1)

    def __str__(self) -> str:
        return f"{self.vertex}.{self.slot}"


def _as_fraction(value, name: str) -> Fraction:
    try:
        return Fraction(value) if not isinstance(value, str) else Fraction(value.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise BadParams(f"cannot read {name}={value!r} as a rational number") from exc


@dataclass(frozen=True)
class FourVertexInstance:
    """A labeled 4-regular multigraph with four-vertex weights.

    Either ``beta`` (normalized) or both ``a`` and ``c`` are supplied; in the
    latter case ``beta == a / c`` and partition functions carry ``c ** n``.
    ``rotation[v]`` lists the slots of ``v`` in counterclockwise order.
    """

    n: int
    edges: tuple[tuple[Dart, Dart], ...]
    beta: Fraction
    a: Fraction | None = None
    c: Fraction | None = None
    rotation: tuple[tuple[int, int, int, int], ...] | None = None
    outer: Dart | None = None

    def __post_init__(self):
        if self.n < 0:
            raise NotFourRegular("negative vertex count")
        edges = tuple((Dart(*d1), Dart(*d2)) for d1, d2 in self.edges)
        object.__setattr__(self, "edges", edges)
        seen: set[Dart] = set()
        for d1, d2 in edges:
            for d in (d1, d2):
                if not (0 <= d.vertex < self.n) or d.slot not in (1, 2, 3, 4):
                    raise NotFourRegular(f"dart {d} is out of range for n={self.n}")
                if d in seen:
                    raise SlotReused(f"dart {d} appears in more than one edge")
                seen.add(d)
        if len(seen) != 4 * self.n:
            missing = [
                str(Dart(v, s)) for v in range(self.n) for s in range(1, 5) if Dart(v, s) not in seen
            ]
            raise NotFourRegular(f"unused darts: {', '.join(missing[:8])}")
        if len(edges) != 2 * self.n:  # implied by the dart count, kept explicit
            raise NotFourRegular(f"expected {2 * self.n} edges, found {len(edges)}")

        if self.a is not None or self.c is not None:
            if self.a is None or self.c is None:
                raise BadParams("a and c must be given together")
            a = _as_fraction(self.a, "a")
            c = _as_fraction(self.c, "c")
            if c <= 0:
                raise BadParams("c must be positive")
            if a <= 0:
                raise BadParams("beta = a/c must be positive")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "c", c)
            object.__setattr__(self, "beta", a / c)
        else:
            beta = _as_fraction(self.beta, "beta")
            if beta <= 0:
                raise BadParams("beta must be positive")
            object.__setattr__(self, "beta", beta)

        if self.rotation is not None:
            rot = tuple(tuple(int(s) for s in r) for r in self.rotation)
            if len(rot) != self.n or any(sorted(r) != [1, 2, 3, 4] for r in rot):
                raise RotationIncomplete("rotation must list each vertex's four slots exactly once")
            object.__setattr__(self, "rotation", rot)
        if self.outer is not None:
            outer = Dart(*self.outer)
            if outer not in seen:
                raise MalformedLine(f"outer dart {outer} does not exist")
            object.__setattr__(self, "outer", outer)

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, int, int]],
        *,
        beta=None,
        a=None,
        c=None,
        rotation=None,
        outer=None,
    ) -> "FourVertexInstance":
        """Construct from ``(u, i, v, j)`` edge tuples."""
        if beta is None and (a is None or c is None):
            raise BadParams("give beta, or both a and c")
        es = tuple((Dart(u, i), Dart(v, j)) for u, i, v, j in edges)
        return cls(n, es, beta if beta is not None else Fraction(0), a, c, rotation, outer)

    # -- derived structure -------------------------------------------------

    @property
    def num_darts(self) -> int:
        return 4 * self.n

    @property
    def normalized(self) -> bool:
        return self.c is None

    @property
    def c_factor(self) -> Fraction:
        return Fraction(1) if self.c is None else self.c ** self.n

    @cached_property
    def partner(self) -> tuple[int, ...]:
        """``partner[d]`` is the dart index at the other end of ``d``'s edge."""
        p = [0] * self.num_darts
        for d1, d2 in self.edges:
            p[d1.index] = d2.index
            p[d2.index] = d1.index
        return tuple(p)

    @cached_property
    def edge_of(self) -> tuple[int, ...]:
        out = [0] * self.num_darts
        for k, (d1, d2) in enumerate(self.edges):
            out[d1.index] = k
            out[d2.index] = k
        return tuple(out)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for s in range(4):
                w = self.partner[4 * v + s] // 4
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n

    def with_params(self, *, beta=None, a=None, c=None) -> "FourVertexInstance":
        if beta is not None:
            return replace(self, beta=beta, a=None, c=None)
        if a is not None or c is not None:
            return replace(self, a=a, c=c)
        return self


# -- file format -------------------------------------------------------------


def parse_instance(text: str) -> FourVertexInstance:
    """Parse the line-based instance format.

    ::

        # comment
        n 2
        beta 2            (or: a 2 / c 1)
        e 0 1 1 1         edge joining dart (0,1) to dart (1,1)
        rot 0 1 2 3 4     counterclockwise slot order at vertex 0
        outer 0 1         a dart on the outer face
    """
    n = None
    beta = a = c = None
    edges: list[tuple[int, int, int, int]] = []
    rot: dict[int, tuple[int, ...]] = {}
    outer = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *args = line.split()
        try:
            if key == "n" and len(args) == 1:
                n = int(args[0])
            elif key == "beta" and len(args) == 1:
                beta = _as_fraction(args[0], "beta")
            elif key == "a" and len(args) == 1:
                a = _as_fraction(args[0], "a")
            elif key == "c" and len(args) == 1:
                c = _as_fraction(args[0], "c")
            elif key == "e" and len(args) == 4:
                edges.append(tuple(int(t) for t in args))  # type: ignore[arg-type]
            elif key == "rot" and len(args) == 5:
                v = int(args[0])
                if v in rot:
                    raise RotationIncomplete(f"line {lineno}: rotation for vertex {v} given twice")
                rot[v] = tuple(int(t) for t in args[1:])
            elif key == "outer" and len(args) == 2:
                outer = Dart(int(args[0]), int(args[1]))
            else:
                raise MalformedLine(f"line {lineno}: cannot parse {raw!r}")
        except ValueError as exc:
            if isinstance(exc, (MalformedLine, RotationIncomplete, BadParams)):
                raise
            raise MalformedLine(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise MalformedLine("missing 'n' line")
    if beta is None and a is None and c is None:
        raise BadParams("missing parameters: give 'beta' or 'a' and 'c'")
    if beta is not None and (a is not None or c is not None):
        raise BadParams("give either 'beta' or 'a'/'c', not both")
    rotation = None
    if rot:
        if set(rot) != set(range(n)):
            raise RotationIncomplete("every vertex needs a 'rot' line once any is given")
        rotation = tuple(rot[v] for v in range(n))
    return FourVertexInstance.build(n, edges, beta=beta, a=a, c=c, rotation=rotation, outer=outer)


def _format_number(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:  # terminating decimal
        digits = 0
        while (x * 10**digits).denominator != 1:
            digits += 1
        return f"{float(x):.{digits}f}" if digits < 15 else str(x)
    return str(x)


def format_instance(instance: FourVertexInstance, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {row}" for row in comment.splitlines())
    lines.append(f"n {instance.n}")
    if instance.normalized:
        lines.append(f"beta {_format_number(instance.beta)}")
    else:
        lines.append(f"a {_format_number(instance.a)}")
        lines.append(f"c {_format_number(instance.c)}")
    for d1, d2 in instance.edges:
        lines.append(f"e {d1.vertex} {d1.slot} {d2.vertex} {d2.slot}")
    if instance.rotation is not None:
        for v, r in enumerate(instance.rotation):
            lines.append(f"rot {v} " + " ".join(map(str, r)))
    if instance.outer is not None:
        lines.append(f"outer {instance.outer.vertex} {instance.outer.slot}")
    return "\n".join(lines) + "\n"


def read_instance(path) -> FourVertexInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- weights -----------------------------------------------------------------


def vertex_weight(instance: FourVertexInstance, local) -> Fraction:
    """Normalized weight of a local pattern ``x1x2x3x4`` (string or 4 bits)."""
    bits = tuple(int(ch) for ch in local)
    if bits in _BETA_PATTERNS:
        return instance.beta
    if bits in _UNIT_PATTERNS:
        return Fraction(1)
    return Fraction(0)


def config_weight(instance: FourVertexInstance, config: Sequence[int]) -> Fraction:
    if len(config) != instance.num_darts:
        raise ValueError(f"configuration has {len(config)} dart values, expected {instance.num_darts}")
    for d1, d2 in instance.edges:
        if config[d1.index] == config[d2.index]:
            return Fraction(0)
    w = instance.c_factor
    for v in range(instance.n):
        w *= vertex_weight(instance, config[4 * v : 4 * v + 4])
        if not w:
            return w
    return w


# -- brute-force oracle ------------------------------------------------------


def _edge_order(instance: FourVertexInstance) -> list[int]:
    """Edges in BFS order over vertices so each vertex completes early."""
    order: list[int] = []
    used = [False] * len(instance.edges)
    seen = [False] * instance.n
    for root in range(instance.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for s in range(4):
                d = 4 * v + s
                k = instance.edge_of[d]
                if not used[k]:
                    used[k] = True
                    order.append(k)
                w = instance.partner[d] // 4
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order


def _search(instance: FourVertexInstance, max_darts: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(config, number of beta-vertices)`` for every valid configuration.

    Depth-first over edge orientations; a branch is cut as soon as a vertex
    has both darts of the pair {x1,x4} or {x2,x3} carrying equal values.
    """
    if instance.num_darts > max_darts:
        raise TooLarge(f"{instance.num_darts} darts exceed the enumeration cap of {max_darts}")
    order = _edge_order(instance)
    ends = [(instance.edges[k][0].index, instance.edges[k][1].index) for k in order]
    vals = [-1] * instance.num_darts

    def ok(d: int) -> bool:
        mate = d - d % 4 + 3 - d % 4  # slot pairs 1<->4, 2<->3
        return vals[mate] != vals[d]

    def rec(pos: int):
        if pos == len(ends):
            k = sum(1 for v in range(instance.n) if vals[4 * v] == vals[4 * v + 1])
            yield tuple(vals), k
            return
        d1, d2 = ends[pos]
        for b in (0, 1):
            vals[d1], vals[d2] = b, 1 - b
            if ok(d1) and ok(d2):
                yield from rec(pos + 1)
        vals[d1] = vals[d2] = -1

    yield from rec(0)


def enumerate_configurations(
    instance: FourVertexInstance, max_darts: int = DEFAULT_DART_CAP
) -> list[tuple[tuple[int, ...], Fraction]]:
    """All configurations of positive weight with their exact weights."""
    cf = instance.c_factor
    return [(cfg, cf * instance.beta**k) for cfg, k in _search(instance, max_darts)]


def brute_force_partition(instance: FourVertexInstance, max_darts: int = DEFAULT_DART_CAP) -> Fraction:
    """Exact partition function by enumeration of dart assignments."""
    hist = Counter(k for _, k in _search(instance, max_darts))
    return instance.c_factor * sum((cnt * instance.beta**k for k, cnt in hist.items()), Fraction(0))


def gibbs_distribution(
    instance: FourVertexInstance, max_darts: int = DEFAULT_DART_CAP
) -> dict[tuple[int, ...], Fraction]:
    configs = enumerate_configurations(instance, max_darts)
    z = sum(w for _, w in configs)
    return {cfg: w / z for cfg, w in configs}
