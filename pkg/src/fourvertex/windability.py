"""Exact windability test for constraint functions of arity at most 4.

Unknowns are ``B(x, y, M)`` for every pair of inputs and every partition
``M`` of the positions where ``x`` and ``y`` differ into pairs and at most one
singleton.  Flipping a part ``S`` of ``M`` in both ``x`` and ``y`` must not
change ``B``, so unknowns are merged into orbits first; what remains is the
linear system ``sum_M B(x, y, M) = f(x) f(y)`` with ``B >= 0``, decided by
zero propagation and an exact Phase-I simplex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ArityTooLarge, InternalError

MAX_ARITY = 4


@dataclass(frozen=True)
class ConstraintFunction:
    """Table indexed by ``x`` read as a binary number with ``x1`` most significant."""

    arity: int
    table: tuple[Fraction, ...]

    def __post_init__(self):
        if self.arity > MAX_ARITY:
            raise ArityTooLarge(f"arity {self.arity} exceeds {MAX_ARITY}")
        table = tuple(Fraction(v) for v in self.table)
        if len(table) != 2**self.arity:
            raise ValueError(f"arity {self.arity} needs {2 ** self.arity} table entries, got {len(table)}")
        if any(v < 0 for v in table):
            raise ValueError("table entries must be nonnegative")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_table(cls, values: Sequence) -> "ConstraintFunction":
        arity = max(len(values) - 1, 0).bit_length()
        if len(values) > 2**MAX_ARITY:
            raise ArityTooLarge(f"{len(values)} entries exceed arity {MAX_ARITY}")
        return cls(arity, tuple(values))

    def __call__(self, x: int) -> Fraction:
        return self.table[x]

    def bits(self, x: int) -> str:
        return format(x, f"0{self.arity}b") if self.arity else ""


def fstar(a, c) -> ConstraintFunction:
    """The four-vertex function: ``a`` on 0011 and 1100, ``c`` on 0101 and 1010."""
    table = [Fraction(0)] * 16
    for pattern, value in (("0011", a), ("1100", a), ("0101", c), ("1010", c)):
        table[int(pattern, 2)] = Fraction(value)
    return ConstraintFunction(4, tuple(table))


@dataclass(frozen=True)
class MatchingPartition:
    """Pairs and an optional singleton, as 0-based positions."""

    pairs: tuple[tuple[int, int], ...]
    singleton: int | None = None

    @property
    def parts(self) -> tuple[tuple[int, ...], ...]:
        return self.pairs + (((self.singleton,),) if self.singleton is not None else ())

    def __str__(self) -> str:
        parts = ["".join(str(i + 1) for i in p) for p in self.parts]
        return "{" + "|".join(parts) + "}"


def _perfect_matchings(elems: tuple[int, ...]):
    if not elems:
        yield ()
        return
    first, rest = elems[0], elems[1:]
    for k, other in enumerate(rest):
        for m in _perfect_matchings(rest[:k] + rest[k + 1 :]):
            yield ((first, other),) + m


def matchings(z, arity: int | None = None) -> list[MatchingPartition]:
    """All partitions of the 1-positions of ``z`` into pairs and at most one singleton.

    ``z`` is a bit string (``"1110"``), a bit sequence, or an integer with ``arity``.
    """
    if isinstance(z, int):
        if arity is None:
            raise ValueError("integer z needs an arity")
        bits = [(z >> (arity - 1 - i)) & 1 for i in range(arity)]
    else:
        bits = [int(b) for b in z]
    ones = tuple(i for i, b in enumerate(bits) if b)
    if len(ones) > MAX_ARITY:
        raise ArityTooLarge(f"{len(ones)} set bits exceed {MAX_ARITY}")
    if len(ones) % 2 == 0:
        return [MatchingPartition(m) for m in _perfect_matchings(ones)]
    out = []
    for s in ones:
        rest = tuple(i for i in ones if i != s)
        out.extend(MatchingPartition(m, s) for m in _perfect_matchings(rest))
    return out


def _mask(part: Sequence[int], arity: int) -> int:
    return sum(1 << (arity - 1 - i) for i in part)


@dataclass(frozen=True)
class WindabilityResult:
    windable: bool
    certificate: dict | None  # (x, y, str(M)) -> B

    @property
    def verdict(self) -> str:
        return "windable" if self.windable else "unwindable"

    def report(self, f: ConstraintFunction) -> dict:
        out: dict = {"verdict": self.verdict, "arity": f.arity}
        if self.certificate is not None:
            out["certificate"] = [
                {"x": f.bits(x), "y": f.bits(y), "M": m, "B": str(b)}
                for (x, y, m), b in sorted(self.certificate.items())
                if b
            ]
        return out


def _variables(f: ConstraintFunction):
    """Unknowns ``(x, y, M)`` and their orbit labels under the flip symmetry."""
    J = f.arity
    keys = []
    for x, y in itertools.product(range(2**J), repeat=2):
        for m in matchings(x ^ y, J):
            keys.append((x, y, m))
    index = {k: i for i, k in enumerate(keys)}
    parent = list(range(len(keys)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (x, y, m), i in index.items():
        for part in m.parts:
            s = _mask(part, J)
            j = index[(x ^ s, y ^ s, m)]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return keys, [find(i) for i in range(len(keys))]


def _phase_one(rows: list[list[int]], rhs: list[Fraction], num_vars: int) -> list[Fraction] | None:
    """Nonnegative solution of ``sum_{j in row} v_j = rhs`` (0/1 coefficients), or None.

    Dense exact tableau, Bland's rule, one artificial variable per row.
    """
    R = len(rows)
    width = num_vars + R
    T = []
    for i, row in enumerate(rows):
        line = [Fraction(0)] * (width + 1)
        for j in row:
            line[j] += 1
        line[num_vars + i] = Fraction(1)
        line[width] = rhs[i]
        T.append(line)
    cost = [Fraction(0)] * (width + 1)
    for line in T:
        for j in range(num_vars):
            cost[j] -= line[j]
        cost[width] -= line[width]
    basis = [num_vars + i for i in range(R)]
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(R):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen in a bounded Phase I
            raise InternalError("unbounded Phase-I problem")
        i = best[1]
        piv = T[i][enter]
        T[i] = [v / piv for v in T[i]]
        for r in range(R):
            if r != i and T[r][enter]:
                k = T[r][enter]
                T[r] = [v - k * w for v, w in zip(T[r], T[i])]
        if cost[enter]:
            k = cost[enter]
            cost = [v - k * w for v, w in zip(cost, T[i])]
        basis[i] = enter
    if cost[width] != 0:  # -(sum of artificials) at the optimum
        return None
    values = [Fraction(0)] * num_vars
    for i, j in enumerate(basis):
        if j < num_vars:
            values[j] = T[i][width]
    return values


def _solve(f: ConstraintFunction):
    keys, orbit = _variables(f)
    groups: dict[tuple[int, int], list[int]] = {}
    for i, (x, y, _) in enumerate(keys):
        groups.setdefault((x, y), []).append(orbit[i])
    rows = [(sorted(set(vs)), f(x) * f(y)) for (x, y), vs in groups.items()]
    # a zero right-hand side forces every orbit in that row to zero
    zero = set()
    for vs, b in rows:
        if b == 0:
            zero.update(vs)
    live_rows = []
    for vs, b in rows:
        if b == 0:
            continue
        live = [v for v in vs if v not in zero]
        if not live:
            return None, keys, orbit
        live_rows.append((live, b))
    # independent blocks of rows sharing orbits
    block_of: dict[int, int] = {}
    blocks: list[list[int]] = []
    parent: list[int] = []

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for r, (vs, _) in enumerate(live_rows):
        parent.append(r)
        for v in vs:
            if v in block_of:
                a, b = find(block_of[v]), find(r)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                block_of[v] = r
    by_root: dict[int, list[int]] = {}
    for r in range(len(live_rows)):
        by_root.setdefault(find(r), []).append(r)
    value: dict[int, Fraction] = {}
    for members in by_root.values():
        local_vars = sorted({v for r in members for v in live_rows[r][0]})
        pos = {v: k for k, v in enumerate(local_vars)}
        sol = _phase_one([[pos[v] for v in live_rows[r][0]] for r in members], [live_rows[r][1] for r in members], len(local_vars))
        if sol is None:
            return None, keys, orbit
        for v, s in zip(local_vars, sol):
            value[v] = s
    return value, keys, orbit


def verify_certificate(f: ConstraintFunction, certificate: dict) -> bool:
    """Check both windability conditions directly on a full ``(x, y, str(M)) -> B`` table."""
    J = f.arity
    for x, y in itertools.product(range(2**J), repeat=2):
        ms = matchings(x ^ y, J)
        vals = []
        for m in ms:
            b = certificate.get((x, y, str(m)))
            if b is None or b < 0:
                return False
            vals.append(b)
            for part in m.parts:
                s = _mask(part, J)
                if certificate.get((x ^ s, y ^ s, str(m))) != b:
                    return False
        if sum(vals, Fraction(0)) != f(x) * f(y):
            return False
    return True


def check_windable(f: ConstraintFunction) -> WindabilityResult:
    if f.arity > MAX_ARITY:
        raise ArityTooLarge(f"arity {f.arity} exceeds {MAX_ARITY}")
    value, keys, orbit = _solve(f)
    if value is None:
        return WindabilityResult(False, None)
    cert = {(x, y, str(m)): value.get(orbit[i], Fraction(0)) for i, (x, y, m) in enumerate(keys)}
    if not verify_certificate(f, cert):
        raise InternalError("solver returned a certificate that fails verification")
    return WindabilityResult(True, cert)
