"""Telescoping-product estimator for Z and approximate Gibbs sampling.

Scaling every ``x_e`` by ``t`` gives ``Z0(t)``, a polynomial with ``Z0(0) = 1``.
With ``0 = t_0 < t_1 < ... < t_L = 1``,

    1 / Z0(1) = prod_i Z0(t_{i-1}) / Z0(t_i) = prod_i E_{t_i}[(t_{i-1}/t_i) ** |S|]

where the expectation is over even subgraphs drawn from level ``t_i``.  The
first factor (``r = 0``) is the probability of the empty subgraph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InternalError, TooLarge
from .even import FerroIsingInstance, Reduction, reduce_instance, spins_from_even_batch
from .model import FourVertexInstance, config_weight
from .worm import WormKernel, exact_mixing_time, mixing_bound, sample_even_batch

DEFAULT_SEED = 20240601
DEFAULT_MAX_STEPS = 10_000
DESK_STATE_CAP = 4096


@dataclass(frozen=True)
class Schedule:
    """Scaling levels ``0 = t_0 < t_1 = 2**-E < ... < t_L = 1`` with ratio at most ``1 + 1/E``."""

    levels: tuple[Fraction, ...]

    @classmethod
    def for_edges(cls, num_edges: int) -> "Schedule":
        if num_edges < 1:
            return cls((Fraction(0), Fraction(1)))
        t = Fraction(1, 2**num_edges)
        ratio = 1 + Fraction(1, num_edges)
        levels = [Fraction(0), t]
        while t < 1:
            t = min(Fraction(1), t * ratio)
            levels.append(t)
        return cls(tuple(levels))

    @property
    def num_ratios(self) -> int:
        return len(self.levels) - 1

    def ratios(self) -> list[Fraction]:
        return [self.levels[i - 1] / self.levels[i] for i in range(1, len(self.levels))]


@dataclass(frozen=True)
class Level:
    component: int
    t: Fraction
    r: float
    floor: float  # smallest possible value of r ** |S|
    rel_var_bound: float
    samples: int
    steps: int


@dataclass(frozen=True)
class Plan:
    """Everything the estimator decides before drawing a single random number."""

    components: tuple[tuple[int, ...], ...]
    levels: tuple[Level, ...]
    batches: int
    eps: float
    delta: float


@dataclass(frozen=True)
class Estimate:
    log_value: float
    eps: float
    delta: float
    samples_used: int
    seed: int | None
    exact: bool = False
    batches: int = 0
    levels: int = 0
    batch_log_values: tuple[float, ...] = field(default=())

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def report(self) -> dict:
        return {
            "log_value": self.log_value,
            "value": self.value,
            "eps": self.eps,
            "delta": self.delta,
            "samples_used": self.samples_used,
            "seed": self.seed,
            "exact": self.exact,
            "batches": self.batches,
            "levels": self.levels,
        }


def _check_eps_delta(eps: float, delta: float) -> None:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")


def num_batches(delta: float) -> int:
    """Independent product estimates whose median meets confidence ``1 - delta``.

    Each batch is within tolerance with probability at least 3/4 (Chebyshev),
    so one batch suffices for ``delta >= 1/4``; otherwise Hoeffding on the
    count of good batches needs ``K >= 8 ln(1/delta)``.
    """
    if delta >= 0.25:
        return 1
    k = math.ceil(8 * math.log(1 / delta))
    return k + 1 - k % 2


def max_even_size(kernel: WormKernel) -> int:
    """Upper bound on ``|S|`` for even ``S``: each odd-degree vertex keeps one edge out."""
    n_odd = sum(d % 2 for d in kernel.deg)
    return kernel.num_edges - n_odd // 2


def chain_length(kernel: WormKernel, mode, mix_eps: float, max_steps: int) -> int:
    """Steps per sample at one level.

    ``"desk"`` uses the exact mixing time from the empty state (matrix
    powering), ``"bound"`` the analytic worm-process bound capped at
    ``max_steps``, ``"auto"`` the former when the state space is small.  An
    integer is used as is.
    """
    if isinstance(mode, int):
        return mode
    if mode == "auto":
        try:
            kernel.states(DESK_STATE_CAP)
            mode = "desk"
        except TooLarge:
            mode = "bound"
    if mode == "desk":
        return max(1, exact_mixing_time(kernel, mix_eps, max_steps=max_steps, from_empty=True))
    if mode == "bound":
        return max(1, min(max_steps, math.ceil(mixing_bound(kernel, mix_eps))))
    raise ValueError(f"unknown chain-length mode {mode!r}")


@lru_cache(maxsize=64)
def plan_Z0(ferro: FerroIsingInstance, eps: float, delta: float, steps="auto", max_steps: int = DEFAULT_MAX_STEPS) -> Plan:
    """Levels, sample counts and chain lengths for :func:`estimate_Z0`.

    Components that are trees have ``Z0 = 1`` and get no levels.  Sample
    counts make the relative variance of the whole product at most
    ``eps'**2 / 4`` with ``eps' = eps / (1 + eps)``, which Chebyshev turns into
    a 3/4 success probability for the reciprocal at relative error ``eps``.
    """
    _check_eps_delta(eps, delta)
    comps = []
    raw = []  # (component index, kernel, t, r, floor, var bound)
    for comp in ferro.components():
        probe = WormKernel(ferro, comp)
        cyc = probe.num_edges - probe.m + 1
        if cyc == 0:
            continue
        ci = len(comps)
        comps.append(tuple(comp))
        sched = Schedule.for_edges(probe.num_edges)
        d = max_even_size(probe)
        for t_prev, t in zip(sched.levels, sched.levels[1:]):
            r = float(t_prev / t)
            if t_prev == 0:
                # 1 - P(empty) over P(empty) = Z0(t) - 1 <= (#nonempty even sets) * t**3
                floor = 0.0
                var = (2**cyc - 1) * float(t) ** 3
            else:
                floor = r**d
                var = (1 - floor) ** 2 / (4 * floor)
            raw.append((ci, t, r, floor, var))
    if not raw:
        return Plan((), (), 0, eps, delta)
    eps_p = eps / (1 + eps)
    eta = math.log1p(eps_p**2 / 4)
    n_ratios = len(raw)
    mix_eps = eps / (8 * n_ratios)
    levels = []
    for ci, t, r, floor, var in raw:
        kernel = WormKernel(ferro.scaled(t), comps[ci])
        samples = max(1, math.ceil(n_ratios * var / eta))
        levels.append(Level(ci, t, r, floor, var, samples, chain_length(kernel, steps, mix_eps, max_steps)))
    return Plan(tuple(comps), tuple(levels), num_batches(delta), eps, delta)


def _log_inverse_product(ferro: FerroIsingInstance, plan: Plan, rng: np.random.Generator) -> tuple[float, int]:
    log_prod = 0.0
    used = 0
    for lv in plan.levels:
        kernel = WormKernel(ferro.scaled(lv.t), plan.components[lv.component])
        sample = sample_even_batch(kernel, lv.steps, lv.samples, rng)
        sizes = sample.sum(axis=1)
        vals = np.where(sizes == 0, 1.0, lv.r**sizes) if lv.r == 0 else lv.r**sizes
        mean = float(vals.mean())
        used += lv.samples
        if not lv.floor - 1e-12 <= mean <= 1 + 1e-12:
            raise InternalError(f"level ratio {mean} outside [{lv.floor}, 1]")
        if mean == 0:
            raise InternalError("no empty subgraph observed at the first level")
        log_prod += math.log(mean)
    return -log_prod, used


def estimate_Z0(
    ferro: FerroIsingInstance,
    eps: float = 0.1,
    delta: float = 0.25,
    seed=DEFAULT_SEED,
    *,
    steps="auto",
    max_steps_per_level: int = DEFAULT_MAX_STEPS,
) -> Estimate:
    """Estimate ``log Z0``, the even-subgraph sum of ``ferro`` (median of batch products)."""
    plan = plan_Z0(ferro, float(eps), float(delta), steps, max_steps_per_level)
    if not plan.levels:
        return Estimate(0.0, eps, delta, 0, seed, exact=True)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    logs, used = [], 0
    for _ in range(plan.batches):
        lv, n = _log_inverse_product(ferro, plan, rng)
        logs.append(lv)
        used += n
    return Estimate(
        float(np.median(logs)),
        eps,
        delta,
        used,
        seed if not isinstance(seed, np.random.Generator) else None,
        batches=plan.batches,
        levels=len(plan.levels),
        batch_log_values=tuple(logs),
    )


def estimate_partition(
    instance: FourVertexInstance,
    eps: float = 0.1,
    delta: float = 0.25,
    seed=DEFAULT_SEED,
    *,
    steps="auto",
    max_steps_per_level: int = DEFAULT_MAX_STEPS,
) -> Estimate:
    """Estimate ``log Z`` through the reduction; raises NoFerroReduction when the flip system is infeasible."""
    _check_eps_delta(eps, delta)
    red = reduce_instance(instance)
    ferro = red.ferro
    base = ferro.log_prefactor + ferro.log_normalizer
    z0 = estimate_Z0(ferro, eps, delta, seed, steps=steps, max_steps_per_level=max_steps_per_level)
    return Estimate(
        base + z0.log_value,
        eps,
        delta,
        z0.samples_used,
        z0.seed,
        exact=z0.exact,
        batches=z0.batches,
        levels=z0.levels,
        batch_log_values=tuple(base + v for v in z0.batch_log_values),
    )


# -- sampling ----------------------------------------------------------------


def sample_even_subgraphs(ferro: FerroIsingInstance, steps: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``(count, |E|)`` boolean even subgraphs of ``ferro``, one worm run per cyclic component."""
    out = np.zeros((count, len(ferro.edges)), dtype=bool)
    for comp in ferro.components():
        kernel = WormKernel(ferro, comp)
        if kernel.num_edges < kernel.m:  # a tree: only the empty subgraph is even
            continue
        out[:, list(kernel.edge_ids)] = sample_even_batch(kernel, steps, count, rng)
    return out


def configurations_from_spins(reduction: Reduction, spins: np.ndarray) -> np.ndarray:
    """Dart values for each row of circuit spins (spin xor flip, then circuit parities)."""
    dec = reduction.decomposition
    flips = np.array(reduction.flips or (0,) * dec.m, dtype=np.int8)
    assignment = spins.astype(np.int8) ^ flips
    owner = np.array(dec.owner)
    parity = np.array(dec.parity, dtype=np.int8)
    return assignment[:, owner] ^ parity


def sample_configurations(
    instance: FourVertexInstance, steps: int, count: int, seed=DEFAULT_SEED, reduction: Reduction | None = None
) -> np.ndarray:
    """``count`` approximate Gibbs configurations as a ``(count, 4n)`` array of dart values.

    Every row is checked to have positive weight before it is returned.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    red = reduction or reduce_instance(instance)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    even = sample_even_subgraphs(red.ferro, steps, count, rng)
    spins = spins_from_even_batch(red.ferro, even, rng)
    configs = configurations_from_spins(red, spins)
    for row in np.unique(configs, axis=0):
        if config_weight(instance, tuple(int(b) for b in row)) <= 0:
            raise InternalError(f"sampler produced a zero-weight configuration {row.tolist()}")
    return configs


def sample_configuration(instance: FourVertexInstance, steps: int, seed=DEFAULT_SEED) -> tuple[int, ...]:
    return tuple(int(b) for b in sample_configurations(instance, steps, 1, seed)[0])


def desk_steps(instance_or_ferro, epsilon: float = 0.01, factor: int = 10) -> int:
    """``factor`` times the exact worst-case mixing time of the worm process, over all components."""
    ferro = instance_or_ferro
    if isinstance(ferro, FourVertexInstance):
        ferro = reduce_instance(ferro).ferro
    worst = 1
    for comp in ferro.components():
        kernel = WormKernel(ferro, comp)
        worst = max(worst, exact_mixing_time(kernel, epsilon))
    return factor * worst
