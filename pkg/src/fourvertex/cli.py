"""Command-line front end: ``fourvertex <command> [options]``.

Exit codes: 0 success, 1 usage, 2 invalid input, 3 infeasible flip system,
4 size cap exceeded, 5 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import circuits, estimator, even, parity, planar, windability, worm
from .errors import (
    FourVertexError,
    InstanceError,
    InternalError,
    NoFerroReduction,
    NotFerromagnetic,
    TooLarge,
)
from .model import (
    DEFAULT_DART_CAP,
    brute_force_partition,
    format_instance,
    read_instance,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_CAP, EXIT_INTERNAL = range(6)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Exit(Exception):
    def __init__(self, code: int, report: dict):
        self.code = code
        self.report = report


# -- output ------------------------------------------------------------------


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        out.write(f"{key}: {value}\n")


# -- shared argument handling ------------------------------------------------


def _common(p: argparse.ArgumentParser, *, instance: bool = True, seed: bool = False) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")
    if instance:
        p.add_argument("input", help="instance file")
        p.add_argument("--beta", help="override beta (rational)")
        p.add_argument("--a", help="override a (with --c)")
        p.add_argument("--c", help="override c (with --a)")
    if seed:
        p.add_argument("--seed", type=int, default=estimator.DEFAULT_SEED, help="random seed (fixed default)")
        p.add_argument("--entropy", action="store_true", help="seed from the operating system instead")


def _instance(args):
    inst = read_instance(args.input)
    if args.beta is not None:
        if args.a is not None or args.c is not None:
            raise InstanceError("--beta cannot be combined with --a/--c")
        return inst.with_params(beta=Fraction(args.beta))
    if (args.a is None) != (args.c is None):
        raise InstanceError("--a and --c must be given together")
    if args.a is not None:
        return inst.with_params(a=Fraction(args.a), c=Fraction(args.c))
    return inst


def _seed(args) -> int:
    if getattr(args, "entropy", False):
        return int(np.random.SeedSequence().entropy % 2**63)
    return args.seed


def _reduction(inst) -> even.Reduction:
    try:
        return even.reduce_instance(inst)
    except NoFerroReduction as exc:
        raise _Exit(EXIT_INFEASIBLE, {"error": "NoFerroReduction", "message": str(exc)}) from exc


def _chain_length(value: str):
    if value in ("auto", "desk", "bound"):
        return value
    try:
        steps = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected auto, desk, bound or a positive integer") from None
    if steps < 1:
        raise argparse.ArgumentTypeError("chain length must be positive")
    return steps


# -- subcommands -------------------------------------------------------------


def cmd_exact(args) -> dict:
    inst = _instance(args)
    return {"Z": str(brute_force_partition(inst, args.max_darts))}


def cmd_decompose(args) -> dict:
    inst = _instance(args)
    dec = circuits.decompose(inst)
    return circuits.decomposition_report(inst, dec, circuits.classify(inst, dec))


def cmd_solve_parity(args) -> dict:
    inst = _instance(args)
    graph = circuits.classify(inst, circuits.decompose(inst))
    system = parity.build_system(graph, inst.beta)
    result = parity.solve(system)
    report = parity.solve_report(system, result)
    if not result.feasible:
        raise _Exit(EXIT_INFEASIBLE, report)
    return report


def cmd_reduce(args) -> dict:
    red = _reduction(_instance(args))
    return red.ferro.report()


def _worm_kernel(ferro, index: int) -> worm.WormKernel:
    comps = ferro.components()
    if not comps:
        raise InstanceError("the reduced instance has no edges; the worm process is trivial")
    if not 0 <= index < len(comps):
        raise InstanceError(f"component {index} does not exist (have {len(comps)})")
    return worm.WormKernel(ferro, comps[index])


def _state_dict(kernel: worm.WormKernel, state: int) -> dict:
    desc = kernel.describe(state)
    return {"edges": sorted(desc.edges), "odd": list(desc.odd_vertices)}


def cmd_worm(args) -> dict:
    red = _reduction(_instance(args))
    kernel = _worm_kernel(red.ferro, args.component)
    seed = _seed(args)
    chains = []
    finals = []
    for c in range(args.chains):
        rng = np.random.default_rng([seed, c])
        state = 0
        trace = [state]
        for _ in range(args.steps):
            state = kernel.step(state, rng)
            if args.report == "trace":
                trace.append(state)
        finals.append(state)
        if args.report == "trace":
            chains.append([_state_dict(kernel, s) for s in trace])
    report: dict = {"seed": seed, "steps": args.steps, "chains": args.chains, "vertices": list(kernel.vertices)}
    if args.report == "trace":
        report["trace"] = chains
    elif args.report == "final":
        report["final"] = [_state_dict(kernel, s) for s in finals]
    else:
        counts: dict[int, int] = {}
        for s in finals:
            counts[s] = counts.get(s, 0) + 1
        report["histogram"] = [
            dict(_state_dict(kernel, s), count=n) for s, n in sorted(counts.items())
        ]
    return report


def cmd_estimate(args) -> dict:
    inst = _instance(args)
    seed = _seed(args)
    try:
        est = estimator.estimate_partition(
            inst, args.eps, args.delta, seed, steps=args.chain_length, max_steps_per_level=args.max_steps_per_level
        )
    except NoFerroReduction as exc:
        raise _Exit(EXIT_INFEASIBLE, {"error": "NoFerroReduction", "message": str(exc)}) from exc
    return est.report()


def cmd_sample(args) -> dict:
    inst = _instance(args)
    red = _reduction(inst)
    seed = _seed(args)
    configs = estimator.sample_configurations(inst, args.steps, args.count, seed, reduction=red)
    # dart values in file order: the two darts of each edge line
    order = [d.index for pair in inst.edges for d in pair]
    lines = ["".join(str(int(b)) for b in row[order]) for row in configs]
    report = {"seed": seed, "steps": args.steps, "count": args.count, "dart_order": "edge lines, first dart then second"}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        report["out"] = args.out
    else:
        report["configurations"] = lines
    return report


def cmd_planar_label(args) -> dict:
    inst = _instance(args)
    coloring = planar.two_color_faces(inst)
    out = planar.canonical_label(inst, coloring)
    text = format_instance(out, "canonically labeled: slot pairs (1,4) and (2,3) bracket black faces")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(text)
    return {"output": args.output, "changed": out.edges != inst.edges, "faces": len(coloring.faces)}


def cmd_planar_partition(args) -> dict:
    inst = _instance(args)
    coloring = planar.two_color_faces(inst)
    result = planar.planar_partition(
        inst, coloring, method=args.method, eps=args.eps, delta=args.delta, seed=_seed(args), steps=args.chain_length
    )
    report = result.report()
    report["canonical_input"] = planar.is_canonical(inst, coloring)
    report["black_face_graph"] = result.graph.report(inst.beta)
    return report


def _parse_table(values: list[str]) -> windability.ConstraintFunction:
    try:
        return windability.ConstraintFunction.from_table([Fraction(v) for v in values])
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(str(exc)) from exc


def cmd_windable(args) -> dict:
    if args.fstar is not None:
        f = windability.fstar(Fraction(args.fstar[0]), Fraction(args.fstar[1]))
    else:
        f = _parse_table(args.table)
    result = windability.check_windable(f)
    report = result.report(f)
    if not args.certificate:
        report.pop("certificate", None)
    return report


def cmd_mixing_bound(args) -> dict:
    inst = _instance(args)
    report: dict = {"epsilon": args.eps}
    red = _reduction(inst)
    report["worm"] = [
        {"component": i, "m": k.m, "edges": k.num_edges, "bound": worm.mixing_bound(k, args.eps)}
        for i, k in enumerate(worm.WormKernel(red.ferro, c) for c in red.ferro.components())
    ]
    if inst.rotation is not None and inst.outer is not None:
        report["planar"] = planar.planar_mixing_bound(inst, args.eps)
    return report


def cmd_verify(args) -> dict:
    inst = _instance(args)
    checks = []

    def check(name, ok, **detail):
        checks.append(dict(detail, name=name, ok=bool(ok)))

    z = brute_force_partition(inst, args.max_darts)
    dec = circuits.decompose(inst)
    check("circuit_sum", circuits.circuit_partition(inst, dec) == z, value=str(circuits.circuit_partition(inst, dec)))
    red = None
    try:
        red = even.reduce_instance(inst)
    except NoFerroReduction:
        check("even_identity", True, skipped="flip system infeasible")
    if red is not None:
        ferro = red.ferro
        z_even = even.exact_partition_from_even(ferro)
        check("even_identity", z_even == z, value=str(z_even))
        z_ising = even.ising_partition(ferro)
        check("ising_sum", z_ising == z, value=str(z_ising))
        for i, comp in enumerate(ferro.components()):
            kernel = worm.WormKernel(ferro, comp)
            try:
                check(f"worm_reversible[{i}]", worm.check_reversibility(kernel))
                check(f"worm_lazy[{i}]", worm.check_laziness(kernel))
                check(f"worm_measure_bound[{i}]", worm.check_measure_lower_bound(kernel))
            except TooLarge:
                check(f"worm_kernel[{i}]", True, skipped="state space too large")
    if inst.rotation is not None and inst.outer is not None:
        coloring = planar.two_color_faces(inst)
        canonical = planar.is_canonical(inst, coloring)
        result = planar.planar_partition(inst, coloring, method="exact")
        if canonical:
            check("black_face_sum", result.value == z, value=str(result.value))
        else:
            z_canon = brute_force_partition(planar.canonical_label(inst, coloring), args.max_darts)
            check("black_face_sum", result.value == z_canon, value=str(result.value), note="compared with the canonical relabeling")
    ok = all(c["ok"] for c in checks)
    report = {"Z": str(z), "checks": checks, "ok": ok}
    if not ok:
        raise _Exit(EXIT_INTERNAL, report)
    return report


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fourvertex", description="Count and sample four-vertex model configurations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="exact Z by enumeration")
    _common(p)
    p.add_argument("--max-darts", type=int, default=DEFAULT_DART_CAP)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("decompose", help="circuits and the circuit graph")
    _common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("solve-parity", help="solve the GF(2) flip system")
    _common(p)
    p.set_defaults(func=cmd_solve_parity)

    p = sub.add_parser("reduce", help="ferromagnetic Ising reduction")
    _common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("worm", help="run the worm process on the reduced instance")
    _common(p, seed=True)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--component", type=int, default=0)
    p.add_argument("--report", choices=("trace", "final", "histogram"), default="final")
    p.set_defaults(func=cmd_worm)

    p = sub.add_parser("estimate", help="randomized estimate of Z")
    _common(p, seed=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--max-steps-per-level", type=int, default=estimator.DEFAULT_MAX_STEPS)
    p.add_argument("--chain-length", type=_chain_length, default="auto")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sample", help="approximate Gibbs samples")
    _common(p, seed=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", help="write one configuration per line")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("planar", help="plane-embedded instances")
    psub = p.add_subparsers(dest="planar_command", required=True, parser_class=_Parser)
    q = psub.add_parser("canonical-label", help="rewrite slot labels canonically")
    q.add_argument("--input", dest="input", required=True)
    q.add_argument("--output", required=True)
    q.add_argument("--json", action="store_true")
    q.add_argument("--beta")
    q.add_argument("--a")
    q.add_argument("--c")
    q.set_defaults(func=cmd_planar_label)
    q = psub.add_parser("partition", help="Z from the black-face graph")
    _common(q, seed=True)
    q.add_argument("--method", choices=("auto", "exact", "estimate"), default="auto")
    q.add_argument("--eps", type=float, default=0.1)
    q.add_argument("--delta", type=float, default=0.25)
    q.add_argument("--chain-length", type=_chain_length, default="auto")
    q.set_defaults(func=cmd_planar_partition)

    p = sub.add_parser("windable", help="windability of a constraint function")
    _common(p, instance=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--table", nargs="+", metavar="V", help="2**J rationals, x1 most significant")
    g.add_argument("--fstar", nargs=2, metavar=("A", "C"), help="the four-vertex function")
    p.add_argument("--certificate", action="store_true", help="include the B values")
    p.set_defaults(func=cmd_windable)

    p = sub.add_parser("mixing-bound", help="evaluate the mixing-time bounds")
    _common(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.set_defaults(func=cmd_mixing_bound)

    p = sub.add_parser("verify", help="cross-check every exact route")
    _common(p)
    p.add_argument("--max-darts", type=int, default=DEFAULT_DART_CAP)
    p.set_defaults(func=cmd_verify)
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, NoFerroReduction):
        return EXIT_INFEASIBLE
    if isinstance(exc, TooLarge):
        return EXIT_CAP
    if isinstance(exc, InternalError):
        return EXIT_INTERNAL
    if isinstance(exc, (InstanceError, NotFerromagnetic, OSError, ValueError, ZeroDivisionError)):
        return EXIT_INPUT
    return EXIT_INTERNAL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = getattr(args, "json", False)
    try:
        report = args.func(args)
    except _Exit as exc:
        _emit(exc.report, as_json)
        return exc.code
    except (FourVertexError, OSError, ValueError, ZeroDivisionError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, as_json, sys.stderr)
        return _exit_code(exc)
    _emit(report, as_json)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
