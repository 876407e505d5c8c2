"""Command line front end.

Exit codes: 0 success, 1 bad input, 2 infeasible instance, 3 property
violated (``check``).
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

from . import bench
from .binary import solve_binary
from .exceptions import InfeasibleError, NashWelfareError
from .generators import FAMILIES, generate
from .identical import solve_identical
from .model import (
    classify,
    load_instance,
    parse_allocation,
    serialize_allocation,
    serialize_instance,
    validate_allocation,
)
from .oracle import DEFAULT_BUDGET, brute_force
from .welfare import check_ef, check_efx, nsw, nsw_concave

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_VIOLATION = 0, 1, 2, 3


class InputError(Exception):
    pass


@contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


def _load(args):
    try:
        return load_instance(args.input)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from exc


def _load_allocation(path, inst):
    try:
        with open(path, encoding="utf-8") as fh:
            alloc = parse_allocation(fh.read(), inst.num_agents)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    validate_allocation(inst, alloc)
    return alloc


def _profile(args, inst):
    if getattr(args, "caps", False):
        if inst.caps is None:
            raise InputError("--caps given but the instance has no \"caps\"")
        return inst.profile
    if getattr(args, "concave", False):
        if inst.concave is None:
            raise InputError("--concave given but the instance has no \"concave\" tables")
        return inst.profile
    return None


def _value(inst, alloc, profile):
    return nsw(inst, alloc) if profile is None else nsw_concave(inst, profile, alloc)


def _write_trace(path, trace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "from_agent", "to_agent", "path_len", "zeros", "product_num", "product_den"])
        for step in trace:
            p = step.value.positive_product
            w.writerow([step.iteration, step.from_agent + 1, step.to_agent + 1, step.path_len,
                        step.value.zero_count, p.numerator, p.denominator])


def cmd_solve(args) -> int:
    inst = _load(args)
    profile = _profile(args, inst)
    if args.algo == "identical":
        if profile is not None:
            raise InputError("--caps/--concave only apply to --algo binary")
        if not classify(inst).is_identical:
            raise InputError("instance is not identical")
        alloc = solve_identical(inst)
        value = nsw(inst, alloc)
        iterations = None
    else:
        if not classify(inst).is_binary:
            raise InputError("instance is not binary")
        start = _load_allocation(args.start, inst) if args.start else None
        try:
            res = solve_binary(inst, start, profile)
        except InfeasibleError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        alloc, value, iterations = res.allocation, res.value, res.iterations
        if args.trace:
            _write_trace(args.trace, res.trace)
    with _sink(args.output) as out:
        out.write(serialize_allocation(alloc))
    if args.output not in (None, "-"):
        _say(args, value.report())
        if iterations is not None:
            _say(args, f"iterations = {iterations}")
    elif not args.quiet:
        print(value.report(), file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args)
    alloc = _load_allocation(args.allocation, inst)
    if args.property == "nsw":
        _say(args, _value(inst, alloc, _profile(args, inst)).report())
        return EXIT_OK
    witness = check_efx(inst, alloc) if args.property == "efx" else check_ef(inst, alloc)
    if witness is None:
        _say(args, f"{args.property.upper()}: pass")
        return EXIT_OK
    print(f"{args.property.upper()}: violation: {witness.describe()}")
    return EXIT_VIOLATION


def cmd_gen(args) -> int:
    inst = generate(args.family, n=args.n, m=args.m, seed=args.seed, density=args.density,
                    max_value=args.max_value)
    with _sink(args.output) as out:
        out.write(serialize_instance(inst))
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args)
    res = brute_force(inst, _profile(args, inst), budget=args.budget)
    with _sink(args.output) as out:
        out.write(serialize_allocation(res.best))
    msg = f"{res.value.report()}\nexplored = {res.explored}"
    if args.output not in (None, "-"):
        _say(args, msg)
    elif not args.quiet:
        print(msg, file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = bench.run_suite(
        args.suite, count=args.count, seed=args.seed, min_n=args.min_n, max_n=args.max_n,
        min_m=args.min_m, max_m=args.max_m, max_value=args.max_value, m_max=args.m_max,
        m_step=args.m_step, budget=args.budget,
    )
    text = bench.write_csv(rows)
    with _sink(args.output) as out:
        out.write(text)
    return EXIT_OK


def _common(p, *, needs_input=True, output_help="output file (default stdout)"):
    if needs_input:
        p.add_argument("--input", required=True, help="instance file (JSON)")
    p.add_argument("--output", help=output_help)
    p.add_argument("--seed", type=int, default=0, help="PRNG seed")
    p.add_argument("--quiet", action="store_true", help="suppress reports")


def _profile_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--caps", action="store_true", help="use the instance's budget-additive caps")
    g.add_argument("--concave", action="store_true", help="use the instance's concave tables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nashwelfare", description="Nash social welfare allocation tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute an allocation")
    _common(p, output_help="allocation file (default stdout)")
    p.add_argument("--algo", choices=("identical", "binary"), required=True)
    _profile_flags(p)
    p.add_argument("--start", help="starting allocation file (binary only)")
    p.add_argument("--trace", help="write the iteration trace as CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check EF / EFx or report NSW of an allocation")
    _common(p)
    p.add_argument("--allocation", required=True, help="allocation file")
    p.add_argument("--property", choices=("ef", "efx", "nsw"), required=True)
    _profile_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate an instance")
    _common(p, needs_input=False, output_help="instance file (default stdout)")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--max-value", type=int, default=10)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="brute-force Nash optimum")
    _common(p, output_help="allocation file (default stdout)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _profile_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run a benchmark suite and emit CSV")
    _common(p, needs_input=False, output_help="CSV file (default stdout)")
    p.add_argument("--suite", choices=bench.SUITES, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--min-n", type=int, default=2)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--min-m", type=int, default=2)
    p.add_argument("--max-m", type=int, default=8)
    p.add_argument("--max-value", type=int, default=20)
    p.add_argument("--m-max", type=int, default=200, help="largest m for tightness-sweep")
    p.add_argument("--m-step", type=int, default=2)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, NashWelfareError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
