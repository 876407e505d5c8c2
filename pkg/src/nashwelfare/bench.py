"""Benchmark suites comparing the greedy solvers with the brute-force oracle."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from fractions import Fraction
from typing import Iterator, Optional

from .binary import solve_binary
from .exceptions import BudgetExceededError, InfeasibleError
from .generators import SplitMix64, random_binary, random_caps, random_concave_profile, random_identical
from .identical import (
    EFX_RATIO_ACCEPT_RATIONAL,
    gen_tight_example,
    solve_identical,
    tight_example_allocation,
)
from .model import ConcaveProfile
from .oracle import DEFAULT_BUDGET, brute_force
from .welfare import NswValue, check_efx, nsw

__all__ = ["BenchRow", "SUITES", "run_suite", "write_csv", "ratio_of", "ratio_meets"]

SUITES = ("identical-ratio", "binary-exact", "concave-exact", "tightness-sweep")
DENSITIES = (0.3, 0.6, 1.0)
TIGHT_ORACLE_MAX_M = 12


@dataclass
class BenchRow:
    instance_id: str
    n: int
    m: int
    seed: Optional[int]
    algo: str
    nsw_algo: float
    nsw_opt: float
    ratio: float
    exact_ratio_ok: bool
    efx_ok: Optional[bool]
    iterations: Optional[int]
    zeros_algo: int
    product_algo: str
    zeros_opt: int
    product_opt: str


def ratio_of(a: NswValue, b: NswValue) -> float:
    """Float NSW(a) / NSW(b), computed in log space; NaN for 0/0."""
    if a.zero_count and b.zero_count:
        return math.nan
    if a.zero_count or b.zero_count:
        return 0.0 if a.zero_count else math.inf
    if a == b:
        return 1.0
    return math.exp(a.log() - b.log())


def ratio_meets(a: NswValue, b: NswValue, r: Fraction) -> bool:
    """Exact test of NSW(a) >= r * NSW(b), i.e. prod(a) >= r**n * prod(b)."""
    if a.zero_count > b.zero_count:
        return False
    if a.zero_count < b.zero_count:
        return True
    return a.positive_product >= b.positive_product * Fraction(r) ** (a.num_agents - a.zero_count)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _row(instance_id, inst, seed, algo, val, opt, exact_ok, efx_ok, iterations) -> BenchRow:
    return BenchRow(
        instance_id=instance_id,
        n=inst.num_agents,
        m=inst.num_goods,
        seed=seed,
        algo=algo,
        nsw_algo=val.to_float(),
        nsw_opt=opt.to_float(),
        ratio=ratio_of(val, opt),
        exact_ratio_ok=exact_ok,
        efx_ok=efx_ok,
        iterations=iterations,
        zeros_algo=val.zero_count,
        product_algo=_frac(val.positive_product),
        zeros_opt=opt.zero_count,
        product_opt=_frac(opt.positive_product),
    )


def _check_sizes(max_n: int, max_m: int, budget: int) -> None:
    if max_n**max_m > budget:
        raise BudgetExceededError(max_n**max_m, budget)


def _identical_ratio(count, seed, min_n, max_n, min_m, max_m, max_value, budget):
    _check_sizes(max_n, max(max_m, max_n), budget)
    seeds = SplitMix64(seed)
    worst = None
    for k in range(count):
        s = seeds.next_u64()
        pick = SplitMix64(s)
        n = pick.randint(min_n, max_n)
        # m >= n keeps the optimum positive
        m = pick.randint(max(min_m, n), max(max_m, n))
        inst = random_identical(n, m, max_value, s)
        alloc = solve_identical(inst)
        val = nsw(inst, alloc)
        opt = brute_force(inst, budget=budget).value
        row = _row(f"identical-{k}", inst, s, "identical", val, opt,
                   ratio_meets(val, opt, EFX_RATIO_ACCEPT_RATIONAL), check_efx(inst, alloc) is None, None)
        worst = row.ratio if worst is None else min(worst, row.ratio)
        yield row
    if worst is not None:
        yield BenchRow("summary", 0, 0, seed, "identical-min-ratio", math.nan, math.nan, worst,
                       True, None, None, 0, "", 0, "")


def _feasible(make, seeds):
    """Draw instances from ``make(seed)`` until one admits positive NSW."""
    while True:
        s = seeds.next_u64()
        inst, profile = make(s)
        try:
            return s, inst, profile, solve_binary(inst, profile=profile)
        except InfeasibleError:
            continue


def _binary_exact(count, seed, min_n, max_n, min_m, max_m, budget, concave):
    _check_sizes(max_n, max_m, budget)
    seeds = SplitMix64(seed)

    def make(s):
        pick = SplitMix64(s)
        n, m = pick.randint(min_n, max_n), pick.randint(min_m, max_m)
        density = DENSITIES[pick.randint(0, len(DENSITIES) - 1)]
        inst = random_binary(n, m, density, s)
        profile = None
        if concave:
            if pick.bernoulli(0.5):
                profile = ConcaveProfile.from_caps(random_caps(n, pick), m)
            else:
                profile = random_concave_profile(n, m, pick)
        return inst, profile

    algo = "concave" if concave else "binary"
    for k in range(count):
        s, inst, profile, res = _feasible(make, seeds)
        opt = brute_force(inst, profile, budget=budget).value
        yield _row(f"{algo}-{k}", inst, s, algo, res.value, opt, res.value == opt, None, res.iterations)


def _tightness(m_max, m_step, budget):
    for m in range(4, m_max + 1, m_step):
        if m % 2:
            continue
        inst = gen_tight_example(m)
        alloc = tight_example_allocation(m)
        val = nsw(inst, alloc)
        if m <= TIGHT_ORACLE_MAX_M:
            opt = brute_force(inst, budget=budget).value
        else:
            half = Fraction(3 * (m - 2), 2)
            opt = NswValue(0, half * half, 2)
        exact = val.positive_product * 9 == opt.positive_product * 8 and not val.zero_count
        yield _row(f"tight-{m}", inst, None, "tight-efx-designated", val, opt, exact,
                   check_efx(inst, alloc) is None, None)


def run_suite(
    suite: str,
    *,
    count: int = 100,
    seed: int = 0,
    min_n: int = 2,
    max_n: int = 4,
    min_m: int = 2,
    max_m: int = 8,
    max_value: int = 20,
    m_max: int = 200,
    m_step: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[BenchRow]:
    if suite == "identical-ratio":
        return _identical_ratio(count, seed, min_n, max_n, min_m, max_m, max_value, budget)
    if suite == "binary-exact":
        return _binary_exact(count, seed, min_n, max_n, min_m, max_m, budget, concave=False)
    if suite == "concave-exact":
        return _binary_exact(count, seed, min_n, max_n, min_m, max_m, budget, concave=True)
    if suite == "tightness-sweep":
        return _tightness(m_max, m_step, budget)
    raise ValueError(f"unknown suite {suite!r}")


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(rows, out: Optional[io.TextIOBase] = None) -> str:
    """Write rows (header first, LF endings); returns the text written."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f.name for f in fields(BenchRow)])
    for row in rows:
        w.writerow([_cell(x) for x in astuple(row)])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
