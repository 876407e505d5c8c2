"""Acceptance suite: one test per exit criterion, each at its pinned tolerance.

Every test appends a PASS/FAIL line to ``REPORT``; the lines are printed at
the end of the pytest run (see ``conftest.py``) and when this file is run as
a script.
"""

import math
import time
import timeit
import warnings
from fractions import Fraction

import pytest

from nashwelfare.binary import (
    apply_chain,
    build_swap_graph,
    chain_gain,
    enumerate_chains,
    initial_allocation,
    iteration_cap,
    make_non_wasteful,
    reachable_pairs,
    solve_binary,
)
from nashwelfare.bench import ratio_meets
from nashwelfare.exceptions import BudgetExceededError, InfeasibleError
from nashwelfare.generators import (
    SplitMix64,
    random_binary,
    random_caps,
    random_concave_profile,
    random_identical,
)
from nashwelfare.identical import (
    EFX_RATIO_ACCEPT_RATIONAL,
    EFX_RATIO_LOWER_RATIONAL,
    gen_tight_example,
    greedy_prefixes,
    solve_identical,
    tight_example_allocation,
)
from nashwelfare.model import Allocation, ConcaveProfile, Instance
from nashwelfare.oracle import DEFAULT_BUDGET, brute_force
from nashwelfare.welfare import check_efx, nsw, valued_counts

REPORT: list[str] = []

DENSITIES = (0.3, 0.6, 1.0)
TWO_ROOT_TWO_THIRDS = 2 * math.sqrt(2) / 3


def record(label: str, ok: bool, detail: str) -> None:
    REPORT.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def _binary_corpus():
    """Criterion-1 instances: 120 per density, n in [2,4], m in [2,8]."""
    seeds = SplitMix64(20190101)
    out = []
    for density in DENSITIES:
        for _ in range(120):
            s = seeds.next_u64()
            pick = SplitMix64(s)
            n, m = pick.randint(2, 4), pick.randint(2, 8)
            out.append(random_binary(n, m, density, s))
    return out


def _identical_corpus():
    """Criterion-3 instances: n <= 6, m <= 12, values <= 20."""
    seeds = SplitMix64(1061)
    out = []
    for _ in range(500):
        s = seeds.next_u64()
        pick = SplitMix64(s ^ 0x5DEECE66D)
        n, m = pick.randint(1, 6), pick.randint(1, 12)
        out.append(random_identical(n, m, 20, s))
    return out


@pytest.fixture(scope="module")
def binary_runs():
    """Solver and oracle on the criterion-1 corpus, with the wall time of both."""
    t = time.perf_counter()
    runs = []
    for inst in _binary_corpus():
        opt = brute_force(inst)
        try:
            res = solve_binary(inst)
        except InfeasibleError:
            res = None
        runs.append((inst, opt, res))
    return runs, time.perf_counter() - t


def test_c1_binary_exactness(binary_runs):
    runs, elapsed = binary_runs
    feasible = mismatches = infeasible_wrong = 0
    for inst, opt, res in runs:
        if res is None:
            # no allocation with every agent positive exists
            infeasible_wrong += opt.value.zero_count == 0
            continue
        feasible += 1
        mismatches += res.value != opt.value
    ok = len(runs) >= 300 and mismatches == 0 and infeasible_wrong == 0 and elapsed < 30
    record("C1 binary exactness", ok,
           f"{len(runs)} instances, {feasible} feasible, {mismatches} mismatches, {elapsed:.1f}s")
    assert len(runs) >= 300
    assert mismatches == 0 and infeasible_wrong == 0
    assert elapsed < 30


def test_c2_concave_exactness():
    t = time.perf_counter()
    seeds = SplitMix64(2404)
    checked = mismatches = 0
    for k in range(300):
        s = seeds.next_u64()
        pick = SplitMix64(s ^ 0xC0FFEE)
        n, m = pick.randint(2, 3), pick.randint(2, 7)
        inst = random_binary(n, m, DENSITIES[k % 3], s)
        if k % 2 == 0:
            profile = ConcaveProfile.from_caps(random_caps(n, pick, 1, 3), m)
        else:
            profile = random_concave_profile(n, m, pick)
        opt = brute_force(inst, profile)
        try:
            res = solve_binary(inst, profile=profile)
        except InfeasibleError:
            assert opt.value.zero_count > 0
            continue
        checked += 1
        mismatches += res.value != opt.value
    elapsed = time.perf_counter() - t
    ok = mismatches == 0 and elapsed < 30
    record("C2 concave/budget-additive exactness", ok,
           f"{checked} feasible (caps and concave tables), {mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 30


def test_c3_efx_invariant():
    corpus = _identical_corpus()
    violations = prefixes = 0
    for inst in corpus:
        alloc = solve_identical(inst)
        violations += check_efx(inst, alloc) is not None
        for placed, owner in greedy_prefixes(inst):
            sub_inst = Instance(tuple(tuple(r[j] for j in placed) for r in inst.values))
            sub = Allocation.from_owner([owner[j] for j in placed], inst.num_agents)
            prefixes += 1
            violations += check_efx(sub_inst, sub) is not None
    record("C3 EFx invariant", violations == 0,
           f"{len(corpus)} instances, {prefixes} prefix allocations, {violations} violations")
    assert len(corpus) >= 500
    assert violations == 0


def test_c4_approximation_ratio():
    corpus = _identical_corpus()
    tested = violations = lower_violations = skipped = 0
    worst = math.inf
    for inst in corpus:
        try:
            opt = brute_force(inst, budget=DEFAULT_BUDGET).value
        except BudgetExceededError:
            skipped += 1
            continue
        val = nsw(inst, solve_identical(inst))
        tested += 1
        violations += not ratio_meets(val, opt, EFX_RATIO_ACCEPT_RATIONAL)
        lower_violations += not ratio_meets(val, opt, EFX_RATIO_LOWER_RATIONAL)
        if val.zero_count == 0:
            worst = min(worst, math.exp(val.log() - opt.log()))
    record("C4 approximation ratio (r = 9422/10000)", violations == 0,
           f"{tested} instances within budget ({skipped} over), {violations} violations, "
           f"worst ratio {worst:.6f}; with r = 9420/10000: {lower_violations} violations")
    assert tested > 0
    assert violations == 0
    assert lower_violations == 0


def test_c5_tightness():
    worst_err = 0.0
    bad = []
    for m in range(4, 201, 2):
        inst = gen_tight_example(m)
        alloc = tight_example_allocation(m)
        val = nsw(inst, alloc)
        if m <= 12:
            opt = brute_force(inst).value
        else:
            opt_prod = Fraction(3 * (m - 2), 2) ** 2
            opt = type(val)(0, opt_prod, 2)
        exact = val.positive_product / opt.positive_product == Fraction(8, 9)
        measured = math.exp(val.log() - opt.log())
        err = abs(measured - TWO_ROOT_TWO_THIRDS)
        worst_err = max(worst_err, err)
        if not (exact and err < 1e-9 and check_efx(inst, alloc) is None):
            bad.append(m)
    # 0.942809 is 2*sqrt(2)/3 rounded to six places; the 1e-9 check uses the full value
    record("C5 tightness reproduction", not bad,
           f"m = 4..200 even, ratio^2 == 8/9 exactly, max |ratio - 2*sqrt(2)/3| = {worst_err:.2e} "
           f"(rounded literal 0.942809 is {abs(TWO_ROOT_TWO_THIRDS - 0.942809):.1e} off), failures {bad}")
    assert not bad


def _contraction_failures(inst, opt, start, res):
    """Count steps whose log-gap to the optimum shrinks by less than 1 - 1/m."""
    values = [nsw(inst, start)] + [step.value for step in res.trace]
    if opt.zero_count or any(v.zero_count for v in values):
        return 0, 0
    best, m = opt.log(), inst.num_goods
    failures = 0
    for before, after in zip(values, values[1:]):
        failures += best - after.log() > (1 - 1 / m) * (best - before.log()) + 1e-12
    return len(values) - 1, failures


def test_c6_contraction(binary_runs):
    runs, _ = binary_runs
    checked = failures = 0
    pick = SplitMix64(66)
    for inst, opt, res in runs:
        if res is None:
            continue
        c, f = _contraction_failures(inst, opt.value, initial_allocation(inst), res)
        checked, failures = checked + c, failures + f
        # a random (normalized) start gives longer runs
        owner = [pick.randint(0, inst.num_agents - 1) for _ in range(inst.num_goods)]
        start, _ = make_non_wasteful(inst, Allocation.from_owner(owner, inst.num_agents))
        c, f = _contraction_failures(inst, opt.value, start, solve_binary(inst, start))
        checked, failures = checked + c, failures + f
    record("C6 contraction", failures == 0, f"{checked} accepted iterations checked, {failures} failures")
    assert checked > 0
    assert failures == 0


def test_c7_iteration_cap(binary_runs):
    runs, _ = binary_runs
    solved = over = late = longest = 0
    for inst, _, res in runs:
        if res is None:
            continue
        solved += 1
        cap = iteration_cap(inst.num_agents, inst.num_goods)
        assert res.cap == cap
        over += res.iterations > cap
        late += res.iterations >= cap
        longest = max(longest, res.iterations)
    # reaching the cap without stabilizing raises, so every result here stabilized
    record("C7 iteration cap", over == 0 and late == 0,
           f"{solved} runs, {over} over cap, {late} stabilized only at the cap, longest run {longest} iterations")
    assert over == 0
    assert late == 0


def test_c8_path_invariance():
    seeds = SplitMix64(1)
    states = failures = paths = 0
    while states < 60:
        s = seeds.next_u64()
        pick = SplitMix64(s)
        n, m = pick.randint(2, 4), pick.randint(3, 7)
        inst = random_binary(n, m, 0.6, s)
        owner = [pick.randint(0, n - 1) for _ in range(m)]
        alloc, _ = make_non_wasteful(inst, Allocation.from_owner(owner, n))
        counts = valued_counts(inst, alloc)
        g = build_swap_graph(inst, alloc)
        for u, v in sorted(reachable_pairs(g)):
            if counts[u] == 0 or not chain_gain(counts[u], counts[v]).improves:
                continue
            outcomes = set()
            for chain in enumerate_chains(g, u, v):
                outcomes.add(nsw(inst, apply_chain(alloc, chain, inst)))
                paths += 1
            states += 1
            failures += len(outcomes) != 1
    record("C8 path invariance", failures == 0,
           f"{states} improving (allocation, pair) states, {paths} chains, {failures} disagreements")
    assert states >= 50
    assert failures == 0


def test_c9_complexity_smoke():
    def timed(m):
        inst = Instance(tuple(tuple((j * 7919) % 1000 + 1 for j in range(m)) for _ in range(4)))
        # timeit keeps the cyclic GC off while timing; best of five
        return min(timeit.repeat(lambda: solve_identical(inst), number=1, repeat=5))

    sizes = (10**3, 10**4, 10**5)
    times = [timed(m) for m in sizes]
    ratios = [b / a for a, b in zip(times, times[1:])]
    ok = all(r < 15 for r in ratios)
    record("C9 complexity smoke (informational)", ok,
           "runtime growth per 10x m: " + ", ".join(f"{r:.1f}x" for r in ratios))
    if not ok:
        # informational threshold: reported, not blocking
        warnings.warn(f"identical solver scaled worse than 15x per 10x m: {ratios}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
