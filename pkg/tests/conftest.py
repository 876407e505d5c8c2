import itertools
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from nashwelfare.model import Allocation, ConcaveProfile, Instance


def naive_optimum(inst, profile=None):
    """Plain-Python reference: best (zeros, product) over all owner vectors.

    Deliberately shares no code with the package's NSW machinery.
    """
    n, m = inst.num_agents, inst.num_goods
    best = None
    best_owner = None
    for owner in itertools.product(range(n), repeat=m):
        factors = []
        for i in range(n):
            if profile is None:
                factors.append(sum(inst.values[i][j] for j in range(m) if owner[j] == i))
            else:
                k = sum(1 for j in range(m) if owner[j] == i and inst.values[i][j] > 0)
                factors.append(profile.tables[i][k])
        zeros = sum(1 for f in factors if f == 0)
        prod = Fraction(1)
        for f in factors:
            if f:
                prod *= f
        key = (-zeros, prod)
        if best is None or key > best:
            best, best_owner = key, owner
    return -best[0], best[1], best_owner


@st.composite
def binary_instances(draw, max_n=4, max_m=6):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m), min_size=n, max_size=n))
    return Instance(tuple(tuple(r) for r in rows))


@st.composite
def identical_instances(draw, max_n=6, max_m=12, max_value=20):
    n = draw(st.integers(1, max_n))
    row = draw(st.lists(st.integers(1, max_value), min_size=1, max_size=max_m))
    return Instance((tuple(row),) * n)


@st.composite
def additive_instances(draw, max_n=3, max_m=5, max_value=5):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    rows = draw(st.lists(st.lists(st.integers(0, max_value), min_size=m, max_size=m), min_size=n, max_size=n))
    return Instance(tuple(tuple(r) for r in rows))


@st.composite
def owners_for(draw, inst):
    return Allocation.from_owner(
        draw(st.lists(st.integers(0, inst.num_agents - 1), min_size=inst.num_goods, max_size=inst.num_goods)),
        inst.num_agents,
    )


@st.composite
def concave_profiles(draw, n, m):
    tables = []
    for _ in range(n):
        den = draw(st.integers(1, 3))
        steps = sorted(draw(st.lists(st.integers(0, 5), min_size=m, max_size=m)), reverse=True)
        if steps[0] == 0:
            steps[0] = 1
        f = [Fraction(0)]
        for d in steps:
            f.append(f[-1] + Fraction(d, den))
        tables.append(f)
    return ConcaveProfile(tables)


@pytest.fixture
def tiny_three_agent():
    # A_1 = {g1, g3}, A_2 = {g2}, A_3 = {}; G_1 = {g1, g3}, G_2 = {g1, g2}, G_3 = {g2}
    inst = Instance(((1, 0, 1), (1, 1, 0), (0, 1, 0)))
    alloc = Allocation.from_owner([0, 1, 0], 3)
    return inst, alloc


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
