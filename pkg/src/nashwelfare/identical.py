"""Greedy allocation for identical additive valuations.

Goods are handed out from most to least valuable, each to the currently
poorest agent. The result is EFx, and every EFx allocation under identical
valuations is within a factor (e ln 2)/2 of the Nash optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exceptions import NotIdenticalError
from .model import Allocation, Instance, classify

__all__ = [
    "IdenticalView",
    "identical_view",
    "solve_identical",
    "greedy_prefixes",
    "efx_ratio_bound",
    "efx_ratio_bound_decimal",
    "EFX_RATIO_BOUND",
    "EFX_RATIO_SYMBOLIC",
    "EFX_RATIO_ACCEPT_RATIONAL",
    "EFX_RATIO_LOWER_RATIONAL",
    "gen_tight_example",
    "tight_example_allocation",
]

EFX_RATIO_SYMBOLIC = "e*log(2)/2"
EFX_RATIO_BOUND = math.e * math.log(2) / 2
# exact-arithmetic stand-ins for the bound: the acceptance threshold r and a
# rational that is provably below (e ln 2)/2 = 0.94208...
EFX_RATIO_ACCEPT_RATIONAL = Fraction(9422, 10000)
EFX_RATIO_LOWER_RATIONAL = Fraction(9420, 10000)


@dataclass(frozen=True)
class IdenticalView:
    common_values: tuple[int, ...]
    descending_order: tuple[int, ...]
    zero_goods: tuple[int, ...]


def identical_view(inst: Instance) -> IdenticalView:
    if not classify(inst).is_identical:
        raise NotIdenticalError("instance is not identical")
    values = inst.values[0]
    positive = [j for j, x in enumerate(values) if x > 0]
    # stable sort: equal values keep ascending index order
    order = sorted(positive, key=lambda j: -values[j])
    zero = tuple(j for j, x in enumerate(values) if x == 0)
    return IdenticalView(tuple(values), tuple(order), zero)


def _greedy(inst: Instance, on_step=None) -> Allocation:
    view = identical_view(inst)
    n = inst.num_agents
    totals = [0] * n
    owner = [-1] * inst.num_goods
    for j in view.descending_order:
        # linear scan; min() keeps the first (lowest-index) minimum
        i = min(range(n), key=totals.__getitem__)
        owner[j] = i
        totals[i] += view.common_values[j]
        if on_step is not None:
            on_step(j, i, tuple(owner))
    for j in view.zero_goods:
        owner[j] = 0
    return Allocation.from_owner(owner, n)


def solve_identical(inst: Instance) -> Allocation:
    """Greedy allocation for an instance whose rows are all equal.

    Ties between equally valuable goods go by ascending good index, ties
    between equally poor agents to the lowest agent index. Goods worth 0
    are placed with agent 0 after the greedy pass.

    >>> from nashwelfare.model import Instance
    >>> solve_identical(Instance(((5, 4, 3, 2), (5, 4, 3, 2)))).owner
    (0, 1, 1, 0)
    """
    return _greedy(inst)


def greedy_prefixes(inst: Instance) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Partial assignments after each greedy step.

    Each entry is ``(placed_goods, owner)`` where ``owner`` uses -1 for goods
    not yet handed out.
    """
    out = []
    placed: list[int] = []

    def record(j, _i, owner):
        placed.append(j)
        out.append((tuple(placed), owner))

    _greedy(inst, on_step=record)
    return out


def efx_ratio_bound() -> float:
    """Worst-case NSW(EFx) / NSW(optimum) for identical valuations: (e ln 2)/2."""
    return EFX_RATIO_BOUND


def efx_ratio_bound_decimal(digits: int = 30) -> str:
    """(e ln 2)/2 as a decimal string with ``digits`` significant digits."""
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.e * mpmath.log(2) / 2, digits)


def gen_tight_example(m: int) -> Instance:
    """Two agents, two goods worth m-2 and m-2 goods worth 1.

    The allocation from :func:`tight_example_allocation` is EFx yet only
    reaches 2*sqrt(2)/3 of the optimal NSW, for every even m >= 4.
    """
    if not isinstance(m, int) or m < 4 or m % 2:
        raise ValueError(f"m must be an even integer >= 4, got {m!r}")
    row = (m - 2, m - 2) + (1,) * (m - 2)
    return Instance((row, row), generator={"family": "tight-efx", "m": m})


def tight_example_allocation(m: int) -> Allocation:
    """Both big goods to agent 0, all unit goods to agent 1."""
    return Allocation.from_owner([0, 0] + [1] * (m - 2), 2)
