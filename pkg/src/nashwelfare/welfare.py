"""Exact Nash social welfare values and envy checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Optional

from .exceptions import NotBinaryError, ProfileError
from .model import Allocation, ConcaveProfile, Instance, classify

__all__ = [
    "NswValue",
    "EnvyWitness",
    "nsw",
    "nsw_concave",
    "nsw_from_factors",
    "compare",
    "check_efx",
    "check_ef",
    "bundle_values",
]


@total_ordering
@dataclass(frozen=True)
class NswValue:
    """Nash social welfare kept as (number of zero factors, product of the rest).

    More zero factors is always worse; with equal zero counts the larger
    product wins. Since the n-th root is monotone this is the NSW order
    whenever nobody is at zero, and it extends it to starved allocations.
    """

    zero_count: int
    positive_product: Fraction
    num_agents: int

    def __post_init__(self):
        object.__setattr__(self, "positive_product", Fraction(self.positive_product))
        if not 0 <= self.zero_count <= self.num_agents:
            raise ValueError("zero_count must lie in [0, num_agents]")
        if self.positive_product <= 0:
            raise ValueError("positive_product must be > 0")

    def _key(self, other: "NswValue"):
        if not isinstance(other, NswValue):
            return NotImplemented
        if other.num_agents != self.num_agents:
            raise ValueError(f"cannot compare NSW over {self.num_agents} and {other.num_agents} agents")
        return True

    def __eq__(self, other):
        if self._key(other) is NotImplemented:
            return NotImplemented
        return self.zero_count == other.zero_count and self.positive_product == other.positive_product

    def __lt__(self, other):
        if self._key(other) is NotImplemented:
            return NotImplemented
        if self.zero_count != other.zero_count:
            return self.zero_count > other.zero_count
        return self.positive_product < other.positive_product

    def __hash__(self):
        return hash((self.zero_count, self.positive_product, self.num_agents))

    @property
    def is_positive(self) -> bool:
        return self.zero_count == 0

    def log(self) -> float:
        """ln NSW; -inf when some agent is at zero."""
        if self.zero_count:
            return -math.inf
        p = self.positive_product
        return (math.log(p.numerator) - math.log(p.denominator)) / self.num_agents

    def to_float(self) -> float:
        if self.zero_count:
            return 0.0
        return math.exp(self.log())

    def report(self) -> str:
        p = self.positive_product
        return (
            f"NSW = {self.to_float():.12g} (product = {p.numerator}/{p.denominator}, "
            f"zeros = {self.zero_count}, n = {self.num_agents})"
        )

    __str__ = report


def nsw_from_factors(factors: Iterable) -> NswValue:
    zeros = 0
    prod = Fraction(1)
    n = 0
    for f in factors:
        n += 1
        if f == 0:
            zeros += 1
        else:
            prod *= f
    return NswValue(zeros, prod, n)


def bundle_values(inst: Instance, alloc: Allocation) -> list[int]:
    return [inst.bundle_value(i, b) for i, b in enumerate(alloc.bundles)]


def nsw(inst: Instance, alloc: Allocation) -> NswValue:
    return nsw_from_factors(bundle_values(inst, alloc))


def valued_counts(inst: Instance, alloc: Allocation) -> list[int]:
    """Number of positively valued goods each agent holds."""
    return [sum(1 for j in b if inst.values[i][j] > 0) for i, b in enumerate(alloc.bundles)]


def nsw_concave(inst: Instance, profile: ConcaveProfile, alloc: Allocation) -> NswValue:
    if not classify(inst).is_binary:
        raise NotBinaryError("concave-in-cardinality welfare needs a binary instance")
    if profile.num_agents != inst.num_agents or profile.num_goods != inst.num_goods:
        raise ProfileError(
            f"profile covers {profile.num_agents} agents / {profile.num_goods} goods, "
            f"instance has {inst.num_agents} / {inst.num_goods}"
        )
    counts = valued_counts(inst, alloc)
    return nsw_from_factors(profile.value(i, k) for i, k in enumerate(counts))


def compare(a: NswValue, b: NswValue) -> int:
    """-1, 0 or 1 as ``a`` is worse than, equal to or better than ``b``."""
    if a.num_agents != b.num_agents:
        raise ValueError(f"cannot compare NSW over {a.num_agents} and {b.num_agents} agents")
    if a == b:
        return 0
    return -1 if a < b else 1


@dataclass(frozen=True)
class EnvyWitness:
    """Agent ``envier`` prefers the bundle of ``envied``.

    With ``dropped_good`` set, the envy survives removing that good from the
    envied bundle (an EFx violation); otherwise it is plain envy.
    """

    envier: int
    envied: int
    dropped_good: Optional[int] = None

    def describe(self) -> str:
        msg = f"agent {self.envier + 1} envies agent {self.envied + 1}"
        if self.dropped_good is not None:
            msg += f" even without good {self.dropped_good + 1}"
        return msg


def check_efx(inst: Instance, alloc: Allocation) -> Optional[EnvyWitness]:
    """Return ``None`` if ``alloc`` is EFx, else the first violation found.

    Every good the envier values in the other bundle is tried, in index
    order, not just the cheapest one.
    """
    n = inst.num_agents
    for i in range(n):
        row = inst.values[i]
        own = inst.bundle_value(i, alloc.bundles[i])
        for k in range(n):
            if k == i:
                continue
            other = inst.bundle_value(i, alloc.bundles[k])
            if other <= own:
                continue
            for j in sorted(alloc.bundles[k]):
                if row[j] > 0 and other - row[j] > own:
                    return EnvyWitness(i, k, j)
    return None


def check_ef(inst: Instance, alloc: Allocation) -> Optional[EnvyWitness]:
    n = inst.num_agents
    for i in range(n):
        own = inst.bundle_value(i, alloc.bundles[i])
        for k in range(n):
            if k != i and inst.bundle_value(i, alloc.bundles[k]) > own:
                return EnvyWitness(i, k)
    return None
