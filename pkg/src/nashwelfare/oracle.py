"""Ground truth by exhaustive enumeration of all n**m owner vectors.

Owner vectors are visited in lexicographic order and the first maximizer
wins, so the optimum returned is the lexicographically smallest one. The
inner loop is vectorized over blocks of trailing goods; every assignment is
still scored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import BudgetExceededError, NotBinaryError
from .model import Allocation, ConcaveProfile, Instance, classify
from .welfare import NswValue, nsw, nsw_concave

__all__ = ["OracleResult", "brute_force", "enumerate_nsw_distribution", "DEFAULT_BUDGET"]

DEFAULT_BUDGET = 10**7
_BLOCK = 1 << 16
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class OracleResult:
    best: Allocation
    value: NswValue
    explored: int


def _check_budget(n: int, m: int, budget: int) -> int:
    required = n**m
    if required > budget:
        raise BudgetExceededError(required, budget)
    return required


def _integer_tables(profile: ConcaveProfile) -> np.ndarray:
    """Profile tables times one common denominator.

    The scale must be shared by all agents: products with the same number of
    zero factors then pick up the same power of it.
    """
    scale = math.lcm(*(x.denominator for table in profile.tables for x in table))
    return np.array([[int(x * scale) for x in table] for table in profile.tables], dtype=object)


def _digits(n: int, s: int) -> np.ndarray:
    """All n**s owner vectors of length s, in lexicographic order."""
    idx = np.arange(n**s, dtype=np.int64)
    cols = [(idx // n ** (s - 1 - t)) % n for t in range(s)]
    return np.stack(cols, axis=1) if cols else np.zeros((1, 0), dtype=np.int64)


def brute_force(
    inst: Instance,
    profile: Optional[ConcaveProfile] = None,
    budget: int = DEFAULT_BUDGET,
) -> OracleResult:
    """Exact Nash optimum (under :class:`NswValue` order) by full enumeration."""
    n, m = inst.num_agents, inst.num_goods
    required = _check_budget(n, m, budget)
    if profile is not None and not classify(inst).is_binary:
        raise NotBinaryError("concave-in-cardinality welfare needs a binary instance")

    if profile is None:
        weights = np.array(inst.values, dtype=np.int64)
        bound = math.prod(int(r.sum()) or 1 for r in weights)
        tables = None
    else:
        weights = (np.array(inst.values, dtype=np.int64) > 0).astype(np.int64)
        tables = _integer_tables(profile)
        bound = math.prod(max(int(t) for t in row) or 1 for row in tables)
    dtype = np.int64 if bound < _INT64_SAFE else object
    if tables is not None and dtype is np.int64:
        tables = tables.astype(np.int64)

    s = m if n == 1 else min(m, max(1, int(math.log(_BLOCK) / math.log(n))))
    p = m - s
    suffix = _digits(n, s)  # (n**s, s)
    # per-agent totals contributed by the suffix goods, shape (n**s, n)
    agents = np.arange(n)
    hits = suffix[:, :, None] == agents[None, None, :]
    suffix_totals = (hits * weights[:, p:].T[None, :, :]).sum(axis=1)

    best_key = None
    best_owner = None
    for prefix in itertools.product(range(n), repeat=p):
        base = np.zeros(n, dtype=np.int64)
        for j, a in enumerate(prefix):
            base[a] += weights[a, j]
        totals = suffix_totals + base
        if tables is None:
            factors = totals.astype(dtype)
        else:
            factors = np.stack([tables[i][totals[:, i]] for i in range(n)], axis=1).astype(dtype)
        zeros = (factors == 0).sum(axis=1)
        zmin = int(zeros.min())
        prods = np.where(factors == 0, 1, factors).prod(axis=1)
        prods = np.where(zeros == zmin, prods, -1)
        k = int(np.argmax(prods))
        key = (-zmin, int(prods[k]))
        if best_key is None or key > best_key:
            best_key = key
            best_owner = tuple(prefix) + tuple(int(a) for a in suffix[k])

    best = Allocation.from_owner(best_owner, n)
    value = nsw(inst, best) if profile is None else nsw_concave(inst, profile, best)
    return OracleResult(best, value, required)


def enumerate_nsw_distribution(
    inst: Instance,
    profile: Optional[ConcaveProfile] = None,
    budget: int = DEFAULT_BUDGET,
) -> list[NswValue]:
    """NSW of every owner vector, in lexicographic order of the vectors."""
    n, m = inst.num_agents, inst.num_goods
    _check_budget(n, m, budget)
    out = []
    for owner in itertools.product(range(n), repeat=m):
        alloc = Allocation.from_owner(owner, n)
        out.append(nsw(inst, alloc) if profile is None else nsw_concave(inst, profile, alloc))
    return out
