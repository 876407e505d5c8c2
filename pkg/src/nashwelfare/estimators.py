"""scikit-learn style wrappers around the solvers.

``X`` is the valuation matrix with one row per agent and one column per
good. ``fit`` computes an allocation; ``fit_predict`` returns the owner of
each good, the way a clusterer returns a label per sample.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .binary import solve_binary
from .identical import solve_identical
from .model import Allocation, ConcaveProfile, Instance, validate_allocation
from .oracle import DEFAULT_BUDGET, brute_force
from .welfare import nsw, nsw_concave


def check_valuations(X) -> Instance:
    """Validate a valuation matrix and wrap it as an :class:`Instance`."""
    X = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=1, ensure_min_features=1)
    if not np.issubdtype(X.dtype, np.number) or np.issubdtype(X.dtype, np.complexfloating):
        raise ValueError("valuations must be numeric")
    if np.issubdtype(X.dtype, np.floating) and not np.all(np.mod(X, 1) == 0):
        raise ValueError("valuations must be integers")
    if (X < 0).any():
        raise ValueError("valuations must be non-negative")
    return Instance(tuple(tuple(int(x) for x in row) for row in X))


def _profile(inst: Instance, caps, concave):
    if caps is not None and concave is not None:
        raise ValueError("caps and concave are mutually exclusive")
    if caps is not None:
        return ConcaveProfile.from_caps([int(c) for c in caps], inst.num_goods)
    if concave is not None:
        prof = concave if isinstance(concave, ConcaveProfile) else ConcaveProfile(concave)
        if prof.num_agents != inst.num_agents or prof.num_goods != inst.num_goods:
            raise ValueError("concave tables do not match the valuation matrix")
        return prof
    return None


class _AllocatorMixin:
    def _store(self, inst, alloc, value):
        self.allocation_ = alloc
        self.labels_ = np.array(alloc.owner, dtype=np.intp)
        self.nsw_ = value
        self.n_agents_ = inst.num_agents
        self.n_goods_ = inst.num_goods
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def score(self, X, y=None):
        """NSW (as a float) of the fitted allocation under valuations ``X``."""
        check_is_fitted(self, "allocation_")
        inst = check_valuations(X)
        validate_allocation(inst, self.allocation_)
        if self.profile_ is not None:
            return nsw_concave(inst, self.profile_, self.allocation_).to_float()
        return nsw(inst, self.allocation_).to_float()


class GreedyIdenticalAllocator(_AllocatorMixin, BaseEstimator):
    """Greedy allocation for identical valuations (all rows of ``X`` equal)."""

    def fit(self, X, y=None):
        inst = check_valuations(X)
        self.profile_ = None
        alloc = solve_identical(inst)
        return self._store(inst, alloc, nsw(inst, alloc))


class BinaryNashAllocator(_AllocatorMixin, BaseEstimator):
    """Exact Nash optimum for 0/1 valuations, optionally capped or concave.

    Parameters
    ----------
    caps : sequence of int, optional
        Budget-additive utility caps, one per agent.
    concave : ConcaveProfile or nested sequence, optional
        Per-agent tables ``f_i(0..m)`` of value by number of valued goods.
    start : sequence of int, optional
        Starting owner vector (0-indexed); defaults to a matching-based start.
    """

    def __init__(self, caps=None, concave=None, start=None):
        self.caps = caps
        self.concave = concave
        self.start = start

    def fit(self, X, y=None):
        inst = check_valuations(X)
        self.profile_ = _profile(inst, self.caps, self.concave)
        start = None
        if self.start is not None:
            start = Allocation.from_owner(self.start, inst.num_agents)
        res = solve_binary(inst, start, self.profile_)
        self.trace_ = res.trace
        self.n_iter_ = res.iterations
        return self._store(inst, res.allocation, res.value)


class BruteForceAllocator(_AllocatorMixin, BaseEstimator):
    """Nash optimum by exhaustive enumeration; only for small instances."""

    def __init__(self, budget=DEFAULT_BUDGET, caps=None, concave=None):
        self.budget = budget
        self.caps = caps
        self.concave = concave

    def fit(self, X, y=None):
        inst = check_valuations(X)
        self.profile_ = _profile(inst, self.caps, self.concave)
        res = brute_force(inst, self.profile_, budget=self.budget)
        self.n_explored_ = res.explored
        return self._store(inst, res.best, res.value)
