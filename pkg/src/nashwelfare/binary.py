"""Exact Nash welfare for binary valuations by greedy swap chains.

The swap graph has one vertex per agent and one edge ``u -> v`` for every
good held by ``u`` that ``v`` values. Moving goods one hop along a path
``u -> ... -> v`` takes one valued good from ``u``, gives one to ``v`` and
leaves everybody in between as well off as before. The solver repeatedly
applies the pair ``(u, v)`` whose chain improves NSW the most; when no
chain improves, the allocation is Nash optimal.

The same loop handles valuations that are a concave function of how many
valued goods an agent holds (budget-additive caps being the main example),
by scoring chains with the agent's cardinality table instead of the count.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

from .exceptions import (
    CapExhaustedError,
    InfeasibleError,
    NotBinaryError,
    NotReachableError,
    ProfileError,
    StaleChainError,
)
from .model import Allocation, ConcaveProfile, Instance, classify, validate_allocation
from .welfare import NswValue, nsw_from_factors, valued_counts

__all__ = [
    "SwapGraph",
    "SwapChain",
    "ChainGain",
    "TraceStep",
    "BinaryResult",
    "initial_allocation",
    "make_non_wasteful",
    "build_swap_graph",
    "reachable_pairs",
    "find_chain",
    "enumerate_chains",
    "apply_chain",
    "chain_gain",
    "iteration_cap",
    "solve_binary",
]


@dataclass(frozen=True)
class SwapGraph:
    """``multiplicity[u][v]`` goods held by ``u`` that ``v`` values.

    ``witnesses[(u, v)]`` lists those goods in ascending order.
    """

    num_agents: int
    multiplicity: tuple[tuple[int, ...], ...]
    witnesses: dict = field(compare=False)

    def successors(self, u: int) -> list[int]:
        row = self.multiplicity[u]
        return [v for v in range(self.num_agents) if v != u and row[v] > 0]


@dataclass(frozen=True)
class SwapChain:
    """Agents ``u_1..u_k`` and goods ``j_1..j_{k-1}``; ``j_t`` goes from ``u_t`` to ``u_{t+1}``."""

    agents: tuple[int, ...]
    goods: tuple[int, ...]

    def __post_init__(self):
        if len(self.goods) != len(self.agents) - 1:
            raise ValueError("a chain over k agents moves k-1 goods")
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("chain agents must be distinct")


class ChainGain(NamedTuple):
    """Effect of a chain on NSW, restricted to its two end agents.

    ``zero_reduction`` is how many agents leave zero value (may be negative)
    and ``ratio`` the change of the product of the positive factors.
    Tuple order matches the order of the resulting NSW values.
    """

    zero_reduction: int
    ratio: Fraction

    @property
    def improves(self) -> bool:
        return self.zero_reduction > 0 or (self.zero_reduction == 0 and self.ratio > 1)


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    from_agent: int
    to_agent: int
    path_len: int
    value: NswValue


@dataclass
class BinaryResult:
    allocation: Allocation
    value: NswValue
    trace: list[TraceStep]
    cap: int
    normalized_goods: tuple[int, ...] = ()

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _require_binary(inst: Instance) -> None:
    if not classify(inst).is_binary:
        raise NotBinaryError("instance is not binary")


def _max_matching(inst: Instance) -> list[int]:
    """Agent -> good maximum matching on valued pairs; -1 for unmatched agents.

    One BFS augmenting-path search per agent, goods explored in index order.
    """
    n, m = inst.num_agents, inst.num_goods
    wants = [[j for j in range(m) if inst.values[i][j] > 0] for i in range(n)]
    good_to_agent = [-1] * m
    agent_to_good = [-1] * n
    for root in range(n):
        prev_agent = {}  # good -> agent that reached it
        queue = deque([root])
        seen_agents = {root}
        free_good = -1
        while queue and free_good < 0:
            a = queue.popleft()
            for j in wants[a]:
                if j in prev_agent:
                    continue
                prev_agent[j] = a
                holder = good_to_agent[j]
                if holder < 0:
                    free_good = j
                    break
                if holder not in seen_agents:
                    seen_agents.add(holder)
                    queue.append(holder)
        if free_good < 0:
            continue
        j = free_good
        while True:
            a = prev_agent[j]
            old = agent_to_good[a]
            agent_to_good[a] = j
            good_to_agent[j] = a
            if a == root:
                break
            j = old
    return agent_to_good


def initial_allocation(inst: Instance) -> Allocation:
    """A starting allocation in which every agent holds a good it values.

    Built from a maximum matching between agents and the goods they value.
    Unmatched goods go to the lowest-indexed agent that values them, and
    goods nobody values go to agent 0.

    Raises :class:`InfeasibleError` when no such allocation exists, i.e.
    the optimal NSW is zero.
    """
    _require_binary(inst)
    n, m = inst.num_agents, inst.num_goods
    matched = _max_matching(inst)
    unmatched = [i for i in range(n) if matched[i] < 0]
    if unmatched:
        raise InfeasibleError(unmatched)
    owner = [-1] * m
    for i, j in enumerate(matched):
        owner[j] = i
    for j in range(m):
        if owner[j] < 0:
            owner[j] = next((i for i in range(n) if inst.values[i][j] > 0), 0)
    return Allocation.from_owner(owner, n)


def make_non_wasteful(inst: Instance, alloc: Allocation) -> tuple[Allocation, tuple[int, ...]]:
    """Hand every wastefully placed good to the lowest agent that values it.

    Returns the new allocation and the goods that moved. Goods nobody values
    stay where they are. No agent loses value.
    """
    owner = list(alloc.owner)
    moved = []
    for j, a in enumerate(owner):
        if inst.values[a][j] > 0:
            continue
        taker = next((i for i in range(inst.num_agents) if inst.values[i][j] > 0), None)
        if taker is not None:
            owner[j] = taker
            moved.append(j)
    if not moved:
        return alloc, ()
    return Allocation.from_owner(owner, inst.num_agents), tuple(moved)


def build_swap_graph(inst: Instance, alloc: Allocation) -> SwapGraph:
    n = inst.num_agents
    mult = [[0] * n for _ in range(n)]
    witnesses: dict[tuple[int, int], list[int]] = {}
    for j, u in enumerate(alloc.owner):
        for v in range(n):
            if v != u and inst.values[v][j] > 0:
                mult[u][v] += 1
                witnesses.setdefault((u, v), []).append(j)
    return SwapGraph(
        n,
        tuple(tuple(r) for r in mult),
        {k: tuple(w) for k, w in witnesses.items()},
    )


def _bfs(g: SwapGraph, source: int) -> dict[int, int]:
    """Parent pointers of a BFS tree from ``source``; neighbors in index order."""
    parent = {source: -1}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.successors(u):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return parent


def reachable_pairs(g: SwapGraph) -> set[tuple[int, int]]:
    pairs = set()
    for u in range(g.num_agents):
        pairs.update((u, v) for v in _bfs(g, u) if v != u)
    return pairs


def find_chain(g: SwapGraph, u: int, v: int) -> SwapChain:
    """Shortest chain from ``u`` to ``v``, moving the lowest-index witness on each hop."""
    parent = _bfs(g, u)
    if u == v or v not in parent:
        raise NotReachableError(f"agent {v + 1} is not reachable from agent {u + 1}")
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    path.reverse()
    goods = tuple(g.witnesses[(a, b)][0] for a, b in zip(path, path[1:]))
    return SwapChain(tuple(path), goods)


def enumerate_chains(g: SwapGraph, u: int, v: int) -> Iterator[SwapChain]:
    """Every simple path from ``u`` to ``v`` with every choice of witness goods."""

    def paths(prefix):
        last = prefix[-1]
        if last == v:
            yield tuple(prefix)
            return
        for w in g.successors(last):
            if w not in prefix:
                prefix.append(w)
                yield from paths(prefix)
                prefix.pop()

    if u == v:
        return
    for path in paths([u]):
        hops = [g.witnesses[(a, b)] for a, b in zip(path, path[1:])]
        for goods in itertools.product(*hops):
            yield SwapChain(path, goods)


def apply_chain(alloc: Allocation, chain: SwapChain, inst: Optional[Instance] = None) -> Allocation:
    """Move each chain good one hop forward.

    With ``inst`` given, also checks that only the two end agents changed
    their number of valued goods (first one down, last one up).
    """
    owner = list(alloc.owner)
    for a, j in zip(chain.agents, chain.goods):
        if not 0 <= j < len(owner) or owner[j] != a:
            raise StaleChainError(f"good {j + 1} is not held by agent {a + 1}")
    for a, j in zip(chain.agents[1:], chain.goods):
        owner[j] = a
    new = Allocation.from_owner(owner, alloc.num_agents)
    if inst is not None:
        before = valued_counts(inst, alloc)
        after = valued_counts(inst, new)
        expected = list(before)
        expected[chain.agents[0]] -= 1
        expected[chain.agents[-1]] += 1
        if after != expected:
            raise StaleChainError("chain changed valued counts of intermediate agents")
    return new


def chain_gain(
    counts_u: int,
    counts_v: int,
    profile: Optional[ConcaveProfile] = None,
    u: int = 0,
    v: int = 0,
) -> ChainGain:
    """Score moving one valued good's worth from ``u`` to ``v``.

    Additive binary: ``((k_u - 1)(k_v + 1)) / (k_u k_v)`` on positive
    factors. With a profile the counts are passed through ``f_u``, ``f_v``.
    """
    if profile is None:
        fu0, fu1 = Fraction(counts_u), Fraction(counts_u - 1)
        fv0, fv1 = Fraction(counts_v), Fraction(counts_v + 1)
    else:
        fu0, fu1 = profile.value(u, counts_u), profile.value(u, counts_u - 1)
        fv0, fv1 = profile.value(v, counts_v), profile.value(v, counts_v + 1)
    zero_before = (fu0 == 0) + (fv0 == 0)
    zero_after = (fu1 == 0) + (fv1 == 0)
    num = (fu1 or 1) * (fv1 or 1)
    den = (fu0 or 1) * (fv0 or 1)
    return ChainGain(zero_before - zero_after, Fraction(num) / Fraction(den))


def iteration_cap(n: int, m: int) -> int:
    """``ceil(2 m (n + 1) ln(n m))``, at least 1."""
    if n * m < 2:
        return 1
    return max(1, math.ceil(2 * m * (n + 1) * math.log(n * m)))


def _value(counts, profile) -> NswValue:
    if profile is None:
        return nsw_from_factors(counts)
    return nsw_from_factors(profile.value(i, k) for i, k in enumerate(counts))


def _best_pair(g: SwapGraph, counts, profile):
    best = None
    best_gain = None
    for u, v in sorted(reachable_pairs(g)):
        if counts[u] == 0:
            continue
        gain = chain_gain(counts[u], counts[v], profile, u, v)
        if gain.improves and (best_gain is None or gain > best_gain):
            best, best_gain = (u, v), gain
    return best


def solve_binary(
    inst: Instance,
    start: Optional[Allocation] = None,
    profile: Optional[ConcaveProfile] = None,
) -> BinaryResult:
    """Nash optimal allocation for a binary instance.

    Starts from ``start`` (made non-wasteful first) or from
    :func:`initial_allocation`. Each accepted step applies the chain of the
    most improving reachable pair, ties going to the smallest ``(u, v)``.
    Stops at the first allocation without an improving pair.
    """
    _require_binary(inst)
    n, m = inst.num_agents, inst.num_goods
    if profile is not None and (profile.num_agents != n or profile.num_goods != m):
        raise ProfileError("profile size does not match the instance")
    if start is None:
        alloc = initial_allocation(inst)
        moved = ()
    else:
        validate_allocation(inst, start)
        alloc, moved = make_non_wasteful(inst, start)

    cap = iteration_cap(n, m)
    counts = valued_counts(inst, alloc)
    trace: list[TraceStep] = []
    for it in range(1, cap + 1):
        g = build_swap_graph(inst, alloc)
        pair = _best_pair(g, counts, profile)
        if pair is None:
            return BinaryResult(alloc, _value(counts, profile), trace, cap, moved)
        u, v = pair
        chain = find_chain(g, u, v)
        alloc = apply_chain(alloc, chain)
        counts[u] -= 1
        counts[v] += 1
        trace.append(TraceStep(it, u, v, len(chain.agents), _value(counts, profile)))

    if _best_pair(build_swap_graph(inst, alloc), counts, profile) is not None:
        raise CapExhaustedError(cap, alloc, trace)
    return BinaryResult(alloc, _value(counts, profile), trace, cap, moved)
