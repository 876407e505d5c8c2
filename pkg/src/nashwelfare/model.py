"""Instances, allocations and cardinality profiles, plus their file formats.

Agents and goods are 0-indexed everywhere in Python. Documents on disk are
1-indexed; :func:`parse_instance`, :func:`parse_allocation` and their
serializers are the only places that translate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    DoublyAllocatedGoodError,
    MalformedDocumentError,
    NegativeEntryError,
    ProfileError,
    UnallocatedGoodError,
    ViewInconsistencyError,
)

__all__ = [
    "Instance",
    "InstanceClass",
    "Allocation",
    "ConcaveProfile",
    "classify",
    "validate_allocation",
    "parse_instance",
    "serialize_instance",
    "parse_allocation",
    "serialize_allocation",
    "load_instance",
]


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


@dataclass(frozen=True)
class ConcaveProfile:
    """Per-agent valuation as a function of how many valued goods it holds.

    ``tables[i][k]`` is the value agent ``i`` derives from ``k`` goods it
    values. Every table starts at 0, is nondecreasing and concave, and has
    ``tables[i][1] > 0``.
    """

    tables: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        tables = tuple(tuple(Fraction(x) for x in row) for row in self.tables)
        object.__setattr__(self, "tables", tables)
        if not tables:
            raise ProfileError("profile needs at least one agent")
        width = len(tables[0])
        if width < 2:
            raise ProfileError("each table needs entries for 0..m with m >= 1")
        for i, f in enumerate(tables):
            if len(f) != width:
                raise ProfileError(f"table of agent {i + 1} has {len(f)} entries, expected {width}")
            if f[0] != 0:
                raise ProfileError(f"table of agent {i + 1} must start at 0")
            if f[1] <= 0:
                raise ProfileError(f"table of agent {i + 1} must be positive at 1")
            for k in range(width - 1):
                if f[k + 1] < f[k]:
                    raise ProfileError(f"table of agent {i + 1} decreases at {k + 1}")
            for k in range(1, width - 1):
                if f[k + 1] - f[k] > f[k] - f[k - 1]:
                    raise ProfileError(f"table of agent {i + 1} is not concave at {k}")

    @property
    def num_agents(self) -> int:
        return len(self.tables)

    @property
    def num_goods(self) -> int:
        return len(self.tables[0]) - 1

    def value(self, agent: int, count: int) -> Fraction:
        return self.tables[agent][count]

    @classmethod
    def from_caps(cls, caps: Sequence[int], num_goods: int) -> "ConcaveProfile":
        """Budget-additive binary utilities: ``f_i(k) = min(c_i, k)``."""
        if any(not _is_int(c) and not isinstance(c, Fraction) for c in caps):
            raise ProfileError("caps must be integers")
        if any(c <= 0 for c in caps):
            raise ProfileError("caps must be positive")
        return cls(tuple(tuple(min(Fraction(c), k) for k in range(num_goods + 1)) for c in caps))

    @classmethod
    def identity(cls, num_agents: int, num_goods: int) -> "ConcaveProfile":
        return cls(tuple(tuple(Fraction(k) for k in range(num_goods + 1)) for _ in range(num_agents)))


@dataclass(frozen=True)
class InstanceClass:
    is_binary: bool
    is_identical: bool


@dataclass(frozen=True)
class Instance:
    """A fair-division instance with additive non-negative integer values.

    ``values[i][j]`` is agent ``i``'s value for good ``j``. Optional
    ``caps`` or ``concave`` tables turn a binary instance into a
    budget-additive or concave-in-cardinality one; they are mutually
    exclusive. ``generator`` records where a generated instance came from.
    """

    values: tuple[tuple[int, ...], ...]
    caps: tuple[int, ...] | None = None
    concave: ConcaveProfile | None = None
    generator: dict | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        try:
            values = tuple(tuple(row) for row in self.values)
        except TypeError as exc:
            raise MalformedDocumentError("valuations must be a list of rows") from exc
        object.__setattr__(self, "values", values)
        if not values:
            raise DimensionMismatchError("an instance needs at least one agent")
        m = len(values[0])
        if m == 0:
            raise DimensionMismatchError("an instance needs at least one good")
        for i, row in enumerate(values):
            if len(row) != m:
                raise DimensionMismatchError(f"row {i + 1} has {len(row)} entries, expected {m}")
            for j, x in enumerate(row):
                if not _is_int(x):
                    raise MalformedDocumentError(f"value of agent {i + 1} for good {j + 1} is not an integer")
                if x < 0:
                    raise NegativeEntryError(f"value of agent {i + 1} for good {j + 1} is negative ({x})")
        if self.caps is not None and self.concave is not None:
            raise MalformedDocumentError("caps and concave are mutually exclusive")
        if self.caps is not None:
            caps = tuple(self.caps)
            object.__setattr__(self, "caps", caps)
            if len(caps) != len(values):
                raise DimensionMismatchError(f"{len(caps)} caps for {len(values)} agents")
            ConcaveProfile.from_caps(caps, m)
        if self.concave is not None:
            prof = self.concave
            if not isinstance(prof, ConcaveProfile):
                prof = ConcaveProfile(prof)
                object.__setattr__(self, "concave", prof)
            if prof.num_agents != len(values) or prof.num_goods != m:
                raise DimensionMismatchError(
                    f"concave tables are {prof.num_agents}x{prof.num_goods + 1}, expected {len(values)}x{m + 1}"
                )

    @property
    def num_agents(self) -> int:
        return len(self.values)

    @property
    def num_goods(self) -> int:
        return len(self.values[0])

    @property
    def desire_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(j for j, x in enumerate(row) if x > 0) for row in self.values)

    @property
    def profile(self) -> ConcaveProfile | None:
        """The cardinality profile implied by ``caps`` or ``concave``, if any."""
        if self.concave is not None:
            return self.concave
        if self.caps is not None:
            return ConcaveProfile.from_caps(self.caps, self.num_goods)
        return None

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)

    def bundle_value(self, agent: int, goods: Iterable[int]) -> int:
        row = self.values[agent]
        return sum(row[j] for j in goods)

    def with_profile(self, caps=None, concave=None) -> "Instance":
        return Instance(self.values, caps=caps, concave=concave, generator=self.generator)


def classify(inst: Instance) -> InstanceClass:
    values = inst.values
    is_binary = all(x in (0, 1) for row in values for x in row)
    first = values[0]
    is_identical = all(row == first for row in values[1:])
    return InstanceClass(is_binary=is_binary, is_identical=is_identical)


@dataclass(frozen=True)
class Allocation:
    """An assignment of goods to agents, held in two views.

    ``bundles[i]`` is the set of goods of agent ``i`` and ``owner[j]`` the
    agent holding good ``j``. Build allocations with :meth:`from_owner` or
    :meth:`from_bundles`; :func:`validate_allocation` checks that they form
    an n-partition and that the views agree.
    """

    bundles: tuple[frozenset[int], ...]
    owner: tuple[int, ...]

    @classmethod
    def from_owner(cls, owner: Sequence[int], num_agents: int) -> "Allocation":
        owner = tuple(int(a) for a in owner)
        bundles = [set() for _ in range(num_agents)]
        for j, a in enumerate(owner):
            if not 0 <= a < num_agents:
                raise ViewInconsistencyError(f"good {j + 1} assigned to unknown agent {a + 1}")
            bundles[a].add(j)
        return cls(tuple(frozenset(b) for b in bundles), owner)

    @classmethod
    def from_bundles(cls, bundles: Sequence[Iterable[int]], num_goods: int) -> "Allocation":
        """Derive the owner view; unplaced goods get owner -1."""
        bundles = tuple(frozenset(b) for b in bundles)
        owner = [-1] * num_goods
        for i, b in enumerate(bundles):
            for j in b:
                if 0 <= j < num_goods and owner[j] == -1:
                    owner[j] = i
        return cls(bundles, tuple(owner))

    @property
    def num_agents(self) -> int:
        return len(self.bundles)

    @property
    def num_goods(self) -> int:
        return len(self.owner)

    def move(self, good: int, to_agent: int) -> "Allocation":
        owner = list(self.owner)
        owner[good] = to_agent
        return Allocation.from_owner(owner, self.num_agents)


def validate_allocation(inst: Instance, alloc: Allocation) -> None:
    """Raise unless ``alloc`` is an n-partition of the goods of ``inst``."""
    n, m = inst.num_agents, inst.num_goods
    if len(alloc.bundles) != n:
        raise ViewInconsistencyError(f"allocation has {len(alloc.bundles)} bundles for {n} agents")
    if len(alloc.owner) != m:
        raise ViewInconsistencyError(f"owner map covers {len(alloc.owner)} goods, instance has {m}")
    seen: dict[int, int] = {}
    for i, bundle in enumerate(alloc.bundles):
        for j in sorted(bundle):
            if not 0 <= j < m:
                raise ViewInconsistencyError(f"bundle of agent {i + 1} holds unknown good {j + 1}")
            if j in seen:
                raise DoublyAllocatedGoodError(f"good {j + 1} is held by agents {seen[j] + 1} and {i + 1}")
            seen[j] = i
    for j in range(m):
        if j not in seen:
            raise UnallocatedGoodError(f"good {j + 1} is not allocated")
    for j, a in enumerate(alloc.owner):
        if seen[j] != a:
            raise ViewInconsistencyError(f"good {j + 1} is in bundle {seen[j] + 1} but owner map says {a + 1}")


# -- documents ---------------------------------------------------------------

_INSTANCE_KEYS = {"agents", "goods", "valuations", "caps", "concave", "generator"}


def _parse_fraction(x) -> Fraction:
    if _is_int(x):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedDocumentError(f"bad rational {x!r}") from exc
    raise MalformedDocumentError(f"bad rational {x!r}")


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocumentError("instance document must be a JSON object")
    unknown = set(doc) - _INSTANCE_KEYS
    if unknown:
        raise MalformedDocumentError(f"unknown keys: {sorted(unknown)}")
    for key in ("agents", "goods", "valuations"):
        if key not in doc:
            raise MalformedDocumentError(f"missing key {key!r}")
    n, m, rows = doc["agents"], doc["goods"], doc["valuations"]
    if not _is_int(n) or n < 1 or not _is_int(m) or m < 1:
        raise MalformedDocumentError("agents and goods must be positive integers")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedDocumentError("valuations must be a list of lists")
    if len(rows) != n:
        raise DimensionMismatchError(f"{len(rows)} valuation rows for {n} agents")
    for i, row in enumerate(rows):
        if len(row) != m:
            raise DimensionMismatchError(f"row {i + 1} has {len(row)} entries, expected {m}")
    caps = doc.get("caps")
    if caps is not None:
        if not isinstance(caps, list) or not all(_is_int(c) for c in caps):
            raise MalformedDocumentError("caps must be a list of integers")
        if any(c <= 0 for c in caps):
            raise MalformedDocumentError("caps must be positive")
        caps = tuple(caps)
    concave = doc.get("concave")
    if concave is not None:
        if not isinstance(concave, list) or not all(isinstance(r, list) for r in concave):
            raise MalformedDocumentError("concave must be a list of lists")
        concave = ConcaveProfile(tuple(tuple(_parse_fraction(x) for x in r) for r in concave))
    generator = doc.get("generator")
    if generator is not None and not isinstance(generator, dict):
        raise MalformedDocumentError("generator must be an object")
    return Instance(tuple(tuple(r) for r in rows), caps=caps, concave=concave, generator=generator)


def _row(items) -> str:
    return "[" + ", ".join(items) + "]"


def serialize_instance(inst: Instance) -> str:
    """Canonical document: fixed key order, one matrix row per line."""
    parts = [
        f'  "agents": {inst.num_agents}',
        f'  "goods": {inst.num_goods}',
        '  "valuations": [\n' + ",\n".join("    " + _row(str(x) for x in r) for r in inst.values) + "\n  ]",
    ]
    if inst.caps is not None:
        parts.append(f'  "caps": {_row(str(c) for c in inst.caps)}')
    if inst.concave is not None:
        rows = (_row(json.dumps(str(x)) for x in r) for r in inst.concave.tables)
        parts.append('  "concave": [\n' + ",\n".join("    " + r for r in rows) + "\n  ]")
    if inst.generator is not None:
        parts.append('  "generator": ' + json.dumps(inst.generator, sort_keys=True))
    return "{\n" + ",\n".join(parts) + "\n}\n"


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def parse_allocation(text: str, num_agents: int) -> Allocation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("owner"), list):
        raise MalformedDocumentError('allocation document must be {"owner": [...]}')
    owner = doc["owner"]
    if not all(_is_int(a) for a in owner):
        raise MalformedDocumentError("owner entries must be integers")
    return Allocation.from_owner([a - 1 for a in owner], num_agents)


def serialize_allocation(alloc: Allocation) -> str:
    return json.dumps({"owner": [a + 1 for a in alloc.owner]}) + "\n"
