"""Seeded instance families.

All randomness comes from SplitMix64 so that the same seed yields the same
instance on any platform or port, independent of numpy or ``random``.
"""

from __future__ import annotations

from fractions import Fraction

from .identical import gen_tight_example
from .model import ConcaveProfile, Instance

__all__ = [
    "SplitMix64",
    "PRNG_NAME",
    "random_binary",
    "random_identical",
    "random_caps",
    "random_concave_profile",
    "FAMILIES",
]

PRNG_NAME = "splitmix64"
_MASK = (1 << 64) - 1


class SplitMix64:
    """Steele, Lea and Flood's 64-bit SplitMix generator."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], by rejection."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def bernoulli(self, p: float) -> bool:
        return self.random() < p


def _header(family: str, seed: int, **params) -> dict:
    return {"family": family, "prng": PRNG_NAME, "seed": seed, **params}


def random_binary(n: int, m: int, density: float, seed: int) -> Instance:
    """Each value is 1 with probability ``density``, drawn row by row."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = SplitMix64(seed)
    rows = tuple(tuple(int(rng.bernoulli(density)) for _ in range(m)) for _ in range(n))
    return Instance(rows, generator=_header("random-binary", seed, density=density))


def random_identical(n: int, m: int, max_value: int, seed: int) -> Instance:
    """One shared row of values uniform in [1, max_value]."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if max_value < 1:
        raise ValueError("max_value must be >= 1")
    rng = SplitMix64(seed)
    row = tuple(rng.randint(1, max_value) for _ in range(m))
    return Instance((row,) * n, generator=_header("random-identical", seed, max_value=max_value))


def random_caps(n: int, rng: SplitMix64, lo: int = 1, hi: int = 3) -> tuple[int, ...]:
    return tuple(rng.randint(lo, hi) for _ in range(n))


def random_concave_profile(n: int, m: int, rng: SplitMix64, max_step: int = 6) -> ConcaveProfile:
    """Random valid tables: nonincreasing rational increments, the first positive."""
    tables = []
    for _ in range(n):
        den = rng.randint(1, 3)
        steps = sorted((Fraction(rng.randint(0, max_step), den) for _ in range(m)), reverse=True)
        if steps[0] == 0:
            steps[0] = Fraction(1)
        f = [Fraction(0)]
        for d in steps:
            f.append(f[-1] + d)
        tables.append(tuple(f))
    return ConcaveProfile(tuple(tables))


FAMILIES = ("random-binary", "random-identical", "tight-efx")


def generate(family: str, *, n: int = 2, m: int = 4, seed: int = 0, density: float = 0.5,
             max_value: int = 10) -> Instance:
    if family == "random-binary":
        return random_binary(n, m, density, seed)
    if family == "random-identical":
        return random_identical(n, m, max_value, seed)
    if family == "tight-efx":
        return gen_tight_example(m)
    raise ValueError(f"unknown family {family!r}")
