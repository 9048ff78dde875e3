"""Input checks and rational-time value objects."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .piecewise import PiecewiseFn


def reduce_fraction(p, q):
    """Return ``(p', q', reduced)`` with ``gcd(p', q') = 1``."""
    p, q = int(p), int(q)
    if q < 1 or p < 1:
        raise DomainError("rational time needs positive integers p, q")
    g = math.gcd(p, q)
    return p // g, q // g, g != 1


def _coprime(p, q):
    p2, q2, reduced = reduce_fraction(p, q)
    if reduced:
        raise DomainError(f"p={p}, q={q} are not coprime; reduce first")
    return p2, q2


@dataclass(frozen=True)
class AiryRationalTime:
    """``t = p / (q pi**2)``."""

    p: int
    q: int
    t: float = field(init=False)

    def __post_init__(self):
        p, q = _coprime(self.p, self.q)
        object.__setattr__(self, "t", p / (q * math.pi**2))

    @classmethod
    def reduced(cls, p, q):
        p, q, _ = reduce_fraction(p, q)
        return cls(p, q)


@dataclass(frozen=True)
class DislocRationalTime:
    """``t = 2 b**2 p / (pi q)`` (left) or ``-2 (1-b)**2 p / (pi q)`` (right)."""

    p: int
    q: int
    b: float
    side: str = "left"
    t: float = field(init=False)

    def __post_init__(self):
        p, q = _coprime(self.p, self.q)
        check_b(self.b)
        if self.side not in ("left", "right"):
            raise DomainError("side must be 'left' or 'right'")
        if self.side == "left":
            t = 2.0 * self.b**2 * p / (math.pi * q)
        else:
            t = -2.0 * (1.0 - self.b) ** 2 * p / (math.pi * q)
        object.__setattr__(self, "t", t)

    @classmethod
    def reduced(cls, p, q, b, side="left"):
        p, q, _ = reduce_fraction(p, q)
        return cls(p, q, b, side)


def check_b(b):
    b = float(b)
    if not 0.0 < b < 1.0:
        raise DomainError(f"dislocation b must lie in (0, 1), got {b}")
    return b


def check_real(u0):
    if not isinstance(u0, PiecewiseFn):
        raise DomainError("initial datum must be a PiecewiseFn")
    if u0.is_complex:
        if any(np.any(np.imag(c) != 0) for c in u0.pieces):
            raise DomainError("the Airy problem takes real initial data")
        return PiecewiseFn(u0.breaks, [np.real(c) for c in u0.pieces])
    return u0


def check_unit_interval(u0):
    if not isinstance(u0, PiecewiseFn):
        raise DomainError("initial datum must be a PiecewiseFn")
    if u0.length != 1.0:
        raise DomainError("initial datum must live on [0, 1]")
    return u0


def check_grid(x, lo=0.0, hi=1.0, closed=False):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    bad = (x < lo) | (x > hi) if closed else (x <= lo) | (x >= hi)
    if np.any(bad) or np.any(~np.isfinite(x)):
        raise DomainError(f"grid points must lie in ({lo}, {hi})")
    return x


def interior_grid(m, lo=0.0, hi=1.0):
    """``m`` cell midpoints of ``[lo, hi]``."""
    m = int(m)
    if m < 1:
        raise DomainError("grid size must be positive")
    return lo + (hi - lo) * (np.arange(m) + 0.5) / m
