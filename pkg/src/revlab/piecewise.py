"""Piecewise-polynomial initial data with exact jump bookkeeping.

A :class:`PiecewiseFn` is a function on ``[0, l]`` that is a polynomial on
each cell ``[x_j, x_{j+1})``.  Interior breakpoints take the right limit;
``x = l`` takes the left limit.  Coefficients are monomials in the global
variable ``x``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from ._polyexp import poly_exp_integral
from .exceptions import DomainError

MAX_DEGREE = 8
_WRAP_SNAP = 1e-15
_JUMP_TOL = 1e-13


def wrap(x, period):
    """Map ``x`` into ``[0, period)`` using a floor-based modulus."""
    x = np.asarray(x, dtype=float)
    w = x - period * np.floor(x / period)
    # rounding can land exactly on (or a hair below) the period
    w = np.where(w >= period * (1.0 - _WRAP_SNAP), 0.0, w)
    w = np.where(w < 0.0, 0.0, w)
    return w if w.ndim else float(w)


@dataclass(frozen=True)
class PeriodicPoint:
    raw: float
    period: float
    wrapped: float = field(init=False)

    def __post_init__(self):
        if not self.period > 0:
            raise DomainError(f"period must be positive, got {self.period}")
        object.__setattr__(self, "wrapped", wrap(self.raw, self.period))


def _as_coeffs(c):
    arr = np.atleast_1d(np.asarray(c))
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    return P.polytrim(arr, 0) if len(arr) > 1 else arr


@dataclass(frozen=True, eq=False)
class PiecewiseFn:
    """Piecewise polynomial on ``[0, length]``.

    Args:
        breaks: strictly increasing breakpoints, first ``0``, last ``length``.
        pieces: one monomial coefficient sequence per cell.
    """

    breaks: np.ndarray
    pieces: tuple

    def __post_init__(self):
        breaks = np.asarray(self.breaks, dtype=float)
        if breaks.ndim != 1 or len(breaks) < 2:
            raise DomainError("need at least two breakpoints")
        if breaks[0] != 0.0:
            raise DomainError("first breakpoint must be 0")
        if np.any(np.diff(breaks) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        pieces = tuple(_as_coeffs(c) for c in self.pieces)
        if len(pieces) != len(breaks) - 1:
            raise DomainError(
                f"{len(pieces)} pieces for {len(breaks)} breakpoints"
            )
        for c in pieces:
            if len(c) - 1 > MAX_DEGREE:
                raise DomainError(f"piece degree {len(c) - 1} exceeds {MAX_DEGREE}")
            if not np.all(np.isfinite(c)):
                raise DomainError("non-finite coefficient")
        breaks.setflags(write=False)
        for c in pieces:
            c.setflags(write=False)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "pieces", pieces)

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, length=1.0):
        return cls([0.0, length], [[value]])

    @classmethod
    def step(cls, breaks, values):
        """Piecewise-constant function taking ``values[j]`` on cell ``j``."""
        return cls(breaks, [[v] for v in values])

    @classmethod
    def indicator(cls, a, b, length=1.0):
        """Indicator of ``[a, b)`` inside ``[0, length]``."""
        brk, vals = [0.0], []
        if a > 0.0:
            brk.append(a)
            vals.append(0.0)
        vals.append(1.0)
        if b < length:
            brk.append(b)
            vals.append(0.0)
        brk.append(length)
        return cls.step(brk, vals)

    @classmethod
    def from_callable(cls, func, breaks, degree=MAX_DEGREE):
        """Chebyshev-interpolate ``func`` on every cell (monomial output)."""
        breaks = np.asarray(breaks, dtype=float)
        pieces = []
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            cheb = np.polynomial.Chebyshev.interpolate(func, degree, domain=[lo, hi])
            pieces.append(cheb.convert(kind=np.polynomial.Polynomial, domain=[-1, 1], window=[-1, 1]).coef)
        return cls(breaks, pieces)

    # -- basic properties ---------------------------------------------
    @property
    def length(self):
        return float(self.breaks[-1])

    @property
    def is_complex(self):
        return any(np.iscomplexobj(c) for c in self.pieces)

    @property
    def degree(self):
        return max(len(c) - 1 for c in self.pieces)

    def cell_index(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breaks, x, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > self.length)) or np.any(np.isnan(x)):
            raise DomainError(f"x outside [0, {self.length}]")
        idx = self.cell_index(x)
        dtype = complex if self.is_complex else float
        out = np.zeros(x.shape, dtype=dtype)
        for j, c in enumerate(self.pieces):
            mask = idx == j
            if np.any(mask):
                out[mask] = P.polyval(x[mask], c)
        return out if out.ndim else out[()]

    def left_limit(self, x):
        x = float(x)
        if not 0.0 < x <= self.length:
            raise DomainError("left limit needs 0 < x <= length")
        j = int(np.searchsorted(self.breaks, x, side="left")) - 1
        return P.polyval(x, self.pieces[j])[()]

    def right_limit(self, x):
        x = float(x)
        if not 0.0 <= x < self.length:
            raise DomainError("right limit needs 0 <= x < length")
        j = int(np.searchsorted(self.breaks, x, side="right")) - 1
        return P.polyval(x, self.pieces[j])[()]

    def jumps(self):
        """Interior ``(x_j, right - left)`` pairs with nonzero height."""
        out = []
        for j in range(1, len(self.breaks) - 1):
            xj = float(self.breaks[j])
            right = P.polyval(xj, self.pieces[j])
            left = P.polyval(xj, self.pieces[j - 1])
            h = right - left
            # composition with affine maps leaves rounding-level residues
            if abs(h) > _JUMP_TOL * max(1.0, abs(right), abs(left)):
                out.append((xj, h[()] if isinstance(h, np.ndarray) else h))
        return out

    # -- algebra --------------------------------------------------------
    def map_pieces(self, func):
        return PiecewiseFn(self.breaks, [func(c) for c in self.pieces])

    def __add__(self, other):
        if np.isscalar(other):
            return self.map_pieces(lambda c: P.polyadd(c, [other]))
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if np.isscalar(other):
            return self.map_pieces(lambda c: c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def restrict(self, lo, hi):
        """Restriction to ``[lo, hi]``, shifted to start at 0."""
        return self.pullback(1.0, lo, 0.0, hi - lo)

    def pullback(self, scale, shift, x_lo, x_hi):
        """``g(x) = f(scale * x + shift)`` on ``[x_lo, x_hi]`` (shifted to 0).

        The image ``scale * [x_lo, x_hi] + shift`` must lie inside ``[0, l]``.
        The result lives on ``[0, x_hi - x_lo]``.
        """
        y0, y1 = sorted((scale * x_lo + shift, scale * x_hi + shift))
        tol = 1e-13 * max(1.0, self.length)
        if y0 < -tol or y1 > self.length + tol:
            raise DomainError("pullback image leaves the domain")
        inner = self.breaks[(self.breaks > y0) & (self.breaks < y1)]
        xs = np.sort((inner - shift) / scale)
        brk = np.concatenate(([x_lo], xs, [x_hi]))
        # drop breakpoints that rounding pushed onto the ends
        keep = np.concatenate(([True], np.diff(brk) > 1e-15 * max(1.0, abs(x_hi)), ))
        brk = brk[keep]
        brk[-1] = x_hi
        pieces = []
        lin = np.array([shift + scale * x_lo, scale])
        for lo, hi in zip(brk[:-1], brk[1:]):
            ymid = scale * 0.5 * (lo + hi) + shift
            c = self.pieces[int(self.cell_index(ymid))]
            # compose with the affine map, expressed in the shifted variable
            comp = np.zeros(1, dtype=c.dtype)
            for a in c[::-1]:
                comp = P.polyadd(P.polymul(comp, lin), [a])
            pieces.append(comp)
        return PiecewiseFn(brk - x_lo, pieces)

    def reflect(self):
        """``x -> f(l - x)``."""
        return self.pullback(-1.0, self.length, 0.0, self.length)

    def concat(self, other):
        """Place ``other`` immediately to the right of ``self``."""
        l = self.length
        brk = np.concatenate((self.breaks, other.breaks[1:] + l))
        shifted = []
        for c in other.pieces:
            shifted.append(_shift_poly(c, -l))
        return PiecewiseFn(brk, list(self.pieces) + shifted)

    # -- calculus -------------------------------------------------------
    def integrate_exp(self, A, B):
        """``int_0^l f(x) exp(A + B x) dx``, vectorised over ``B``."""
        total = 0.0
        for lo, hi, c in zip(self.breaks[:-1], self.breaks[1:], self.pieces):
            total = total + poly_exp_integral(c, lo, hi, A, B)
        return total

    def integral(self):
        return complex(self.integrate_exp(0.0, 0.0)) if self.is_complex else float(
            np.real(self.integrate_exp(0.0, 0.0))
        )

    def inner(self, other):
        """L2 inner product ``int f conj(g)`` with another piecewise polynomial."""
        brk = np.union1d(self.breaks, other.breaks)
        total = 0.0
        for lo, hi in zip(brk[:-1], brk[1:]):
            mid = 0.5 * (lo + hi)
            cf = self.pieces[int(self.cell_index(mid))]
            cg = np.conj(other.pieces[int(other.cell_index(mid))])
            prod = P.polymul(cf, cg)
            anti = P.polyint(prod)
            total = total + P.polyval(hi, anti) - P.polyval(lo, anti)
        return total[()] if isinstance(total, np.ndarray) else total

    # -- serialization --------------------------------------------------
    def to_dict(self):
        cplx = self.is_complex
        pieces = []
        for c in self.pieces:
            if cplx:
                pieces.append([[float(v.real), float(v.imag)] for v in np.asarray(c, complex)])
            else:
                pieces.append([float(v) for v in c])
        return {
            "length": self.length,
            "breaks": [float(b) for b in self.breaks],
            "pieces": pieces,
            "complex": cplx,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            breaks = list(d["breaks"])
            raw = d["pieces"]
            cplx = bool(d.get("complex", False))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed piecewise description: {exc}") from None
        if "length" in d and float(d["length"]) != float(breaks[-1]):
            raise DomainError("length does not match last breakpoint")
        if cplx:
            pieces = [[complex(re, im) for re, im in c] for c in raw]
        else:
            pieces = [[float(v) for v in c] for c in raw]
        return cls(breaks, pieces)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _shift_poly(c, s):
    """Coefficients of ``x -> p(x + s)``."""
    out = np.zeros(1, dtype=np.result_type(c, float))
    lin = np.array([s, 1.0])
    for a in c[::-1]:
        out = P.polyadd(P.polymul(out, lin), [a])
    return out


def evaluate(f, x):
    """Value of ``f`` at ``x`` (right limit at interior breakpoints)."""
    return f(x)


def decompose(f):
    """Split ``f`` into a continuous part and its jumps.

    Returns ``(ac, jumps)`` where ``ac`` is continuous on ``[0, l]`` and
    ``f = ac + sum(h * 1[x >= x_j])``.
    """
    jumps = f.jumps()
    heights = {x: h for x, h in jumps}
    pieces, running = [], 0.0
    for j, c in enumerate(f.pieces):
        if j > 0:
            running = running + heights.get(float(f.breaks[j]), 0.0)
        pieces.append(P.polysub(c, [running]) if running != 0 else c)
    return PiecewiseFn(f.breaks, pieces), jumps


def periodic_eval(f, s, x):
    """``v(x - s)`` where ``v`` is the ``l``-periodic extension of ``f`` from ``[0, l)``."""
    return f(wrap(np.asarray(x, dtype=float) - s, f.length))


@dataclass(frozen=True, eq=False)
class ModulatedFn:
    """``base(x) * exp(modulation * x)`` on ``[0, l]``, extended l-periodically.

    The revival closed forms only ever need functions of this shape; keeping
    the exponential factor symbolic lets Fourier coefficients stay exact.
    """

    base: PiecewiseFn
    modulation: complex = 0.0

    @property
    def length(self):
        return self.base.length

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.base(x) * np.exp(self.modulation * x)

    def periodic(self, y):
        """Value of the periodic extension at arbitrary real ``y``."""
        return self(wrap(y, self.length))

    def integral(self):
        return complex(self.base.integrate_exp(0.0, self.modulation))

    def jumps(self):
        """Jumps of the periodic extension on ``[0, l)``, as ``(x, height)``.

        Includes ``x = 0`` when the extension is discontinuous there.
        """
        mod = self.modulation
        out = []
        left = P.polyval(self.length, self.base.pieces[-1]) * np.exp(mod * self.length)
        right = P.polyval(0.0, self.base.pieces[0])
        h0 = complex(right - left)
        if abs(h0) > _JUMP_TOL * max(1.0, abs(right), abs(left)):
            out.append((0.0, h0))
        for x, h in self.base.jumps():
            out.append((x, complex(h * np.exp(mod * x))))
        return out
