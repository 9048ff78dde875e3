"""Functions written as finite sums of ``poly(x) * exp(A + B x)`` on subintervals.

Both families of eigenfunctions fit this shape, which makes every inner
product and norm an exact sum of :func:`poly_exp_integral` calls.  Each
term is stored with its log-coefficient ``A`` so that huge prefactors never
materialise: on its interval, ``Re(A + B x)`` stays O(1) or below.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ._polyexp import poly_exp_integral


@dataclass(frozen=True)
class Term:
    lo: float
    hi: float
    A: complex
    B: complex
    poly: tuple = (1.0,)


def exp_integral(lo, hi, A, B):
    """``int_lo^hi exp(A + B x) dx``, vectorised, anchored where the integrand peaks."""
    lo, hi, A, B = np.broadcast_arrays(lo, hi, np.asarray(A, complex), np.asarray(B, complex))
    h = hi - lo
    grow = B.real > 0
    z = np.where(grow, -B, B) * h
    small = np.abs(z) < 1e-8
    safe_B = np.where(small, 1.0, B)
    ratio = np.where(small, h * (1 + z / 2), np.where(grow, -np.expm1(z), np.expm1(z)) / safe_B)
    anchor = np.where(grow, hi, lo)
    return np.exp(A + B * anchor) * ratio


def log_diff_exp(e1, e2):
    """``log(exp(e1) - exp(e2))`` for complex exponents, without overflow."""
    if e1.real >= e2.real:
        return e1 + np.log1p(-np.exp(e2 - e1))
    return e2 + 1j * np.pi + np.log1p(-np.exp(e1 - e2))


@dataclass(frozen=True)
class ExpTerms:
    terms: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        last_hi = max(t.hi for t in self.terms)
        for t in self.terms:
            upper = (x <= t.hi) if t.hi == last_hi else (x < t.hi)
            mask = (x >= t.lo) & upper
            if np.any(mask):
                xm = x[mask]
                out[mask] += P.polyval(xm, np.asarray(t.poly)) * np.exp(t.A + t.B * xm)
        return out if out.ndim else out[()]

    def conj(self):
        return ExpTerms(tuple(
            Term(t.lo, t.hi, np.conj(t.A), np.conj(t.B), tuple(np.conj(t.poly))) for t in self.terms
        ))

    def __neg__(self):
        return ExpTerms(tuple(Term(t.lo, t.hi, t.A + 1j * np.pi, t.B, t.poly) for t in self.terms))

    def mirror(self, length=1.0):
        """``x -> f(length - x)``."""
        out = []
        for t in self.terms:
            poly = _compose_reflect(np.asarray(t.poly), length) if len(t.poly) > 1 else t.poly
            out.append(Term(length - t.hi, length - t.lo, t.A + t.B * length, -t.B, tuple(poly)))
        return ExpTerms(tuple(out))

    def inner(self, other):
        """``int self * conj(other)``."""
        total = 0.0 + 0.0j
        flat = ([], [], [], [])
        for s in self.terms:
            for t in other.terms:
                lo, hi = max(s.lo, t.lo), min(s.hi, t.hi)
                if hi <= lo:
                    continue
                A, B = s.A + np.conj(t.A), s.B + np.conj(t.B)
                if len(s.poly) == 1 and len(t.poly) == 1:
                    c = s.poly[0] * np.conj(t.poly[0])
                    for lst, v in zip(flat, (lo, hi, A + np.log(complex(c)), B)):
                        lst.append(v)
                    continue
                poly = P.polymul(np.asarray(s.poly), np.conj(np.asarray(t.poly)))
                total += poly_exp_integral(poly, lo, hi, A, B)[()]
        if flat[0]:
            total += exp_integral(*(np.array(v) for v in flat)).sum()
        return complex(total)

    def norm_sq(self):
        return float(self.inner(self).real)

    def project(self, f):
        """``<f, self> = int f * conj(self)`` for a :class:`PiecewiseFn` ``f``."""
        total = 0.0 + 0.0j
        for t in self.terms:
            tpoly = np.conj(np.asarray(t.poly))
            for lo, hi, c in zip(f.breaks[:-1], f.breaks[1:], f.pieces):
                a, b = max(lo, t.lo), min(hi, t.hi)
                if b <= a:
                    continue
                total += poly_exp_integral(
                    P.polymul(c, tpoly), a, b, np.conj(t.A), np.conj(t.B)
                )[()]
        return complex(total)


def _compose_reflect(c, length):
    """Coefficients of ``x -> p(length - x)``."""
    out = np.zeros(1, dtype=np.result_type(c, float))
    lin = np.array([length, -1.0])
    for a in c[::-1]:
        out = P.polyadd(P.polymul(out, lin), [a])
    return out
