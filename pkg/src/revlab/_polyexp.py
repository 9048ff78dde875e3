"""Exact integrals of polynomial times complex exponential.

Everything else in the package reduces inner products, Fourier
coefficients and norms to

    int_a^b P(x) exp(A + B x) dx

with P a (real or complex) polynomial in monomial form.  The integral is
re-anchored at whichever endpoint makes ``exp(B s)`` decay, so the only
exponential that can be large is ``exp(A + B * anchor)``; callers in the
scaled gauge keep that O(1).
"""

import numpy as np
from numpy.polynomial import polynomial as P

_SERIES_TERMS = 80


def taylor_shift(coeffs, c, sign=1.0):
    """Coefficients of ``s -> P(c + sign * s)`` given those of ``P``."""
    coeffs = np.asarray(coeffs)
    out = np.zeros(len(coeffs), dtype=np.result_type(coeffs, float))
    # Horner on polynomials: P(c + sign*s)
    lin = np.array([c, sign], dtype=float)
    for a in coeffs[::-1]:
        out = P.polymul(out, lin)[: len(coeffs)]
        out[0] += a
    return out


def moments(C, h, mmax):
    """``M[m] = int_0^h s**m exp(C s) ds`` for m = 0..mmax (Re C <= 0 assumed).

    Returns an array of shape ``(mmax + 1,) + C.shape``.
    """
    C = np.asarray(C, dtype=complex)
    shape = C.shape
    C = C.reshape(-1)
    z = C * h
    out = np.empty((mmax + 1, C.size), dtype=complex)
    small = np.abs(z) <= mmax + 2.0
    if np.any(small):
        zs = z[small]
        for m in range(mmax + 1):
            term = np.ones_like(zs)
            acc = term / (m + 1)
            for j in range(1, _SERIES_TERMS):
                term = term * zs / j
                acc = acc + term / (m + j + 1)
            out[m][small] = acc * h ** (m + 1)
    big = ~small
    if np.any(big):
        Cb = C[big]
        ez = np.exp(z[big])
        prev = np.expm1(z[big]) / Cb
        out[0][big] = prev
        for m in range(1, mmax + 1):
            prev = (h**m * ez - m * prev) / Cb
            out[m][big] = prev
    return out.reshape((mmax + 1,) + shape)


def poly_exp_integral(coeffs, a, b, A, B):
    """``int_a^b P(x) exp(A + B x) dx`` computed in closed form.

    ``A`` and ``B`` broadcast against each other; the result has their
    broadcast shape.  ``coeffs`` are monomial coefficients of ``P`` in x.
    """
    A, B = np.broadcast_arrays(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))
    coeffs = np.atleast_1d(np.asarray(coeffs))
    h = float(b) - float(a)
    if h <= 0.0:
        return np.zeros(A.shape, dtype=complex)
    deg = len(coeffs) - 1
    q_left = taylor_shift(coeffs, a, 1.0)
    q_right = taylor_shift(coeffs, b, -1.0)
    grow = B.real > 0.0
    # s measured from the anchor so that Re(C) <= 0 on [0, h]
    C = np.where(grow, -B, B)
    M = moments(C, h, deg)
    left = np.tensordot(q_left, M, axes=(0, 0))
    right = np.tensordot(q_right, M, axes=(0, 0))
    anchor = np.where(grow, b, a)
    return np.exp(A + B * anchor) * np.where(grow, right, left)
