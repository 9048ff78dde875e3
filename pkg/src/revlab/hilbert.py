"""Periodic Hilbert transform on ``(0, l)``.

Convention: ``H e_n = -i sgn(n) e_n`` with ``e_n(x) = exp(2 pi i n x / l)``,
so ``H cos(2 pi x / l) = sin(2 pi x / l)`` and, for the indicator of
``[a, b]``,

    H 1_[a,b](x) = (1/pi) log |sin(pi (x - a) / l) / sin(pi (x - b) / l)|.

Three independent routes are provided: spectral synthesis from exact
Fourier coefficients, the closed form for piecewise-constant data, and a
principal-value quadrature used as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._parallel import chunked_map, tree_sum
from ._polyexp import poly_exp_integral
from .exceptions import AccuracyError, DomainError, SingularityError
from .piecewise import ModulatedFn, PiecewiseFn, wrap

DEFAULT_MODES = 2**13
_BLOCK = 256


def _split(f, modulation):
    if isinstance(f, ModulatedFn):
        return f.base, f.base.length, complex(f.modulation) + complex(modulation)
    return f, f.length, complex(modulation)


def fourier_exact(f, modulation=0.0, n=0):
    """``(1/l) int_0^l f(y) exp(mu y) exp(-2 pi i n y / l) dy``, exact per piece.

    ``f`` may be a :class:`PiecewiseFn` or a :class:`ModulatedFn` (whose own
    modulation is added to ``modulation``).  ``n`` may be an integer array.
    """
    base, l, mu = _split(f, modulation)
    n_arr = np.asarray(n)
    B = mu - 2j * np.pi * n_arr.astype(float) / l
    total = np.zeros(np.shape(B), dtype=complex)
    for lo, hi, c in zip(base.breaks[:-1], base.breaks[1:], base.pieces):
        total = total + poly_exp_integral(c, lo, hi, 0.0, B)
    total = total / l
    return total if total.ndim else complex(total)


@dataclass(frozen=True)
class FourierSeries:
    """Coefficients ``u_hat(n)`` for ``1 <= |n| <= n_modes`` plus the mean."""

    period: float
    mean: complex
    pos: np.ndarray
    neg: np.ndarray

    @property
    def n_modes(self):
        return len(self.pos)

    def coeff(self, n):
        if n == 0:
            return self.mean
        if abs(n) > self.n_modes:
            return 0.0
        return self.pos[n - 1] if n > 0 else self.neg[-n - 1]

    @classmethod
    def from_function(cls, f, n_modes=DEFAULT_MODES, modulation=0.0):
        n = np.arange(1, int(n_modes) + 1)
        l = f.length
        return cls(
            float(l),
            complex(fourier_exact(f, modulation, 0)),
            np.asarray(fourier_exact(f, modulation, n)),
            np.asarray(fourier_exact(f, modulation, -n)),
        )

    @classmethod
    def from_coefficients(cls, period, mean, pos, neg):
        return cls(float(period), complex(mean), np.asarray(pos, complex), np.asarray(neg, complex))


def fourier_series(f, n_modes=DEFAULT_MODES, modulation=0.0):
    return FourierSeries.from_function(f, n_modes, modulation)


def _synth(coef, period, x, sign):
    """``sum_{n=1}^{N} coef[n-1] * exp(sign * 2 pi i n x / l)`` for a chunk of x.

    Modes are split as ``n = 1 + hi * _BLOCK + lo``; phases for the two
    factors are generated separately, which keeps the number of complex
    exponentials at ``O(N / _BLOCK + _BLOCK)`` per point.
    """
    N = len(coef)
    nb = -(-N // _BLOCK)
    padded = np.zeros(nb * _BLOCK, dtype=complex)
    padded[:N] = coef
    padded = padded.reshape(nb, _BLOCK)
    theta = sign * 2.0 * np.pi * wrap(np.asarray(x, float), period) / period
    lo = np.arange(_BLOCK)
    hi = np.arange(nb)
    e_lo = np.exp(1j * np.multiply.outer(theta, lo + 1))
    e_hi = np.exp(1j * np.multiply.outer(theta, hi * float(_BLOCK)))
    inner = tree_sum(padded[None, :, :] * e_lo[:, None, :], axis=-1)
    return tree_sum(inner * e_hi, axis=-1)


def analytic_projection(s, x):
    """``sum_{n >= 1} u_hat(n) exp(2 pi i n x / l)``."""
    x = np.atleast_1d(np.asarray(x, float))
    out = chunked_map(lambda xs: _synth(s.pos, s.period, xs, +1.0), x)
    return out


def hilbert_synthesis(s, x):
    """``i sum_{n=1}^{N} [u_hat(-n) e_{-n}(x) - u_hat(n) e_n(x)]``."""
    x = np.atleast_1d(np.asarray(x, float))

    def chunk(xs):
        return 1j * (_synth(s.neg, s.period, xs, -1.0) - _synth(s.pos, s.period, xs, +1.0))

    return chunked_map(chunk, x)


def _check_off_cusp(x, points, l, tol):
    x = np.atleast_1d(np.asarray(x, float))
    for p in points:
        d = np.abs(wrap(x - p + 0.5 * l, l) - 0.5 * l)
        if np.any(d < tol):
            raise SingularityError(f"evaluation within {tol:g} of the cusp at {p:g}")


def hilbert_indicator(a, b, l, x):
    """Closed-form transform of the indicator of ``[a, b]`` on period ``l``."""
    if not 0.0 <= a < b <= l:
        raise DomainError("need 0 <= a < b <= l")
    _check_off_cusp(x, (a, b), l, 1e-13)
    x = np.asarray(x, float)
    num = np.abs(np.sin(np.pi * (x - a) / l))
    den = np.abs(np.sin(np.pi * (x - b) / l))
    return np.log(num / den) / np.pi


def hilbert_step(f, x):
    """Closed-form transform of a piecewise-constant ``f`` on its own period."""
    if f.degree > 0:
        raise DomainError("hilbert_step needs piecewise-constant data")
    l = f.length
    x = np.asarray(x, float)
    out = np.zeros(x.shape, dtype=complex if f.is_complex else float)
    for lo, hi, c in zip(f.breaks[:-1], f.breaks[1:], f.pieces):
        if c[0] != 0 and not (lo == 0.0 and hi == l):
            out = out + c[0] * hilbert_indicator(lo, hi, l, x)
    return out


def hilbert_pv(f, l, x, epsabs=1e-11, epsrel=1e-11):
    """``(1/l) PV int_0^l f(y) cot(pi (x - y) / l) dy`` by singularity subtraction.

    ``f`` is extended ``l``-periodically; its periodization jump at ``0`` is
    treated like any other breakpoint.
    """
    base = f.base if isinstance(f, ModulatedFn) else f
    if abs(base.length - l) > 1e-12 * l:
        raise DomainError("period must equal the function's domain length")
    x = float(wrap(x, l))
    breaks = np.asarray(base.breaks, float)
    d = np.abs(wrap(x - breaks + 0.5 * l, l) - 0.5 * l)
    if np.any(d < 1e-10):
        raise AccuracyError("PV quadrature requested too close to a breakpoint")
    fx = f(x)

    def integrand(y, part):
        v = (f(y) - fx) / math.tan(math.pi * (x - y) / l)
        return v.real if part == 0 else v.imag

    pts = sorted(set(breaks[1:-1].tolist() + [x]))
    total = 0.0
    edges = [0.0] + pts + [l]
    parts = (0, 1) if np.iscomplexobj(fx) or getattr(base, "is_complex", False) else (0,)
    vals = []
    for part in parts:
        acc = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            val, _ = integrate.quad(integrand, lo, hi, args=(part,), epsabs=epsabs,
                                    epsrel=epsrel, limit=400)
            acc += val
        vals.append(acc)
    total = vals[0] + (1j * vals[1] if len(vals) > 1 else 0.0)
    return total / l
