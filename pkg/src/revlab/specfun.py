"""Eigenpairs of the two spatial operators.

Airy operator ``A = i d^3/dx^3`` with ``phi(0) = phi(1) = 0`` and
``phi'(1) = phi'(0)``: eigenvalues ``k_n**3`` where ``k_n`` are the positive
zeros of the characteristic determinant.  Eigenfunctions grow like
``exp(sqrt(3) k_n / 2)``, so everything here is stored in the *scaled gauge*
(the eigenfunction multiplied by ``exp(-sqrt(3) k_n / 2)``).

Dislocated Laplacian ``D = d/dx (sgn(x - b) d/dx)`` with Dirichlet ends:
eigenvalues ``+k**2`` (roots of ``tan(k b) = tanh(k (1 - b))``) and
``-k**2`` (same equation with ``b -> 1 - b``), plus ``0`` when ``b = 1/2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from ._expterms import ExpTerms, Term, log_diff_exp
from .exceptions import ConvergenceError, DomainError

SQRT3 = math.sqrt(3.0)
ALPHA = np.exp(2j * np.pi / 3)

_NEWTON_RTOL = 1e-14
_MAX_ITER = 100


# ---------------------------------------------------------------------------
# Airy problem
# ---------------------------------------------------------------------------

def airy_det(k):
    """Characteristic determinant, unscaled, for complex ``k``."""
    k = np.asarray(k, dtype=complex)
    a, a2 = ALPHA, ALPHA**2
    return (
        np.exp(1j * k) + np.exp(-1j * k)
        + a * (np.exp(1j * a * k) + np.exp(-1j * a * k))
        + a2 * (np.exp(1j * a2 * k) + np.exp(-1j * a2 * k))
    )


def airy_det_scaled(k):
    """``exp(-sqrt(3) k / 2) * Delta(k)`` for real ``k >= 0``.

    Uses the cos/cosh/sinh form of the determinant with cosh and sinh
    multiplied through by the scale, so no term exceeds magnitude 2.
    """
    k = np.asarray(k, dtype=float)
    e = np.exp(-SQRT3 * k / 2)
    e2 = e * e
    return 2.0 * (
        np.cos(k) * e
        - np.cos(k / 2) * (1.0 + e2) / 2
        - SQRT3 * np.sin(k / 2) * (1.0 - e2) / 2
    )


def _airy_det_scaled_prime(k):
    e = math.exp(-SQRT3 * k / 2)
    e2 = e * e
    s, c = math.sin(k / 2), math.cos(k / 2)
    return 2.0 * (
        -math.sin(k) * e - SQRT3 / 2 * math.cos(k) * e
        + s / 2 * (1.0 + e2) / 2 + c * SQRT3 / 2 * e2
        - SQRT3 * (c / 2 * (1.0 - e2) / 2 + s * SQRT3 / 2 * e2)
    )


def airy_kappa(n):
    """Leading-order root location ``(2n - 1/3) pi``."""
    return (2 * n - 1.0 / 3.0) * math.pi


def _airy_offset(n, k):
    """Refine ``gamma = k_n - kappa_n`` to full relative precision.

    At a root, ``(-1)**n sin(gamma / 2) = E cos k - E**2 cos(k/2 + pi/3)``
    with ``E = exp(-sqrt(3) k / 2)``; the right side is a contraction in
    ``gamma`` with constant ``O(E)``.
    """
    kappa = airy_kappa(n)
    sign = -1.0 if n % 2 else 1.0
    gamma = k - kappa
    for _ in range(_MAX_ITER):
        kk = kappa + gamma
        e = math.exp(-SQRT3 * kk / 2)
        rhs = e * math.cos(kk) - e * e * math.cos(kk / 2 + math.pi / 3)
        new = 2.0 * math.asin(sign * rhs)
        if new == gamma or abs(new - gamma) <= 1e-16 * abs(new):
            return new
        gamma = new
    raise ConvergenceError(f"offset iteration for Airy root n={n} did not settle")


def _newton(f, fprime, x0, lo, hi, what):
    x = x0
    for _ in range(_MAX_ITER):
        step = f(x) / fprime(x)
        x_new = x - step
        slack = 1e-10 * (hi - lo)
        if not lo - slack <= x_new <= hi + slack:
            raise ConvergenceError(f"Newton left the bracket for {what}")
        if abs(x_new - x) <= _NEWTON_RTOL * abs(x_new):
            return x_new
        x = x_new
    raise ConvergenceError(f"Newton did not converge for {what}")


@lru_cache(maxsize=4096)
def _airy_root_and_offset(n):
    if n < 1:
        raise DomainError("Airy root index must be >= 1")
    lo, hi = (2 * n - 1) * math.pi, 2 * n * math.pi
    f = lambda k: float(airy_det_scaled(k))
    try:
        x0 = optimize.bisect(f, lo, hi, xtol=1e-3)
    except ValueError as exc:
        raise ConvergenceError(f"no sign change for Airy root n={n}") from exc
    k = _newton(f, _airy_det_scaled_prime, x0, lo, hi, f"Airy root n={n}")
    gamma = _airy_offset(n, k)
    return airy_kappa(n) + gamma, gamma


def airy_root(n):
    """The unique zero of the determinant in ``((2n-1) pi, 2 n pi)``."""
    return _airy_root_and_offset(int(n))[0]


def airy_root_offset(n):
    """``k_n - (2n - 1/3) pi`` to full relative precision."""
    return _airy_root_and_offset(int(n))[1]


@dataclass(frozen=True)
class AiryEigenPair:
    """Positive-index eigenpair, scaled gauge.

    ``terms`` represents ``exp(-sqrt(3) k / 2) * phi_n(x)`` as three terms
    ``exp(A_r + B_r x)`` with ``B_r = i alpha**r k``.  Negative indices are
    obtained from ``phi_{-n} = -conj(phi_n)`` and ``lambda_{-n} = -lambda_n``.
    """

    n: int
    k: float
    kappa: float
    gamma: float
    terms: ExpTerms
    norm_sq: float

    @property
    def lam(self):
        return self.k**3

    @property
    def sigma(self):
        return np.array([t.A.real for t in self.terms.terms])

    @property
    def tau(self):
        return np.array([t.B.real for t in self.terms.terms])

    @property
    def phase(self):
        """Unit phase data: ``(Im A_r, Im B_r)`` per term."""
        return np.array([[t.A.imag, t.B.imag] for t in self.terms.terms])

    def negative(self):
        """Terms of the scaled eigenfunction with index ``-n``."""
        return -self.terms.conj()


def airy_eigenpair(n):
    return _airy_eigenpair(int(n))


@lru_cache(maxsize=4096)
def _airy_eigenpair(n):
    k, gamma = _airy_root_and_offset(n)
    scale = -SQRT3 * k / 2
    terms = []
    for r in range(3):
        e_hi = 1j * ALPHA ** (r + 2) * k + scale
        e_lo = 1j * ALPHA ** (r + 1) * k + scale
        A = complex(log_diff_exp(complex(e_hi), complex(e_lo)))
        B = complex(1j * ALPHA**r * k)
        terms.append(Term(0.0, 1.0, A, B))
    terms = ExpTerms(tuple(terms))
    return AiryEigenPair(n, k, airy_kappa(n), gamma, terms, terms.norm_sq())


def airy_spectrum(n_max):
    return tuple(airy_eigenpair(n) for n in range(1, int(n_max) + 1))


def airy_eigfun_scaled(pair, x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("x outside [0, 1]")
    return pair.terms(x)


def airy_norm_scaled(pair):
    return pair.norm_sq


# ---------------------------------------------------------------------------
# Dislocation problem
# ---------------------------------------------------------------------------

def disloc_nu(c, n):
    """Leading-order root location ``(pi / c)(n + 1/4)`` for ``n >= 0``."""
    return math.pi / c * (n + 0.25)


def _disloc_residual_scaled(k, c):
    """``exp(-k(1-c)) * [cosh(k(1-c)) sin(kc) - cos(kc) sinh(k(1-c))]``."""
    e = math.exp(-2.0 * k * (1.0 - c))
    return math.sin(k * c) * (1.0 + e) / 2 - math.cos(k * c) * (1.0 - e) / 2


def _disloc_residual_scaled_prime(k, c):
    e = math.exp(-2.0 * k * (1.0 - c))
    de = -2.0 * (1.0 - c) * e
    s, co = math.sin(k * c), math.cos(k * c)
    return c * co * (1.0 + e) / 2 + s * de / 2 + c * s * (1.0 - e) / 2 + co * de / 2


def _disloc_offset(c, n, k):
    """Refine ``gamma = k - nu`` for ``n >= 1``.

    ``tan(pi/4 + gamma c) = 1 - eps`` with ``eps = 1 - tanh(k(1-c))`` gives
    ``gamma = -arctan(eps / (2 - eps)) / c``, a contraction in ``gamma``.
    """
    nu = disloc_nu(c, n)
    gamma = k - nu
    for _ in range(_MAX_ITER):
        e = math.exp(-2.0 * (nu + gamma) * (1.0 - c))
        eps = 2.0 * e / (1.0 + e)
        new = -math.atan(eps / (2.0 - eps)) / c
        if new == gamma or abs(new - gamma) <= 1e-16 * abs(new):
            return new
        gamma = new
    raise ConvergenceError(f"offset iteration for dislocation root c={c}, n={n} did not settle")


@lru_cache(maxsize=16384)
def _disloc_root_and_offset(c, n):
    if not 0.0 < c < 1.0:
        raise DomainError("side length c must lie in (0, 1)")
    if n < 0:
        raise DomainError("root index must be >= 0")
    if n == 0:
        # extra root below pi/(4c); it exists only when c < 1/2
        if c >= 0.5:
            raise DomainError("no root below pi/(4c) when c >= 1/2")
        lo, hi = 1e-9, math.pi / (4 * c)
    else:
        lo, hi = n * math.pi / c, (n * math.pi + math.pi / 4) / c
    f = lambda k: _disloc_residual_scaled(k, c)
    if n > 0 and math.exp(-2.0 * hi * (1.0 - c)) < 1e-10 * c:
        # the root sits within rounding of the bracket end; the offset
        # iteration below recovers it exactly
        k = hi
    else:
        try:
            x0 = optimize.bisect(f, lo, hi, xtol=1e-3)
        except ValueError as exc:
            raise ConvergenceError(f"no sign change for dislocation root c={c}, n={n}") from exc
        k = _newton(f, lambda k: _disloc_residual_scaled_prime(k, c), x0, lo, hi,
                    f"dislocation root c={c}, n={n}")
    if n == 0:
        return k, k - disloc_nu(c, 0)
    gamma = _disloc_offset(c, n, k)
    return disloc_nu(c, n) + gamma, gamma


def disloc_root(c, n):
    """Root of ``tan(k c) = tanh(k (1 - c))`` in ``(n pi / c, (n pi + pi/4) / c)``.

    ``n = 0`` selects the root in ``(0, pi / (4c))``, present only for
    ``c < 1/2``.
    """
    return _disloc_root_and_offset(float(c), int(n))[0]


def disloc_root_offset(c, n):
    return _disloc_root_and_offset(float(c), int(n))[1]


@dataclass(frozen=True)
class DislocEigenPair:
    """Eigenpair of the dislocated operator.

    ``side`` is +1 for positive eigenvalues (roots with ``c = b``), -1 for
    negative ones (``c = 1 - b``) and 0 for the ``b = 1/2`` hat mode.  ``n``
    is the signed bracket index; ``n = 0`` labels the single mode whose root
    sits below ``pi / (4c)`` (or the hat mode).
    """

    n: int
    side: int
    c: float
    k: float
    nu: float
    gamma: float
    lam: float
    sign_B: float
    log_abs_B: float
    terms: ExpTerms
    norm_sq: float

    @property
    def B(self):
        return self.sign_B * math.exp(self.log_abs_B)


def _positive_side_terms(b, k):
    """Terms of ``sin(kx)`` on ``[0,b]`` glued to ``B sinh(k(1-x))`` on ``[b,1]``."""
    s = math.sin(k * b)
    den = -math.expm1(-2.0 * k * (1.0 - b))
    log_s = complex(np.log(complex(s / den)))
    half = math.log(0.5)
    return ExpTerms((
        Term(0.0, b, complex(half, -math.pi / 2), 1j * k),
        Term(0.0, b, complex(half, math.pi / 2), -1j * k),
        Term(b, 1.0, log_s + k * b, complex(-k)),
        Term(b, 1.0, log_s + 1j * math.pi - k * (2.0 - b), complex(k)),
    ))


def _hat_terms():
    return ExpTerms((
        Term(0.0, 0.5, 0j, 0j, (0.0, 1.0)),
        Term(0.5, 1.0, 0j, 0j, (1.0, -1.0)),
    ))


def disloc_eigenpair(b, n):
    return _disloc_eigenpair(float(b), int(n))


@lru_cache(maxsize=16384)
def _disloc_eigenpair(b, n):
    if not 0.0 < b < 1.0:
        raise DomainError("dislocation b must lie in (0, 1)")
    if n == 0 and b == 0.5:
        terms = _hat_terms()
        return DislocEigenPair(0, 0, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0, -math.inf, terms, 1.0 / 12.0)
    if n > 0:
        side = 1
    elif n < 0:
        side = -1
    else:
        side = 1 if b < 0.5 else -1
    c = b if side > 0 else 1.0 - b
    k, gamma = _disloc_root_and_offset(c, abs(n))
    terms = _positive_side_terms(c, k)
    if side < 0:
        terms = terms.mirror(1.0)
    s = math.sin(k * c)
    log_abs_B = math.log(abs(s)) - (k * (1.0 - c) + math.log(-math.expm1(-2.0 * k * (1.0 - c)) / 2))
    return DislocEigenPair(
        n, side, c, k, disloc_nu(c, abs(n)), gamma, side * k * k,
        math.copysign(1.0, s), log_abs_B, terms, _disloc_norm_closed(c, k),
    )


def _disloc_norm_closed(c, k):
    """``int sin^2`` on ``[0, c]`` plus the decaying sinh part on ``[c, 1]``."""
    L = 1.0 - c
    E = math.exp(-2.0 * k * L)
    D = -math.expm1(-2.0 * k * L)
    s = math.sin(k * c)
    left = c / 2 - math.sin(2.0 * k * c) / (4.0 * k)
    right = s * s * ((1.0 - E * E) / (2.0 * k) - 2.0 * L * E) / (D * D)
    return left + right


def disloc_indices(b, n_max):
    """Signed indices ``-n_max..n_max`` that label eigenpairs for this ``b``."""
    return [n for n in range(-int(n_max), int(n_max) + 1)]


def disloc_spectrum(b, n_max):
    return tuple(disloc_eigenpair(b, n) for n in disloc_indices(b, n_max))


def disloc_eigfun(b, pair, x):
    """Real value of the eigenfunction (paper convention normalisation)."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("x outside [0, 1]")
    return np.real(pair.terms(x))


def disloc_norm(b, pair):
    return pair.norm_sq


# ---------------------------------------------------------------------------
# residuals and export
# ---------------------------------------------------------------------------

def airy_residual(pair):
    return abs(float(airy_det_scaled(pair.k)))


def disloc_residual(pair):
    if pair.side == 0:
        return 0.0
    c, k = pair.c, pair.k
    return abs(math.tan(k * c) - math.tanh(k * (1.0 - c)))


def write_spectrum_csv(pairs, stream):
    """CSV with columns n, k_n, kappa_or_nu, lambda_n, norm_sq, residual.

    For the Airy problem ``norm_sq`` is in the scaled gauge.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["n", "k_n", "kappa_or_nu", "lambda_n", "norm_sq", "residual"])
    for p in pairs:
        if isinstance(p, AiryEigenPair):
            ref, lam, res = p.kappa, p.lam, airy_residual(p)
        else:
            ref, lam, res = p.nu, p.lam, disloc_residual(p)
        writer.writerow([p.n] + [f"{v:.17g}" for v in (p.k, ref, lam, p.norm_sq, res)])


def clear_caches():
    """Drop memoised roots and eigenpairs (for cold-start timing)."""
    for f in (_airy_root_and_offset, _airy_eigenpair, _disloc_root_and_offset, _disloc_eigenpair):
        f.cache_clear()
