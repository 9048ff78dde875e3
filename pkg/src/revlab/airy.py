"""Problem (A): ``u_t = -u_xxx`` on ``(0, 1)`` with ``u(0) = u(1) = 0``, ``u_x(0) = u_x(1)``.

The solution is expanded in the eigenfunctions of ``i d^3/dx^3``.  Its
revival part ``U_R`` is the series over the leading-order modes
``exp(i kappa_n x)``; at rational times ``t = p / (q pi^2)`` it collapses to
a finite sum of translates of ``G`` and of its periodic Hilbert transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import specfun
from ._parallel import chunked_map, tree_sum
from ._polyexp import poly_exp_integral
from .exceptions import DomainError, SingularityError
from .hilbert import DEFAULT_MODES, fourier_series, hilbert_synthesis
from .piecewise import ModulatedFn, PiecewiseFn, wrap
from .validation import AiryRationalTime, check_grid, check_real, check_unit_interval

ALPHA = specfun.ALPHA
DEFAULT_N = 600
DEFAULT_DELTA = 1e-2
_DK_TOL = 1e-12


def kappa(n):
    return (2.0 * np.asarray(n, float) - 1.0 / 3.0) * np.pi


def _prepare(u0):
    return check_real(check_unit_interval(u0))


# -- phases -----------------------------------------------------------------

def _kappa_phase(n, t):
    """``kappa_n**3 * t`` reduced to ``[0, 2 pi)``; exact at rational times."""
    n = np.asarray(n, dtype=np.int64)
    if isinstance(t, AiryRationalTime):
        # kappa^3 t = pi p (6n-1)^3 / (27 q)
        mod = 54 * t.q
        m = (6 * n - 1) % mod
        r = (((m * m) % mod) * m) % mod
        r = (r * (t.p % mod)) % mod
        return np.pi * r / (27.0 * t.q)
    return np.mod(kappa(n) ** 3 * float(t), 2.0 * np.pi)


def _eigen_phase(pairs, t):
    n = np.array([p.n for p in pairs])
    base = _kappa_phase(n, t)
    tt = t.t if isinstance(t, AiryRationalTime) else float(t)
    k = np.array([p.k for p in pairs])
    kap = np.array([p.kappa for p in pairs])
    gam = np.array([p.gamma for p in pairs])
    return base + gam * (k * k + k * kap + kap * kap) * tt


# -- eigen-expansion ----------------------------------------------------------

def _stack(pairs):
    A = np.array([[t.A for t in p.terms.terms] for p in pairs])
    B = np.array([[t.B for t in p.terms.terms] for p in pairs])
    return A, B


def projections(u0, pairs):
    """``<u0, phi_n> / ||phi_n||^2``, computed in the scaled gauge."""
    A, B = _stack(pairs)
    total = np.zeros(A.shape, dtype=complex)
    for lo, hi, c in zip(u0.breaks[:-1], u0.breaks[1:], u0.pieces):
        total = total + poly_exp_integral(c, lo, hi, np.conj(A), np.conj(B))
    norms = np.array([p.norm_sq for p in pairs])
    return total.sum(axis=1) / norms


def _modal_sum(x, A, B, weights):
    """``sum_n 2 Re[w_n sum_r exp(A_nr + B_nr x)]`` over a grid chunk."""
    def chunk(xs):
        ex = np.exp(A[None, :, :] + B[None, :, :] * xs[:, None, None]).sum(axis=2)
        return tree_sum(2.0 * np.real(weights[None, :] * ex), axis=1)
    return chunked_map(chunk, x)


def solve_series(u0, x, t, N=DEFAULT_N, coef=None):
    """Truncated eigenfunction expansion of the solution at time ``t``.

    ``t`` may be a float or an :class:`AiryRationalTime` (exact phases).
    """
    u0 = _prepare(u0)
    x = check_grid(x)
    pairs = specfun.airy_spectrum(N)
    if coef is None:
        coef = projections(u0, pairs)
    A, B = _stack(pairs)
    w = coef * np.exp(1j * _eigen_phase(pairs, t))
    return _modal_sum(x, A, B, w)


def u0_tilde(u0, n):
    """``int_0^1 [u0(y) + u0(1) + u0(0)] exp(-i kappa_n y) dy``."""
    u0 = _prepare(u0)
    n = np.asarray(n)
    g = u0 + (u0(1.0) + u0(0.0))
    B = -1j * kappa(n)
    total = np.zeros(np.shape(B), dtype=complex)
    for lo, hi, c in zip(g.breaks[:-1], g.breaks[1:], g.pieces):
        total = total + poly_exp_integral(c, lo, hi, 0.0, B)
    return total if total.ndim else complex(total)


def ur_series(u0, x, t, N=DEFAULT_N):
    """``sum_{n <= N} 2 Re[u0_tilde(n) exp(i kappa_n^3 t) exp(i kappa_n x)]``."""
    x = check_grid(x)
    n = np.arange(1, int(N) + 1)
    w = u0_tilde(u0, n) * np.exp(1j * _kappa_phase(n, t))
    A = np.zeros((len(n), 1), dtype=complex)
    B = (1j * kappa(n))[:, None]
    return _modal_sum(x, A, B, w)


def uc(u0, x, t, N=DEFAULT_N):
    return solve_series(u0, x, t, N) - ur_series(u0, x, t, N)


# -- closed form at rational times ------------------------------------------

def dk_airy(p, q, k):
    """``(1/q) sum_m exp(2 pi i (m k + (4 m^3 - 2 m^2) p) / q)``."""
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise DomainError("p and q must be coprime")
    k = np.asarray(k, dtype=np.int64)
    m = np.arange(q, dtype=np.int64)
    cubic = ((4 * m**3 - 2 * m**2) * p) % q
    r = (np.multiply.outer(k, m) + cubic) % q
    out = np.exp(2j * np.pi * r / q).mean(axis=-1)
    return out if out.ndim else complex(out)


def g_function(u0):
    """``G(x) = [u0(x) + u0(1) + u0(0)] exp(i pi x / 3)`` as a modulated function."""
    u0 = _prepare(u0)
    return ModulatedFn(u0 + (u0(1.0) + u0(0.0)), 1j * np.pi / 3)


def g_u0(u0, x):
    return g_function(u0)(x)


def singular_abscissae(u0, rt):
    """Points of ``(0, 1)`` where the closed form jumps, with weights.

    Returns ``(x, k, height)`` triples: ``x + p/(3q) - k/q`` hits a jump of
    the periodic extension of ``G`` whose height is multiplied by ``d_k``.
    """
    G = g_function(u0)
    d = dk_airy(rt.p, rt.q, np.arange(rt.q))
    out = []
    for xj, h in G.jumps():
        for k in range(rt.q):
            if abs(d[k]) < _DK_TOL:
                continue
            xs = float(wrap(xj - rt.p / (3.0 * rt.q) + k / rt.q, 1.0))
            out.append((xs, k, complex(h * d[k])))
    out.sort(key=lambda r: r[0])
    return out


def exclusion_mask(x, points, delta):
    """True where ``x`` is at periodic distance >= ``delta`` from all ``points``."""
    x = np.asarray(x, float)
    keep = np.ones(x.shape, dtype=bool)
    for s in points:
        d = np.abs(wrap(x - s + 0.5, 1.0) - 0.5)
        keep &= d >= delta
        # the ends of the interval are also boundary points of the extension
    return keep


@dataclass(frozen=True)
class ClosedFormParts:
    L1: np.ndarray
    L2: np.ndarray
    L3: complex
    UR: np.ndarray


def closed_form_parts(u0, x, rt, n_hilbert=DEFAULT_MODES, delta=0.0, series=None):
    """All pieces of the rational-time closed form on the grid ``x``."""
    u0 = _prepare(u0)
    x = check_grid(x)
    if not isinstance(rt, AiryRationalTime):
        raise DomainError("closed form needs an AiryRationalTime")
    sing = [s for s, _, _ in singular_abscissae(u0, rt)]
    if delta > 0 and not np.all(exclusion_mask(x, sing, delta)):
        raise SingularityError("grid point within delta of a jump/cusp abscissa")
    G = g_function(u0)
    if series is None:
        series = fourier_series(G, n_hilbert)
    d = dk_airy(rt.p, rt.q, np.arange(rt.q))
    L1 = np.zeros(x.shape, dtype=complex)
    L2 = np.zeros(x.shape, dtype=complex)
    for k in range(rt.q):
        if abs(d[k]) < _DK_TOL:
            continue
        y = wrap(x + rt.p / (3.0 * rt.q) - k / rt.q, 1.0)
        L1 = L1 + d[k] * G(y)
        L2 = L2 + d[k] * hilbert_synthesis(series, y)
    L3 = G.integral()
    pref = np.exp(-1j * np.pi * (9.0 * x + rt.p / rt.q) / 27.0)
    UR = np.real(pref * (L1 + 1j * L2 - L3))
    return ClosedFormParts(L1, L2, L3, UR)


def ur_closed(u0, x, rt, n_hilbert=DEFAULT_MODES, delta=DEFAULT_DELTA):
    """Revival part at ``t = p / (q pi^2)`` from the finite closed form."""
    return closed_form_parts(u0, x, rt, n_hilbert, delta).UR


# -- estimator ----------------------------------------------------------------

@dataclass(frozen=True)
class RevivalDecomposition:
    """Grid samples of the solution split into revival and continuous parts.

    ``ur_closed``, ``L1`` and ``L2`` are NaN at excluded points.
    """

    grid: np.ndarray
    u: np.ndarray
    ur_series: np.ndarray
    ur_closed: np.ndarray
    uc: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    L3: complex
    mask: np.ndarray
    singular: tuple

    @property
    def sup_err(self):
        diff = np.abs(self.ur_series - self.ur_closed)[self.mask]
        return float(diff.max()) if diff.size else 0.0

    @property
    def l2_err(self):
        """Discrete L2 norm of the discrepancy over kept points (cell width weights)."""
        diff = np.abs(self.ur_series - self.ur_closed)[self.mask]
        if not diff.size:
            return 0.0
        span = float(self.grid[-1] - self.grid[0]) if len(self.grid) > 1 else 1.0
        h = span / max(len(self.grid) - 1, 1)
        return float(np.sqrt(np.sum(diff**2) * h))

    @property
    def excluded(self):
        return int(np.count_nonzero(~self.mask))


class AiryRevival(BaseEstimator):
    """Eigen-expansion solver for problem (A) with revival diagnostics.

    Parameters
    ----------
    n_modes : int
        Number of positive eigenpairs (negative ones follow by symmetry).
    n_hilbert : int
        Fourier modes used for the Hilbert transform in the closed form.
    delta : float
        Exclusion radius around jump/cusp abscissae.

    ``fit`` takes the initial datum (a real :class:`PiecewiseFn` on
    ``[0, 1]``) and precomputes the spectral coefficients.
    """

    def __init__(self, n_modes=DEFAULT_N, n_hilbert=DEFAULT_MODES, delta=DEFAULT_DELTA):
        self.n_modes = n_modes
        self.n_hilbert = n_hilbert
        self.delta = delta

    def fit(self, u0, y=None):
        if int(self.n_modes) < 1:
            raise DomainError("n_modes must be >= 1")
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        self.u0_ = _prepare(u0)
        self.pairs_ = specfun.airy_spectrum(self.n_modes)
        self.coef_ = projections(self.u0_, self.pairs_)
        self.u0_tilde_ = u0_tilde(self.u0_, np.arange(1, int(self.n_modes) + 1))
        self.g_ = g_function(self.u0_)
        self._series = None
        return self

    def predict(self, x, t):
        """Truncated solution ``u(x, t)`` on the grid ``x``."""
        check_is_fitted(self, "coef_")
        return solve_series(self.u0_, x, t, self.n_modes, coef=self.coef_)

    def revival_series(self, x, t):
        check_is_fitted(self, "coef_")
        x = check_grid(x)
        n = np.arange(1, int(self.n_modes) + 1)
        w = self.u0_tilde_ * np.exp(1j * _kappa_phase(n, t))
        return _modal_sum(x, np.zeros((len(n), 1), complex), (1j * kappa(n))[:, None], w)

    def _g_series(self):
        if self._series is None:
            self._series = fourier_series(self.g_, self.n_hilbert)
        return self._series

    def closed_form(self, x, rt, delta=None):
        check_is_fitted(self, "coef_")
        delta = self.delta if delta is None else delta
        return closed_form_parts(self.u0_, x, rt, self.n_hilbert, delta, self._g_series())

    def decompose(self, x, rt):
        """Series and closed-form pieces at rational time ``rt`` on grid ``x``."""
        check_is_fitted(self, "coef_")
        x = check_grid(x)
        sing = singular_abscissae(self.u0_, rt)
        mask = exclusion_mask(x, [s for s, _, _ in sing], self.delta)
        u = self.predict(x, rt)
        urs = self.revival_series(x, rt)
        L1 = np.full(x.shape, np.nan, dtype=complex)
        L2 = np.full(x.shape, np.nan, dtype=complex)
        urc = np.full(x.shape, np.nan)
        L3 = complex(self.g_.integral())
        if np.any(mask):
            parts = closed_form_parts(self.u0_, x[mask], rt, self.n_hilbert, 0.0, self._g_series())
            L1[mask], L2[mask], urc[mask] = parts.L1, parts.L2, parts.UR
        return RevivalDecomposition(x, u, urs, urc, u - urs, L1, L2, L3, mask, tuple(sing))
