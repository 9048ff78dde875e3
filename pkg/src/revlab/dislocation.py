"""Problem (D): ``i u_t = (sgn(x - b) u_x)_x`` on ``(0, 1)`` with Dirichlet ends.

The operator changes sign at the dislocation ``b`` and the derivative flips
there, ``u_x(b+) = -u_x(b-)``.  On ``(0, b)`` the revival part is a sine
series over ``nu_n = (pi / b)(n + 1/4)``; at times ``t = 2 b^2 p / (pi q)``
it becomes a finite sum of translates of a function ``G`` on ``[0, 2]`` and
its 2-periodic Hilbert transform.  The interval ``(b, 1)`` is handled by
reflecting the problem: ``u(x, t) = v(1 - x, -t)`` where ``v`` solves the
problem with data ``u0(1 - x)`` and dislocation ``1 - b``.
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
from .airy import RevivalDecomposition
from .exceptions import DomainError, SingularityError
from .hilbert import DEFAULT_MODES, fourier_exact, fourier_series, hilbert_synthesis
from .piecewise import ModulatedFn, PiecewiseFn, wrap
from .validation import DislocRationalTime, check_b, check_grid, check_unit_interval

DEFAULT_N = 250
DEFAULT_DELTA = 1e-2
_DK_TOL = 1e-12


def nu(b, n):
    return np.pi / b * (np.asarray(n, float) + 0.25)


def _prepare(u0, b):
    return check_unit_interval(u0), check_b(b)


# -- phases -------------------------------------------------------------------

def _nu_phase(n, t):
    """``nu_n**2 * |t|`` mod ``2 pi`` for the side matching ``t``; exact when rational."""
    n = np.asarray(n, dtype=np.int64)
    mod = 16 * t.q
    m = (4 * n + 1) % mod
    r = (((m * m) % mod) * (t.p % mod)) % mod
    return 2.0 * np.pi * r / mod


def _time_value(t):
    return t.t if isinstance(t, DislocRationalTime) else float(t)


def _eigen_phase(pairs, t):
    """``-lambda_n t`` reduced mod ``2 pi``.

    For rational times the modes whose side matches the time scale get the
    exact integer reduction of ``nu**2 t`` plus the small correction
    ``gamma (2 nu + gamma) t``.
    """
    tt = _time_value(t)
    out = np.empty(len(pairs))
    for i, p in enumerate(pairs):
        exact = (
            isinstance(t, DislocRationalTime)
            and p.side != 0
            and p.n != 0
            and ((t.side == "left" and p.side > 0) or (t.side == "right" and p.side < 0))
        )
        if exact:
            # -lambda t = -side k^2 t, and side * t > 0 here
            base = float(_nu_phase(abs(p.n), t))
            corr = p.gamma * (2.0 * p.nu + p.gamma) * abs(tt)
            out[i] = -(base + corr)
        else:
            out[i] = math.fmod(-p.lam * tt, 2.0 * math.pi)
    return out


# -- eigen-expansion ----------------------------------------------------------

def spectrum(b, N):
    """Signed-index eigenpairs ``-N..N`` (the ``n = 0`` slot holds the extra mode)."""
    return specfun.disloc_spectrum(check_b(b), N)


def _groups(pairs):
    """Split pairs into arrays of shape ``(modes, terms)`` grouped by term layout."""
    groups = {}
    for i, p in enumerate(pairs):
        key = tuple((t.lo, t.hi, tuple(np.atleast_1d(t.poly).tolist())) for t in p.terms.terms)
        groups.setdefault(key, []).append(i)
    out = []
    for key, idx in groups.items():
        A = np.array([[t.A for t in pairs[i].terms.terms] for i in idx])
        B = np.array([[t.B for t in pairs[i].terms.terms] for i in idx])
        out.append((key, np.array(idx), A, B))
    return out


def projections(u0, pairs):
    """``<u0, phi_n> / ||phi_n||^2`` by exact integration."""
    coef = np.zeros(len(pairs), dtype=complex)
    for key, idx, A, B in _groups(pairs):
        acc = np.zeros(len(idx), dtype=complex)
        for j, (tlo, thi, poly) in enumerate(key):
            tpoly = np.conj(np.asarray(poly))
            for lo, hi, c in zip(u0.breaks[:-1], u0.breaks[1:], u0.pieces):
                a, e = max(lo, tlo), min(hi, thi)
                if e <= a:
                    continue
                acc = acc + poly_exp_integral(
                    np.polynomial.polynomial.polymul(c, tpoly), a, e,
                    np.conj(A[:, j]), np.conj(B[:, j]),
                )
        coef[idx] = acc
    norms = np.array([p.norm_sq for p in pairs])
    return coef / norms


def _modal_sum(x, pairs, weights):
    groups = _groups(pairs)

    def chunk(xs):
        total = np.zeros((len(xs), len(pairs)), dtype=complex)
        for key, idx, A, B in groups:
            last = max(hi for _, hi, _ in key)
            vals = np.zeros((len(xs), len(idx)), dtype=complex)
            for j, (lo, hi, poly) in enumerate(key):
                upper = xs <= hi if hi == last else xs < hi
                inside = (xs >= lo) & upper
                if not np.any(inside):
                    continue
                expo = A[None, :, j] + B[None, :, j] * xs[:, None]
                expo = np.where(inside[:, None], expo, -np.inf)
                pv = np.polynomial.polynomial.polyval(xs, np.asarray(poly))
                vals = vals + np.exp(expo) * np.where(inside, pv, 0.0)[:, None]
            total[:, idx] = vals * weights[None, idx]
        return tree_sum(total, axis=1)

    return chunked_map(chunk, x)


def solve_series_dis(u0, b, x, t, N=DEFAULT_N, coef=None):
    """Truncated eigen-expansion ``sum_{|n|<=N} c_n exp(-i lambda_n t) phi_n(x)``."""
    u0, b = _prepare(u0, b)
    x = check_grid(x)
    pairs = spectrum(b, N)
    if coef is None:
        coef = projections(u0, pairs)
    w = coef * np.exp(1j * _eigen_phase(pairs, t))
    return _modal_sum(x, pairs, w)


def u0_tilde_dis(u0, b, n):
    """``2 int_0^1 [u0(b y) sin(pi (n+1/4) y) + u0(b+) cos(pi (n+1/4) y)] dy``."""
    u0, b = _prepare(u0, b)
    n = np.asarray(n)
    theta = np.pi * (n.astype(float) + 0.25)
    g = u0.pullback(b, 0.0, 0.0, 1.0)
    ub = complex(u0.right_limit(b))
    ep = np.zeros(theta.shape, dtype=complex)
    em = np.zeros(theta.shape, dtype=complex)
    for lo, hi, c in zip(g.breaks[:-1], g.breaks[1:], g.pieces):
        ep = ep + poly_exp_integral(c, lo, hi, 0.0, 1j * theta)
        em = em + poly_exp_integral(c, lo, hi, 0.0, -1j * theta)
    sin_part = (ep - em) / 2j
    cos_part = ub * np.sin(theta) / theta
    out = 2.0 * (sin_part + cos_part)
    return out if out.ndim else complex(out)


def ur_series_dis(u0, b, x, t, N=DEFAULT_N, coef=None):
    """``sum_{n<=N} u0_tilde(n) exp(-i nu_n^2 t) sin(nu_n x)`` on ``(0, b)``."""
    u0, b = _prepare(u0, b)
    x = check_grid(x, 0.0, b)
    n = np.arange(1, int(N) + 1)
    if coef is None:
        coef = u0_tilde_dis(u0, b, n)
    if isinstance(t, DislocRationalTime) and t.side == "left" and t.b == b:
        phase = -_nu_phase(n, t)
    else:
        phase = -np.mod(nu(b, n) ** 2 * _time_value(t), 2.0 * np.pi)
    w = coef * np.exp(1j * phase)
    k = nu(b, n)

    def chunk(xs):
        return tree_sum(w[None, :] * np.sin(np.multiply.outer(xs, k)), axis=1)

    return chunked_map(chunk, x)


# -- closed form ----------------------------------------------------------------

def dk_dis(p, q, k):
    """``(1/(2q)) sum_{m<2q} exp(-i (m+1/4)^2 2 pi p / q) exp(i pi m k / q)``."""
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise DomainError("p and q must be coprime")
    k = np.asarray(k, dtype=np.int64)
    m = np.arange(2 * q, dtype=np.int64)
    mod = 16 * q
    quad = ((4 * m + 1) ** 2 * p) % mod
    r = (8 * np.multiply.outer(k, m) - quad) % mod
    out = np.exp(2j * np.pi * r / mod).mean(axis=-1)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class GbFunction:
    """``G`` on ``[0, 2]``: the modulated, doubled copy of ``u0`` on ``(0, b)``."""

    b: float
    fn: ModulatedFn

    @property
    def base(self):
        return self.fn.base

    def __call__(self, x):
        return self.fn(x)

    def periodic(self, y):
        return self.fn.periodic(y)

    def jumps(self):
        return self.fn.jumps()

    def integral(self):
        return self.fn.integral()

    @property
    def mean(self):
        return self.fn.integral() / 2.0


def g_u0_b(u0, b):
    u0, b = _prepare(u0, b)
    ub = complex(u0.right_limit(b))
    left = u0.pullback(b, 0.0, 0.0, 1.0) * 1j + ub
    right = u0.pullback(-b, 2.0 * b, 1.0, 2.0) + 1j * ub
    return GbFunction(b, ModulatedFn(left.concat(right), -0.25j * np.pi))


def singular_abscissae_dis(u0, b, rt):
    """``(x, k, jump)`` for the points of ``(0, b)`` where the closed form jumps.

    ``jump`` is the predicted right-minus-left jump of ``L1`` there.
    """
    u0, b = _prepare(u0, b)
    G = g_u0_b(u0, b)
    d = dk_dis(rt.p, rt.q, np.arange(2 * rt.q))
    out = []
    for yj, h in G.jumps():
        for k in range(2 * rt.q):
            if abs(d[k]) < _DK_TOL:
                continue
            # x/b - k/q = yj  and  -x/b - k/q = yj  (mod 2)
            for sgn in (1.0, -1.0):
                y = float(wrap(sgn * (yj + k / rt.q), 2.0))
                # the ends 0 and b count too: the interval boundary is hit there
                if y > 2.0 - 1e-12:
                    y = 0.0
                xs = b * y
                if xs > b * (1.0 + 1e-12):
                    continue
                xs = min(xs, b)
                if sgn > 0:
                    jump = -0.5j * d[k] * np.exp(1j * np.pi * xs / (4 * b)) * h
                else:
                    jump = -0.5j * d[k] * np.exp(-1j * np.pi * xs / (4 * b)) * h
                out.append((xs, k, complex(jump)))
    out.sort(key=lambda r: r[0])
    return out


def _mask(x, points, radius):
    x = np.asarray(x, float)
    keep = np.ones(x.shape, dtype=bool)
    for s in points:
        keep &= np.abs(x - s) >= radius
    return keep


@dataclass(frozen=True)
class DislocClosedParts:
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    UR: np.ndarray


def closed_form_parts_dis(u0, b, x, rt, n_hilbert=DEFAULT_MODES, delta=0.0, series=None):
    u0, b = _prepare(u0, b)
    x = check_grid(x, 0.0, b)
    G = g_u0_b(u0, b)
    if delta > 0:
        sing = [s for s, _, _ in singular_abscissae_dis(u0, b, rt)]
        if not np.all(_mask(x, sing, delta * b)):
            raise SingularityError("grid point within delta*b of a jump/cusp abscissa")
    if series is None:
        series = fourier_series(G.fn, n_hilbert)
    d = dk_dis(rt.p, rt.q, np.arange(2 * rt.q))
    ep = np.exp(1j * np.pi * x / (4 * b))
    em = np.exp(-1j * np.pi * x / (4 * b))
    L1 = np.zeros(x.shape, dtype=complex)
    L2 = np.zeros(x.shape, dtype=complex)
    for k in range(2 * rt.q):
        if abs(d[k]) < _DK_TOL:
            continue
        yp = wrap(x / b - k / rt.q, 2.0)
        ym = wrap(-x / b - k / rt.q, 2.0)
        L1 = L1 + 0.5 * d[k] * (1j * em * G(ym) - 1j * ep * G(yp))
        L2 = L2 + 0.5 * d[k] * (ep * hilbert_synthesis(series, yp) - em * hilbert_synthesis(series, ym))
    L3 = -G.mean * np.sin(np.pi * x / (4 * b)) * d.sum()
    return DislocClosedParts(L1, L2, L3, L1 + L2 + L3)


def ur_closed_dis(u0, b, x, rt, n_hilbert=DEFAULT_MODES, delta=DEFAULT_DELTA):
    """Revival part on ``(0, b)`` at ``t = 2 b^2 p / (pi q)`` from the closed form."""
    return closed_form_parts_dis(u0, b, x, rt, n_hilbert, delta).UR


def reflect_problem(u0, b):
    """``(u0(1 - x), 1 - b)``; then ``u(x, t) = v(1 - x, -t)``."""
    u0, b = _prepare(u0, b)
    return u0.reflect(), 1.0 - b


def ur_closed_right(u0, b, x, rt, n_hilbert=DEFAULT_MODES, delta=DEFAULT_DELTA):
    """Revival part on ``(b, 1)`` at ``t = -2 (1-b)^2 p / (pi q)``."""
    ru0, rb = reflect_problem(u0, b)
    x = check_grid(x, b, 1.0)
    rt_ref = DislocRationalTime(rt.p, rt.q, rb, "left")
    return ur_closed_dis(ru0, rb, 1.0 - x, rt_ref, n_hilbert, delta)


# -- estimator ------------------------------------------------------------------

class DislocationRevival(BaseEstimator):
    """Eigen-expansion solver for problem (D) with revival diagnostics.

    Parameters
    ----------
    b : float
        Dislocation point in ``(0, 1)``.
    n_modes : int
        Modes per sign; indices ``-n_modes..n_modes`` are used.
    n_hilbert : int
        Fourier modes for the Hilbert transform of ``G``.
    delta : float
        Exclusion radius, relative to the length of the revival side.
    """

    def __init__(self, b=0.35, n_modes=DEFAULT_N, n_hilbert=DEFAULT_MODES, delta=DEFAULT_DELTA):
        self.b = b
        self.n_modes = n_modes
        self.n_hilbert = n_hilbert
        self.delta = delta

    def fit(self, u0, y=None):
        b = check_b(self.b)
        if int(self.n_modes) < 1:
            raise DomainError("n_modes must be >= 1")
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        self.u0_ = check_unit_interval(u0)
        self.pairs_ = spectrum(b, self.n_modes)
        self.coef_ = projections(self.u0_, self.pairs_)
        n = np.arange(1, int(self.n_modes) + 1)
        self.ru0_, self.rb_ = reflect_problem(self.u0_, b)
        self.utilde_left_ = u0_tilde_dis(self.u0_, b, n)
        self.utilde_right_ = u0_tilde_dis(self.ru0_, self.rb_, n)
        self._series = {}
        return self

    def predict(self, x, t):
        check_is_fitted(self, "coef_")
        return solve_series_dis(self.u0_, self.b, x, t, self.n_modes, coef=self.coef_)

    def _side_data(self, side):
        if side == "left":
            return self.u0_, float(self.b), self.utilde_left_
        return self.ru0_, self.rb_, self.utilde_right_

    def _g_series(self, side):
        if side not in self._series:
            u0, b, _ = self._side_data(side)
            self._series[side] = fourier_series(g_u0_b(u0, b).fn, self.n_hilbert)
        return self._series[side]

    def decompose(self, x, rt):
        """Series/closed-form split on the side selected by ``rt.side``.

        For ``side == 'right'`` the grid must lie in ``(b, 1)``; the closed
        form is evaluated on the reflected problem at ``1 - x``.
        """
        check_is_fitted(self, "coef_")
        side = rt.side
        u0, b, ut = self._side_data(side)
        x = np.asarray(x, float)
        xr = x if side == "left" else 1.0 - x
        xr = check_grid(xr, 0.0, b)
        rt_side = DislocRationalTime(rt.p, rt.q, b, "left")
        sing = singular_abscissae_dis(u0, b, rt_side)
        mask = _mask(xr, [s for s, _, _ in sing], self.delta * b)
        u = self.predict(x, rt)
        urs = ur_series_dis(u0, b, xr, rt_side, self.n_modes, coef=ut)
        L1 = np.full(x.shape, np.nan, dtype=complex)
        L2 = np.full(x.shape, np.nan, dtype=complex)
        urc = np.full(x.shape, np.nan, dtype=complex)
        L3 = np.full(x.shape, np.nan, dtype=complex)
        if np.any(mask):
            parts = closed_form_parts_dis(u0, b, xr[mask], rt_side, self.n_hilbert, 0.0,
                                          self._g_series(side))
            L1[mask], L2[mask], L3[mask], urc[mask] = parts.L1, parts.L2, parts.L3, parts.UR
        if side == "right":
            sing = [(1.0 - s, k, -j) for s, k, j in sing][::-1]
        return RevivalDecomposition(x, u, urs, urc, u - urs, L1, L2, L3, mask, tuple(sing))
