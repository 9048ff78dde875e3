"""Jump and cusp diagnostics for sampled profiles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

DEFAULT_EPS = 1e-3


def jump_estimate(func, x0, eps=DEFAULT_EPS):
    """``f(x0 + eps) - f(x0 - eps)``."""
    v = func(np.array([x0 - eps, x0 + eps]))
    return v[1] - v[0]


def discrepancy(a, b, mask=None, h=None):
    """``(sup, l2)`` of ``a - b`` over ``mask``; ``l2`` weighted by cell width ``h``."""
    diff = np.abs(np.asarray(a) - np.asarray(b))
    if mask is not None:
        diff = diff[mask]
    if not diff.size:
        return 0.0, 0.0
    h = 1.0 / diff.size if h is None else h
    return float(diff.max()), float(np.sqrt(np.sum(diff**2) * h))


@dataclass(frozen=True)
class LadderRow:
    x: float
    predicted: float
    n_modes: tuple
    uc_jumps: tuple
    ur_jumps: tuple

    @property
    def uc_decreasing(self):
        return all(b < a for a, b in zip(self.uc_jumps, self.uc_jumps[1:]))

    @property
    def ur_fraction(self):
        return self.ur_jumps[-1] / self.predicted if self.predicted else math.inf

    def to_dict(self):
        d = asdict(self)
        d.update(uc_decreasing=self.uc_decreasing, ur_fraction=self.ur_fraction)
        return d


def jump_ladder(make_parts, abscissae, predicted, ladder, eps=DEFAULT_EPS):
    """Jump estimates of ``U_C`` and ``U_R`` across each abscissa for a mode ladder.

    ``make_parts(N, x)`` returns ``(u, ur_series)`` on the points ``x``.
    """
    pts = []
    for x0 in abscissae:
        pts.extend((x0 - eps, x0 + eps))
    pts = np.array(pts)
    uc_cols, ur_cols = [], []
    for N in ladder:
        u, ur = make_parts(N, pts)
        uc = u - ur
        uc_cols.append(np.abs(uc[1::2] - uc[0::2]))
        ur_cols.append(np.abs(ur[1::2] - ur[0::2]))
    rows = []
    for i, x0 in enumerate(abscissae):
        rows.append(LadderRow(
            float(x0), float(abs(predicted[i])), tuple(int(n) for n in ladder),
            tuple(float(c[i]) for c in uc_cols), tuple(float(c[i]) for c in ur_cols),
        ))
    return rows


def cusp_growth(func, x0, eps_list=(1e-2, 1e-3, 1e-4)):
    """Fit ``f(x0 +/- eps) ~ c log(1/eps) + r`` on each side.

    Returns ``{'left': (c, residuals), 'right': (c, residuals)}`` with the
    slope fitted by least squares over ``eps_list``.
    """
    eps = np.asarray(eps_list, float)
    logs = np.log(1.0 / eps)
    out = {}
    for name, sgn in (("left", -1.0), ("right", 1.0)):
        vals = np.real(func(x0 + sgn * eps))
        c, r0 = np.polyfit(logs, vals, 1)
        out[name] = (float(c), (vals - c * logs).tolist())
    return out


def detect_jumps(func, lo, hi, m=2048, threshold=0.05, eps=DEFAULT_EPS, sub=41):
    """Locate jump discontinuities of ``func`` on ``(lo, hi)``.

    Cells with a first difference above ``threshold`` are candidates.  Around
    each, ``sub`` points are tried; a point counts as a jump location when
    the symmetric estimates with half-widths ``eps``, ``eps / 3`` and
    ``eps / 10`` all agree with the first to 20% and exceed ``threshold``.
    A symmetric logarithmic cusp gives a vanishing estimate at its centre
    and scale-dependent ones elsewhere, so it is not reported.  Returns
    ``[(x, jump), ...]``.
    """
    dx = (hi - lo) / m
    x = lo + dx * (np.arange(m) + 0.5)
    f = func(x)
    cand = np.nonzero(np.abs(np.diff(f)) > threshold)[0]
    found = []
    for i in cand:
        c = 0.5 * (x[i] + x[i + 1])
        if any(abs(c - y) < 2 * eps for y, _ in found):
            continue
        xs = c + dx * np.linspace(-2.0, 2.0, sub)
        xs = xs[(xs - eps > lo) & (xs + eps < hi)]
        if not xs.size:
            continue
        scales = (eps, eps / 3, eps / 10)
        pts = np.concatenate([np.concatenate((xs - e, xs + e)) for e in scales])
        v = func(pts).reshape(len(scales), 2, -1)
        g = v[:, 1] - v[:, 0]
        dev = np.max(np.abs(g[1:] - g[0]), axis=0)
        g1 = g[0]
        ok = (np.abs(g1) > threshold) & (dev < 0.2 * np.abs(g1))
        if not np.any(ok):
            continue
        score = np.where(ok, dev, np.inf)
        k = int(np.argmin(score))
        found.append((float(xs[k]), complex(g1[k])))
    return found


def nearest(points, x0):
    if not points:
        return math.inf
    return min(abs(p - x0) for p in points)
