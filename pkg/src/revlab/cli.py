"""Command-line front end.

Subcommands ``eigs``, ``solve``, ``revive``, ``hilbert`` and ``compare`` read
a JSON run configuration and write plot-ready CSV (17 significant digits)
plus, for ``compare``, a JSON summary.

Exit codes: 0 success, 2 configuration error, 3 semantic misuse (for
example an irrational time given to ``compare``), 4 accuracy failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import airy, diagnostics, dislocation, hilbert, specfun
from ._parallel import set_threads
from .exceptions import RevlabError
from .piecewise import PiecewiseFn
from .validation import (
    AiryRationalTime,
    DislocRationalTime,
    interior_grid,
    reduce_fraction,
)

log = logging.getLogger("revlab")

EXIT_OK, EXIT_CONFIG, EXIT_MISUSE, EXIT_ACCURACY = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class MisuseError(Exception):
    pass


@dataclass
class RunConfig:
    problem: str
    u0: PiecewiseFn
    b: float = 0.5
    time: dict = field(default_factory=dict)
    modes: int = 600
    hilbert_modes: int = hilbert.DEFAULT_MODES
    grid: int = 512
    delta: float = 1e-2
    threshold: float = 5e-3
    n_range: tuple = (1, 10)
    outputs: dict = field(default_factory=dict)

    @property
    def rational(self):
        return "rational" in self.time

    def pq(self):
        r = self.time["rational"]
        return reduce_fraction(r["p"], r["q"])

    @property
    def side(self):
        return self.time.get("rational", {}).get("side", "left")

    def rational_time(self):
        p, q, _ = self.pq()
        if self.problem == "airy":
            return AiryRationalTime(p, q)
        return DislocRationalTime(p, q, self.b, self.side)

    def time_value(self):
        if self.rational:
            return self.rational_time()
        return float(self.time["real"])


def _parse_u0(spec):
    if not isinstance(spec, dict):
        raise ConfigError("u0 must be a JSON object")
    if "step" in spec:
        s = spec["step"]
        return PiecewiseFn.step(s["breaks"], s["values"])
    if "indicator" in spec:
        a, b = spec["indicator"]
        return PiecewiseFn.indicator(a, b, spec.get("length", 1.0))
    return PiecewiseFn.from_dict(spec)


def parse_config(raw, args=None):
    """Build a :class:`RunConfig` from a dict and optional CLI overrides."""
    try:
        problem = raw["problem"]
        if problem not in ("airy", "dislocation"):
            raise ConfigError(f"unknown problem {problem!r}")
        cfg = RunConfig(problem=problem, u0=_parse_u0(raw["u0"]))
        if problem == "dislocation":
            cfg.b = float(raw["b"])
            if not 0.05 < cfg.b < 0.95:
                raise ConfigError("b must lie in (0.05, 0.95)")
        cfg.time = dict(raw.get("time", {}))
        if cfg.time and not ("rational" in cfg.time or "real" in cfg.time):
            raise ConfigError("time needs a 'rational' or 'real' entry")
        if "rational" in cfg.time:
            side = cfg.time["rational"].get("side", "left")
            if side not in ("left", "right"):
                raise ConfigError("time side must be 'left' or 'right'")
            reduce_fraction(cfg.time["rational"]["p"], cfg.time["rational"]["q"])
        cfg.modes = int(raw.get("modes", 600 if problem == "airy" else 250))
        cfg.hilbert_modes = int(raw.get("hilbert_modes", hilbert.DEFAULT_MODES))
        cfg.grid = int(raw.get("grid", 512))
        cfg.delta = float(raw.get("delta", 1e-2))
        cfg.threshold = float(raw.get("threshold", 5e-3))
        if "n_range" in raw:
            lo, hi = raw["n_range"]
            cfg.n_range = (int(lo), int(hi))
        elif "n_max" in raw:
            cfg.n_range = (1, int(raw["n_max"])) if problem == "airy" else (
                -int(raw["n_max"]), int(raw["n_max"]))
        cfg.outputs = dict(raw.get("outputs", {}))
    except (KeyError, TypeError, ValueError, RevlabError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {exc}") from None
    if args is not None:
        if getattr(args, "n", None) is not None:
            cfg.modes = args.n
            if problem == "airy":
                cfg.n_range = (1, args.n)
            else:
                cfg.n_range = (-args.n, args.n)
        if getattr(args, "modes", None) is not None:
            cfg.hilbert_modes = args.modes
        if getattr(args, "grid", None) is not None:
            cfg.grid = args.grid
        if getattr(args, "delta", None) is not None:
            cfg.delta = args.delta
    if cfg.grid < 16:
        raise ConfigError("grid size must be >= 16")
    if not cfg.delta > 0:
        raise ConfigError("delta must be positive")
    if cfg.modes < 1 or cfg.hilbert_modes < 1:
        raise ConfigError("mode counts must be positive")
    return cfg


# -- output helpers -------------------------------------------------------------

def _fmt(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def write_csv(stream, header, columns):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([r if isinstance(r, str) else _fmt(r) for r in row])


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(type(v))


# -- subcommands ------------------------------------------------------------------

def cmd_eigs(cfg):
    lo, hi = cfg.n_range
    buf = io.StringIO()
    if cfg.problem == "airy":
        pairs = [specfun.airy_eigenpair(n) for n in range(max(lo, 1), hi + 1)]
        if lo < 1:
            log.warning("Airy indices start at 1; n < 1 omitted")
    else:
        pairs = []
        for n in range(lo, hi + 1):
            try:
                pairs.append(specfun.disloc_eigenpair(cfg.b, n))
            except RevlabError as exc:
                log.warning("n=%d omitted: %s", n, exc)
    specfun.write_spectrum_csv(pairs, buf)
    return buf.getvalue()


def _grid(cfg, lo=0.0, hi=1.0):
    return interior_grid(cfg.grid, lo, hi)


def cmd_solve(cfg):
    if not cfg.time:
        raise ConfigError("solve needs a time")
    t = cfg.time_value()
    x = _grid(cfg)
    buf = io.StringIO()
    if cfg.problem == "airy":
        est = airy.AiryRevival(n_modes=cfg.modes, n_hilbert=cfg.hilbert_modes, delta=cfg.delta)
        est.fit(cfg.u0)
        u = est.predict(x, t)
        ur = est.revival_series(x, t)
        write_csv(buf, ["x", "u", "UR_series", "UC"], [x, u, ur, u - ur])
        return buf.getvalue()
    b = cfg.b
    est = dislocation.DislocationRevival(b=b, n_modes=cfg.modes, n_hilbert=cfg.hilbert_modes,
                                         delta=cfg.delta).fit(cfg.u0)
    u = est.predict(x, t)
    ur = np.full(x.shape, np.nan, dtype=complex)
    left = x < b
    ur[left] = dislocation.ur_series_dis(cfg.u0, b, x[left], t, cfg.modes, coef=est.utilde_left_)
    tt = t.t if hasattr(t, "t") else t
    right = ~left
    ur[right] = dislocation.ur_series_dis(est.ru0_, est.rb_, 1.0 - x[right], -tt, cfg.modes,
                                          coef=est.utilde_right_)
    uc = u - ur
    side = np.where(left, "L", "R")
    write_csv(buf, ["x", "re_u", "im_u", "re_UR", "im_UR", "re_UC", "im_UC", "side"],
              [x, u.real, u.imag, ur.real, ur.imag, uc.real, uc.imag, side])
    return buf.getvalue()


def _require_rational(cfg, what):
    if not cfg.rational:
        raise MisuseError(f"{what} requires rational time")


def cmd_revive(cfg):
    _require_rational(cfg, "revive")
    rt = cfg.rational_time()
    buf = io.StringIO()
    if cfg.problem == "airy":
        x = _grid(cfg)
        est = airy.AiryRevival(n_modes=1, n_hilbert=cfg.hilbert_modes, delta=cfg.delta).fit(cfg.u0)
        sing = [s for s, _, _ in airy.singular_abscissae(est.u0_, rt)]
        mask = airy.exclusion_mask(x, sing, cfg.delta)
        cols = [np.full(x.shape, np.nan, dtype=complex) for _ in range(3)]
        if np.any(mask):
            parts = est.closed_form(x[mask], rt)
            cols[0][mask], cols[1][mask], cols[2][mask] = parts.UR, parts.L1, parts.L2
        write_csv(buf, ["x", "UR_closed", "L1_re", "L1_im", "L2_re", "L2_im"],
                  [x, cols[0].real, cols[1].real, cols[1].imag, cols[2].real, cols[2].imag])
        return buf.getvalue()
    b = cfg.b
    u0, bb = (cfg.u0, b) if rt.side == "left" else dislocation.reflect_problem(cfg.u0, b)
    lo, hi = (0.0, b) if rt.side == "left" else (b, 1.0)
    x = _grid(cfg, lo, hi)
    xr = x if rt.side == "left" else 1.0 - x
    rts = DislocRationalTime(rt.p, rt.q, bb, "left")
    sing = [s for s, _, _ in dislocation.singular_abscissae_dis(u0, bb, rts)]
    mask = np.ones(x.shape, dtype=bool)
    for s in sing:
        mask &= np.abs(xr - s) >= cfg.delta * bb
    cols = [np.full(x.shape, np.nan, dtype=complex) for _ in range(4)]
    if np.any(mask):
        parts = dislocation.closed_form_parts_dis(u0, bb, xr[mask], rts, cfg.hilbert_modes)
        for c, v in zip(cols, (parts.UR, parts.L1, parts.L2, parts.L3)):
            c[mask] = v
    side = np.full(x.shape, "L" if rt.side == "left" else "R")
    write_csv(buf, ["x", "re_UR", "im_UR", "re_L1", "im_L1", "re_L2", "im_L2", "re_L3", "im_L3", "side"],
              [x] + [f(c) for c in cols for f in (np.real, np.imag)] + [side])
    return buf.getvalue()


def cmd_hilbert(cfg):
    f = cfg.u0
    s = hilbert.fourier_series(f, cfg.hilbert_modes)
    x = interior_grid(cfg.grid, 0.0, f.length)
    h = hilbert.hilbert_synthesis(s, x)
    buf = io.StringIO()
    write_csv(buf, ["x", "re_Hu", "im_Hu"], [x, h.real, h.imag])
    return buf.getvalue()


def _cusp_rates(func, points, scale):
    out = []
    for x0 in points:
        eps = [e * scale for e in (1e-2, 1e-3, 1e-4)]
        try:
            g = diagnostics.cusp_growth(func, x0, eps)
        except RevlabError:
            continue
        out.append({"x": x0, "left": g["left"][0], "right": g["right"][0]})
    return out


def cmd_compare(cfg):
    _require_rational(cfg, "compare")
    rt = cfg.rational_time()
    p, q, reduced = cfg.pq()
    eps = diagnostics.DEFAULT_EPS
    if cfg.problem == "airy":
        x = _grid(cfg)
        est = airy.AiryRevival(n_modes=cfg.modes, n_hilbert=cfg.hilbert_modes, delta=cfg.delta)
        d = est.fit(cfg.u0).decompose(x, rt)
        scale = 1.0
        closed = lambda xs: est.closed_form(xs, rt, delta=0.0).UR
        series = lambda xs: est.revival_series(xs, rt)
        def predicted(s, j):
            return complex(np.real(np.exp(-1j * np.pi * (9 * s + p / q) / 27) * j))
        csv_header = ["x", "u", "UR_series", "UR_closed", "UC", "L1_re", "L1_im", "L2_re", "L2_im"]
        csv_cols = [x, d.u, d.ur_series, d.ur_closed, d.uc,
                    d.L1.real, d.L1.imag, d.L2.real, d.L2.imag]
        lo, hi = 0.0, 1.0
    else:
        b = cfg.b
        lo, hi = (0.0, b) if rt.side == "left" else (b, 1.0)
        x = _grid(cfg, lo, hi)
        est = dislocation.DislocationRevival(b=b, n_modes=cfg.modes, n_hilbert=cfg.hilbert_modes,
                                             delta=cfg.delta).fit(cfg.u0)
        d = est.decompose(x, rt)
        u0s, bs, ut = est._side_data(rt.side)
        rts = DislocRationalTime(rt.p, rt.q, bs, "left")
        scale = bs
        if rt.side == "left":
            closed = lambda xs: dislocation.closed_form_parts_dis(
                u0s, bs, xs, rts, series=est._g_series("left")).UR
            series = lambda xs: dislocation.ur_series_dis(u0s, bs, xs, rts, cfg.modes, coef=ut)
        else:
            closed = lambda xs: dislocation.closed_form_parts_dis(
                u0s, bs, 1.0 - xs, rts, series=est._g_series("right")).UR
            series = lambda xs: dislocation.ur_series_dis(u0s, bs, 1.0 - xs, rts, cfg.modes, coef=ut)
        predicted = lambda s, j: j
        side = np.full(x.shape, "L" if rt.side == "left" else "R")
        csv_header = ["x", "re_u", "im_u", "re_UR", "im_UR", "re_UR_closed", "im_UR_closed",
                      "re_UC", "im_UC", "side"]
        csv_cols = [x, d.u.real, d.u.imag, d.ur_series.real, d.ur_series.imag,
                    d.ur_closed.real, d.ur_closed.imag, d.uc.real, d.uc.imag, side]
    table = []
    interior = [(s, k, j) for s, k, j in d.singular if lo + eps < s < hi - eps]
    for s, k, j in interior:
        table.append({
            "x": s, "k": k,
            "predicted": predicted(s, j),
            "closed": complex(diagnostics.jump_estimate(closed, s, eps)),
            "series": complex(diagnostics.jump_estimate(series, s, eps)),
        })
    summary = {
        "problem": cfg.problem, "p": p, "q": q, "reduced": reduced,
        "N": cfg.modes, "N_H": cfg.hilbert_modes, "delta": cfg.delta,
        "sup_err": d.sup_err, "l2_err": d.l2_err, "threshold": cfg.threshold,
        "excluded_points": d.excluded, "jump_table": table,
        "cusp_growth_rates": _cusp_rates(closed, [s for s, _, _ in interior], scale),
    }
    if cfg.problem == "dislocation":
        summary["b"] = cfg.b
        summary["side"] = rt.side
    summary["pass"] = bool(d.sup_err < cfg.threshold)
    buf = io.StringIO()
    write_csv(buf, csv_header, csv_cols)
    return summary, buf.getvalue()


# -- entry point --------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="revlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("eigs", "solve", "revive", "hilbert", "compare"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", help="output path (CSV, or JSON for compare); default stdout")
        sp.add_argument("--csv", help="compare only: also write the profile CSV here")
        sp.add_argument("--n", type=int, help="eigenfunction modes N")
        sp.add_argument("--modes", type=int, help="Hilbert modes N_H")
        sp.add_argument("--grid", type=int, help="grid size M")
        sp.add_argument("--delta", type=float, help="exclusion radius")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")
    return ap


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    set_threads(args.threads)
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        cfg = parse_config(raw, args)
        if args.command == "compare":
            summary, table = cmd_compare(cfg)
            _emit(json.dumps(summary, indent=2, default=_jsonable) + "\n",
                  args.out or cfg.outputs.get("json"))
            if args.csv or cfg.outputs.get("csv"):
                _emit(table, args.csv or cfg.outputs.get("csv"))
            if not summary["pass"]:
                log.error("sup_err %.3g exceeds threshold %.3g", summary["sup_err"], cfg.threshold)
                return EXIT_ACCURACY
            return EXIT_OK
        handler = {"eigs": cmd_eigs, "solve": cmd_solve, "revive": cmd_revive,
                   "hilbert": cmd_hilbert}[args.command]
        _emit(handler(cfg), args.out or cfg.outputs.get("csv"))
        return EXIT_OK
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except MisuseError as exc:
        log.error("%s", exc)
        return EXIT_MISUSE
    except RevlabError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
