import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from revlab import DislocationRevival, DislocRationalTime, DomainError, PiecewiseFn, SingularityError
from revlab import dislocation as dis
from revlab import hilbert, specfun

ZERO = PiecewiseFn.constant(0.0)


def _gl(f, edges, nodes=20):
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        xs = 0.5 * (b - a) * xg + 0.5 * (a + b)
        total += 0.5 * (b - a) * np.sum(wg * f(xs))
    return total


def _mode_as_data(b, n):
    p = specfun.disloc_eigenpair(b, n)
    f = lambda x: specfun.disloc_eigfun(b, p, np.clip(x, 0, 1))
    brk = np.unique(np.concatenate((np.linspace(0, b, 9), np.linspace(b, 1, 9))))
    return p, PiecewiseFn.from_callable(f, brk)


@pytest.fixture(scope="module")
def jump_left():
    return PiecewiseFn.step([0.0, 0.2, 1.0], [1.0, 0.0])


def test_u0_tilde_examples():
    n = np.arange(1, 10)
    assert np.all(dis.u0_tilde_dis(ZERO, 0.4, n) == 0)
    th = np.pi * (n + 0.25)
    ref = 2 * (1 - np.cos(th)) / th + 2 * np.sin(th) / th
    assert np.allclose(dis.u0_tilde_dis(PiecewiseFn.constant(1.0), 0.4, n), ref, atol=1e-14)


@pytest.mark.parametrize("b", [0.35, 0.5, 0.7])
def test_u0_tilde_is_twice_g_coefficient(b):
    u0 = PiecewiseFn([0, 0.15, 0.6, 1], [[0, 2], [1.0, -1, 0.5], [0.25j]])
    n = np.arange(1, 65)
    G = dis.g_u0_b(u0, b)
    ghat = hilbert.fourier_exact(G.fn, 0.0, n)
    assert np.max(np.abs(dis.u0_tilde_dis(u0, b, n) - 2 * ghat)) < 1e-12
    # the identity without the factor 2 does not hold
    assert np.max(np.abs(dis.u0_tilde_dis(u0, b, n) - ghat)) > 1e-3


def test_ur_series_coefficient_paths_agree(jump_left):
    b = 0.35
    n = np.arange(1, 201)
    x = np.linspace(0.01, 0.34, 50)
    t = DislocRationalTime(1, 2, b)
    a = dis.ur_series_dis(jump_left, b, x, t, 200)
    c = 2 * hilbert.fourier_exact(dis.g_u0_b(jump_left, b).fn, 0.0, n)
    bb = dis.ur_series_dis(jump_left, b, x, t, 200, coef=c)
    assert np.max(np.abs(a - bb)) < 1e-12
    assert np.all(dis.ur_series_dis(ZERO, b, x, 0.1, 50) == 0)


@pytest.mark.parametrize("b, n", [(0.35, 3), (0.35, -2), (0.5, 0), (0.62, 3)])
def test_single_mode_evolution(b, n):
    p, u0 = _mode_as_data(b, n)
    x = np.linspace(0.01, 0.99, 64)
    for t in (0.0, 0.0137, -0.21):
        u = dis.solve_series_dis(u0, b, x, t, 12)
        assert np.max(np.abs(np.abs(u) - np.abs(specfun.disloc_eigfun(b, p, x)))) < 1e-6


def test_l2_conservation(jump_left):
    b, N = 0.35, 60
    edges = np.concatenate((np.linspace(0, b, 120), np.linspace(b, 1, 200)[1:]))
    pairs = dis.spectrum(b, N)
    coef = dis.projections(jump_left, pairs)
    parseval = np.sum(np.abs(coef) ** 2 * np.array([p.norm_sq for p in pairs]))
    for t in (0.0, 0.013, 0.2, -0.07):
        u = lambda xs: np.abs(dis.solve_series_dis(jump_left, b, xs, t, N, coef=coef)) ** 2
        assert abs(_gl(u, edges) - parseval) < 1e-10


def test_hat_mode_included_at_half():
    pairs = dis.spectrum(0.5, 3)
    assert [p.n for p in pairs] == [-3, -2, -1, 0, 1, 2, 3]
    assert pairs[3].side == 0


def test_dk_examples():
    for p, q in [(1, 1), (1, 2), (2, 3), (3, 4)]:
        d = dis.dk_dis(p, q, np.arange(2 * q))
        assert abs(d.sum() - np.exp(-1j * np.pi * p / (8 * q))) < 1e-12
        for n in range(1, 4 * q + 1):
            lhs = np.sum(d * np.exp(-1j * np.pi * n * np.arange(2 * q) / q))
            assert abs(lhs - np.exp(-1j * (n + 0.25) ** 2 * 2 * np.pi * p / q)) < 1e-12
    with pytest.raises(DomainError):
        dis.dk_dis(2, 4, 0)


@pytest.mark.parametrize("p, q", [(1, 1), (1, 2), (2, 3)])
def test_modularity(p, q):
    ph = lambda n: np.exp(-1j * (n + 0.25) ** 2 * 2 * np.pi * p / q)
    for n in range(8 * q + 1):
        for m in range(n % (2 * q), 8 * q + 1, 2 * q):
            assert abs(ph(n) - ph(m)) < 1e-11


def test_g_endpoint_values():
    u0 = PiecewiseFn([0, 0.3, 1], [[0.5, 1], [2.0, 0, 1]])
    b = 0.6
    G = dis.g_u0_b(u0, b)
    ub = u0.right_limit(b)
    assert G(0.0) == pytest.approx(ub + 1j * u0(0.0))
    assert G(2.0) == pytest.approx(ub - 1j * u0(0.0))
    assert G.base.left_limit(1.0) == pytest.approx(G.base.right_limit(1.0))
    assert np.all(dis.g_u0_b(ZERO, b)(np.linspace(0, 2, 9)) == 0)


def test_g_jump_at_one_when_discontinuous_at_b():
    u0 = PiecewiseFn.step([0, 0.5, 1], [1.0, 0.0])
    G = dis.g_u0_b(u0, 0.5)
    xs = [x for x, _ in G.jumps()]
    assert 1.0 in xs


def test_zero_closed_form():
    x = np.linspace(0.05, 0.3, 7)
    assert np.all(dis.ur_closed_dis(ZERO, 0.35, x, DislocRationalTime(1, 2, 0.35), 128, 0.0) == 0)


def test_closed_form_guard(jump_left):
    b = 0.35
    rt = DislocRationalTime(1, 2, b)
    s = [p for p, _, _ in dis.singular_abscissae_dis(jump_left, b, rt) if 0 < p < b][0]
    with pytest.raises(SingularityError):
        dis.ur_closed_dis(jump_left, b, np.array([s + 1e-4]), rt, 128, 1e-2)


def test_l3_is_smooth(jump_left):
    b = 0.35
    rt = DislocRationalTime(1, 1, b)
    x = np.linspace(0.001, 0.349, 200)
    parts = dis.closed_form_parts_dis(jump_left, b, x, rt, 256)
    G = dis.g_u0_b(jump_left, b)
    ref = -G.integral() / 2 * np.sin(np.pi * x / (4 * b)) * np.exp(-1j * np.pi / 8)
    assert np.allclose(parts.L3, ref, atol=1e-14)


def test_closed_form_matches_series_half():
    u0 = PiecewiseFn.step([0, 0.2, 1], [1.0, 0.0])
    est = DislocationRevival(b=0.5, n_modes=2000, n_hilbert=2**15).fit(u0)
    d = est.decompose((np.arange(512) + 0.5) / 512 * 0.5, DislocRationalTime(1, 1, 0.5))
    assert d.sup_err < 1e-2


def test_reflection_helpers(jump_left):
    r, rb = dis.reflect_problem(jump_left, 0.35)
    assert rb == pytest.approx(0.65)
    rr, rrb = dis.reflect_problem(r, rb)
    assert np.allclose(rr.breaks, jump_left.breaks)
    for a, c in zip(rr.pieces, jump_left.pieces):
        assert np.allclose(a, c)
    assert rrb == pytest.approx(0.35)


def test_spectrum_map():
    b = 0.35
    lam = sorted(p.lam for p in dis.spectrum(b, 15))
    lam_r = sorted(-p.lam for p in dis.spectrum(1 - b, 15))
    assert np.allclose(lam, lam_r, rtol=1e-12, atol=0)


def test_solution_reflection_identity(jump_left):
    b, N = 0.35, 200
    x = (np.arange(64) + 0.5) / 64
    r, rb = dis.reflect_problem(jump_left, b)
    for t in (0.01, -0.03):
        u = dis.solve_series_dis(jump_left, b, x, t, N)
        v = dis.solve_series_dis(r, rb, 1 - x, -t, N)
        assert np.max(np.abs(u - v)) < 5e-6


def test_right_side_revival_matches_reflection():
    u0 = PiecewiseFn.step([0, 0.7, 1], [0.0, 1.0])
    b = 0.35
    est = DislocationRevival(b=b, n_modes=400, n_hilbert=2**13).fit(u0)
    rt = DislocRationalTime(1, 2, b, "right")
    x = np.linspace(0.4, 0.98, 40)
    d = est.decompose(x, rt)
    ok = d.mask
    ref = dis.ur_closed_right(u0, b, x[ok], rt, 2**13, 0.0)
    assert np.allclose(d.ur_closed[ok], ref, atol=1e-12)


def test_interface_continuity(jump_left):
    b = 0.35
    for N in (50, 100, 200):
        u = dis.solve_series_dis(jump_left, b, np.array([b - 1e-12, b + 1e-12]), 0.02, N)
        assert abs(u[0] - u[1]) < 1e-8


def test_sign_split():
    for p in dis.spectrum(0.35, 40):
        assert (p.lam > 0) == (p.side > 0)


def test_psi_decomposition_rate():
    b = 0.35
    x = np.linspace(0, 1, 20001)
    errs = []
    for n in range(1, 5):
        p = specfun.disloc_eigenpair(b, n)
        v = dis.nu(b, n)
        psi = np.where(x <= b, np.sin(v * x), np.sqrt(2) / 2 * (-1) ** n * np.exp(-v * (x - b)))
        errs.append(np.max(np.abs(specfun.disloc_eigfun(b, p, x) - psi)))
    rate = -np.polyfit(np.arange(1, 5), np.log(errs), 1)[0]
    assert rate >= 0.9 * np.pi * (1 - b) / b


def test_estimator_api(jump_left):
    est = DislocationRevival(b=0.4, n_modes=30, n_hilbert=256, delta=0.02)
    assert clone(est).get_params()["b"] == 0.4
    with pytest.raises(NotFittedError):
        est.predict(np.array([0.5]), 0.1)
    est.fit(jump_left)
    x = np.linspace(0.1, 0.9, 5)
    assert np.allclose(est.predict(x, 0.05), dis.solve_series_dis(jump_left, 0.4, x, 0.05, 30))
    with pytest.raises(DomainError):
        DislocationRevival(b=1.2).fit(jump_left)
