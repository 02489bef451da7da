import numpy as np
import pytest
from scipy.integrate import quad

from cubekit import levelset as ls

RHO = 21.0


@pytest.fixture(scope="module")
def cfg2():
    return ls.DiceConfig(2, RHO)


@pytest.fixture(scope="module")
def cfg3():
    return ls.DiceConfig(3, RHO)


def aux_quad(rho, s, a=1.0):
    """Independent aux: iterated adaptive quadrature of the normalized bump."""
    bump = lambda v: np.exp(-a / (1 - v * v)) if abs(v) < 1 else 0.0
    z = quad(bump, -1, 1, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    u = s - (rho - 1)
    if u <= -1:
        return 0.0
    top = min(u, 1.0)
    val = quad(lambda v: (top - v) * bump(v), -1, top, epsabs=1e-14, epsrel=1e-13, limit=200)[0] / z
    return val + max(u - 1.0, 0.0)


def test_aux_examples():
    assert ls.aux(RHO, RHO - 2) == 0.0
    assert ls.aux(RHO, RHO) == pytest.approx(1.0, abs=1e-14)
    for s in (RHO, RHO + 0.5, RHO + 7):
        assert ls.aux(RHO, s) == pytest.approx(s - (RHO - 1), abs=1e-13)
    for s in (-5.0, 0.0, RHO - 2.5, RHO - 2):
        assert ls.aux(RHO, s) == 0.0
    for s in np.linspace(RHO - 1.999, RHO, 9):
        assert ls.aux(RHO, s) > 0


@pytest.mark.parametrize("rho", [6.0, RHO])
def test_aux_matches_quadrature(rho):
    for s in np.linspace(rho - 2.2, rho + 0.3, 23):
        assert ls.aux(rho, s) == pytest.approx(aux_quad(rho, s), abs=1e-12)


def test_aux_convex():
    s = np.linspace(RHO - 3, RHO + 1, 2001)
    _, d1, d2 = ls.aux_values(RHO, s)
    assert np.all(np.diff(d1) >= -1e-15)
    assert np.all(d2 >= 0)
    assert d1[0] == 0 and d1[-1] == pytest.approx(1.0, abs=1e-14)


def test_dice_zero_cube(cfg3):
    assert ls.dice(3, RHO, np.zeros(3)) == 0.0
    rng = np.random.default_rng(0)
    x = rng.uniform(-(RHO - 2), RHO - 2, (500, 3))
    j = ls.dice_jet(cfg3, x)
    assert np.all(j.val == 0) and np.all(j.grad == 0)


def test_dice_is_sum_of_aux(cfg3):
    rng = np.random.default_rng(1)
    x = rng.uniform(-(RHO + 2), RHO + 2, (200, 3))
    ref = np.array([sum(ls.aux(RHO, abs(c)) for c in row) for row in x])
    assert np.allclose(ls.dice(3, RHO, x), ref, atol=1e-13, rtol=0)


def test_overlaps(cfg2):
    rng = np.random.default_rng(2)
    r, e = RHO, cfg2.eps
    N = 1000
    regions = [
        ("l", "o", (-e, e), (r, r + 1)),
        ("l", "u", (-e, e), (-(r + 1), -r)),
        ("o", "lin", (r, r + 1), (r + 3, r + 4)),
        ("u", "lin", (r, r + 1), (-(r + 4), -(r + 3))),
    ]
    for a, b, (x0, x1), (y0, y1) in regions:
        X = rng.uniform(x0, x1, N)
        Y = rng.uniform(y0, y1, N)
        diff = np.abs(ls.branch_value(cfg2, a, X, Y) - ls.branch_value(cfg2, b, X, Y))
        assert diff.max() < 1e-12, (a, b, diff.max())


def test_merged_function_domain(cfg2):
    assert ls.dfun(RHO, 0.0, RHO) == pytest.approx(1.0, abs=1e-14)
    assert ls.dfun(RHO, 0.0, 0.0) == 0.0
    with pytest.raises(ls.OutsideDomain):
        ls.dfun(RHO, RHO - 1, 0.0)
    with pytest.raises(ls.OutsideDomain):
        ls.frak_d(2, RHO, [RHO + 3, 0.0])
    assert ls.branch_of(cfg2, RHO + 0.5, RHO + 10) == "lin"


def test_tilde_dice_agreement(cfg3):
    rng = np.random.default_rng(3)
    y = rng.uniform(-(RHO + 6), RHO + 6, (4000, 2))
    base = np.array([sum(ls.aux(RHO - 2, abs(c)) for c in row) for row in y]) + (RHO - 3)
    sel = base >= RHO - 2
    assert sel.sum() > 500
    assert np.abs(ls.tilde_dice(2, RHO, y[sel], cfg3) - base[sel]).max() < 1e-12


def test_constants(cfg3):
    assert cfg3.eps == (RHO - 2) / 4
    assert cfg3.chi_slope_max() <= 1.2
    assert 1 / cfg3.c_const > 2 * (RHO - 2) ** 2 / (RHO - 3)
    with pytest.raises(ValueError):
        ls.DiceConfig(2, 5.0)
    with pytest.raises(ValueError):
        ls.DiceConfig(2, RHO, eps=(RHO - 2) / 2)
    with pytest.raises(ValueError):
        ls.DiceConfig(3, RHO, c_const=1.0)


def fd_check(fun, x, h=1e-4):
    """Jet gradient and Hessian against central differences (values and
    jet gradients respectively)."""
    j = fun(x, 2)
    n = x.shape[1]
    worst = 0.0
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        gp, gm = fun(x + e, 1), fun(x - e, 1)
        g_fd = (gp.val - gm.val) / (2 * h)
        H_fd = (gp.grad - gm.grad) / (2 * h)
        worst = max(worst, np.abs(g_fd - j.grad[:, k]).max(), np.abs(H_fd - j.hess[:, :, k]).max())
    return worst


def test_smoothness_proxy_dice(cfg3):
    rng = np.random.default_rng(4)
    x = rng.uniform(-(RHO + 1), RHO + 1, (400, 3))
    x[:200] = np.sign(x[:200]) * rng.uniform(RHO - 2.2, RHO + 0.2, (200, 3))
    assert fd_check(lambda p, o: ls.dice_jet(cfg3, p, order=o), x) < 1e-6


def _same_branch_stencil(cfg, x, h):
    keep = []
    for p in x:
        b = ls.branch_of(cfg, p[0], p[1])
        if b is None:
            keep.append(False)
            continue
        ok = True
        for k in range(2):
            for s in (-2, 2):
                q = p.copy()
                q[k] += s * h
                ok &= ls.branch_of(cfg, q[0], q[1]) == b
        keep.append(ok)
    return np.array(keep)


def test_smoothness_proxy_dfun(cfg2):
    rng = np.random.default_rng(5)
    h = 1e-4
    r = RHO
    pts = np.concatenate([
        np.column_stack([rng.uniform(-cfg2.eps, cfg2.eps, 300), rng.uniform(-(r + 1), r + 1, 300)]),
        np.column_stack([rng.uniform(-cfg2.eps, r, 300), rng.choice([-1, 1], 300) * rng.uniform(r, r + 1, 300)]),
        np.column_stack([rng.uniform(r - 2, r + 1, 300), rng.choice([-1, 1], 300) * rng.uniform(r, r + 4, 300)]),
    ])
    pts = pts[_same_branch_stencil(cfg2, pts, h) & (np.abs(pts[:, 0]) > 3 * h)]
    assert len(pts) > 500

    def fun(p, o):
        s1, s2 = ls.VJet.seeds(p, o)
        return ls.dfun_jet(cfg2, s1, s2)

    assert fd_check(fun, pts, h) < 1e-6


@pytest.mark.parametrize("n", [2, 3])
def test_smoothness_proxy_final(n):
    cfg = ls.DiceConfig(n, RHO)
    rng = np.random.default_rng(6)
    pts, _ = ls.level_points(cfg, 300, rng)
    h = 1e-4
    j = ls.frak_d_jet(cfg, pts, order=0)
    keep = np.ones(len(pts), bool)
    for k in range(n):
        for s in (-2, 2):
            q = pts.copy()
            q[:, k] += s * h
            keep &= np.isfinite(ls.frak_d_jet(cfg, q, order=0).val)
            keep &= np.abs(q[:, k]) > h
    # branch switches inside the stencil are legitimate only on overlaps, where values agree
    pts = pts[keep & np.isfinite(j.val)]
    assert len(pts) > 250
    assert fd_check(lambda p, o: ls.frak_d_jet(cfg, p, order=o), pts, h) < 1e-6


def test_cuboid_values(cfg3):
    rng = np.random.default_rng(7)
    r4 = RHO - 4
    x = np.column_stack([rng.uniform(-r4, r4, 5000), rng.uniform(-r4, r4, (5000, 2))])
    v = ls.frak_d(3, RHO, x, cfg3)
    assert not np.any((v >= 1) & (v <= 2))


@pytest.mark.parametrize("n", [2, 3])
def test_property_scan(n):
    rep = ls.property_scan(ls.DiceConfig(n, RHO), samples=10_000, seed=0)
    assert rep.ok, rep.violations[:3]
    assert rep.counts["violations"] == 0 and rep.counts["level_points"] == 10_000


def test_flow_decomposition_n2(cfg2):
    rep = ls.flow_decomposition_check(cfg2, samples=50, seed=0)
    assert rep.ok, rep.violations[:3]
    assert rep.trajectories == 50
    assert rep.max_level_error < 1e-5 and rep.max_ortho_residual < 1e-4 and rep.max_dt2_error < 1e-4
    assert rep.max_translation_error < 1e-9


def test_far_field_translation_is_exact_rk4(cfg2):
    rng = np.random.default_rng(8)
    x = ls.flow.far_field_starts(cfg2, rng, 5)
    for t in (1.0, 1.5, 2.0):
        y = ls.flow_to(cfg2, x, times=(t,))[t]
        expect = x.copy()
        expect[:, 0] -= t - ls.flow.T0
        assert np.abs(y - expect).max() < 1e-9


def test_flow_leaving_domain_is_reported(cfg2):
    with pytest.raises(ls.FlowError):
        ls.velocity(cfg2, np.array([[RHO + 3, 0.0]]))
