import math

import numpy as np
import pytest
from scipy.linalg import sqrtm

from cubekit import geomcurv as gc
from cubekit.exprparse import parse

ACCURACY = 1e-5


def fam(fixtures_dir, name):
    return gc.load_family(fixtures_dir / f"{name}.met")


def breathing_scal(t, eps=0.01):
    """dt^2 + a(t)^2 g_S2 with a = 1 + eps sin t: 2(1 - a'^2)/a^2 - 4 a''/a."""
    a, da, dda = 1 + eps * math.sin(t), eps * math.cos(t), -eps * math.sin(t)
    return 2 * (1 - da * da) / a ** 2 - 4 * dda / a


@pytest.mark.parametrize("name", ["flat", "hyperbolic", "sphere_family", "generic", "generic_t", "annulus"])
def test_warped_formula_matches_oracle(fixtures_dir, name):
    rep = gc.curvature_check(fam(fixtures_dir, name), samples=100)
    assert rep["ok"] and rep["accepted"] == 100
    assert rep["max_rel_err"] < ACCURACY


def test_closed_form_values(fixtures_dir):
    F = fam(fixtures_dir, "hyperbolic")
    for p in F.samples(20, 0):
        assert gc.scal_warped(F, p) == pytest.approx(-6.0, abs=1e-9)
    F = fam(fixtures_dir, "flat")
    for p in F.samples(20, 0):
        assert gc.scal_warped(F, p) == pytest.approx(0.0, abs=1e-12)
    F = fam(fixtures_dir, "annulus")
    for p in F.samples(20, 0):
        assert gc.scal_warped(F, p) == pytest.approx(0.0, abs=1e-9)
    F = fam(fixtures_dir, "sphere_family")
    for p in F.samples(50, 0):
        assert gc.scal_warped(F, p) == pytest.approx(breathing_scal(p[2]), rel=1e-10)


def test_oracle_on_round_sphere():
    g = [["4/(1 + x1^2 + x2^2)^2", "0"], ["0", "4/(1 + x1^2 + x2^2)^2"]]
    G = [[parse(e) for e in row] for row in g]
    for p in [(0.0, 0.0), (0.3, -0.7), (1.2, 0.4)]:
        assert gc.scal_direct(G, p, coords=["x1", "x2"]) == pytest.approx(2.0, rel=ACCURACY)


def test_stated_formula_is_off_on_generic_family(fixtures_dir):
    # the stated variant omits terms that vanish when f depends on t only
    F = fam(fixtures_dir, "generic")
    assert not gc.curvature_check(F, samples=20, variant="stated")["ok"]
    assert gc.curvature_check(fam(fixtures_dir, "generic_t"), samples=20, variant="stated")["ok"]


@pytest.mark.parametrize("name", ["generic_t", "sphere_family", "hyperbolic"])
def test_rescaling(fixtures_dir, name):
    rep = gc.rescaling_check(fam(fixtures_dir, name))
    assert rep["ok"]
    assert rep["identity_max_rel_err"] < ACCURACY
    assert -2.2 <= rep["decay_exponent"] <= -1.8


@pytest.mark.parametrize("name", ["sphere_family", "sphere_two_param", "annulus"])
def test_suspension_identity(fixtures_dir, name):
    rep = gc.suspension_check(fam(fixtures_dir, name))
    assert rep["identity_residual"] < 1e-6
    assert rep["oracle_max_rel_err"] < ACCURACY
    assert rep["ok"]
    assert "counterexample" not in rep


def test_slowness_predicate_gives_seven_eighths(fixtures_dir):
    F = fam(fixtures_dir, "sphere_family")
    rep = gc.suspension_check(F)
    assert rep["predicate_holds"] == 100 and rep["min_margin"] > 0
    for p in F.samples(50, 1):
        t = p[2]
        assert breathing_scal(t) > 7 / 8 * 2 / (1 + 0.01 * math.sin(t)) ** 2


def test_chapter7_mode(fixtures_dir):
    rep = gc.suspension_check(fam(fixtures_dir, "sphere_two_param"), mode="chapter7")
    assert rep["ok"] and rep["lower_factor"] == pytest.approx(2 / 3)


def test_error_term(fixtures_dir):
    F = fam(fixtures_dir, "sphere_family")
    rep = gc.error_term_check(F)
    assert rep["ok"] and rep["min_margin"] > 0
    # by hand: tr(h^-1 dh/dt) = 4 a'/a
    t = F.samples(100)[:, 2]
    a, da = 1 + 0.01 * np.sin(t), 0.01 * np.cos(t)
    assert rep["max_err_sq"] == pytest.approx(float(np.max(2 / 16 * (4 * da / a) ** 2)), rel=1e-9)
    assert gc.error_term_check(fam(fixtures_dir, "sphere_two_param"))["ok"]


def test_error_term_needs_predicate(fixtures_dir):
    with pytest.raises(gc.PreconditionError):
        gc.error_term_check(fam(fixtures_dir, "fast_sphere"))


def test_pre_gauge_random_pairs():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 6))
        H0, H = gc.random_pd(rng, n), gc.random_pd(rng, n)
        rep = gc.pre_gauge_report(H0, H)
        keys = ("isometry", "H0_self_adjoint", "H_self_adjoint", "square_is_gram", "inverse_law")
        worst = max(worst, max(rep[k] for k in keys))
        assert rep["min_eigenvalue"] > 0 and rep["max_imag_eigenvalue"] < 1e-9
        # independent principal square root of the Gram endomorphism
        ref = np.real(sqrtm(np.linalg.solve(H0, H)))
        tau = gc.pre_gauge(H0, H)
        assert np.abs(tau - ref).max() / np.abs(ref).max() < 1e-6
    assert worst < 1e-9


def test_pre_gauge_rejects_indefinite():
    with pytest.raises(gc.NotPD):
        gc.pre_gauge(np.eye(2), np.diag([1.0, -1.0]))


@pytest.mark.parametrize("kappa,R", [("1", 1.0), ("0.5 + 0.3*sin(t1)", 1.0), ("0.5 + 0.3*sin(t1)", 3.0),
                                     ("cos(2*t1)", 2.0)])
def test_angle_chart_closed_form(kappa, R):
    rep = gc.angle_chart_check(kappa, R=R, samples=100, r_max=0.5 * R)
    assert rep["ok"] and rep["max_entry_error"] < 1e-5


def test_angle_chart_polar_case():
    rep = gc.angle_chart_check("0.5", R=1.0, samples=100, r_max=1.0, polar_radius=2.0)
    assert rep["ok"]
    assert rep["polar_point_error"] < 1e-5 and rep["polar_metric_error"] < 1e-5


def test_angle_chart_degenerate_frame():
    with pytest.raises(gc.DegenerateFrame):
        gc.angle_chart_check("-2", R=1.0, samples=50, r_max=1.0)


def test_family_parse_errors():
    with pytest.raises(gc.FamilyFormatError):
        gc.parse_family("d = 2\nn = 1\nh[1][1] = \"1 +\"\n")
