"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line with its
runtime; the lines are repeated in the pytest terminal summary.  Also runnable
directly: python3 tests/test_acceptance.py"""

import io
import itertools
import sys
import time
from math import comb
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cubekit import boxcat as bc
from cubekit import cli
from cubekit import cubset as cs
from cubekit import geomcurv as gc
from cubekit import kan
from cubekit import levelset as ls
from cubekit import specseq as ss
from cubekit import zlinalg as zl
from cubekit.specseq.fixtures import monoid_fixture

from cli_cases import CASES

FIX = Path(__file__).resolve().parent.parent / "fixtures"
LINES = []


def hom_formula(n, m):
    # keep k of the n coordinates in order, place them among m slots, fill the rest with +-1
    return sum(comb(n, k) * comb(m, k) * 2 ** (m - k) for k in range(min(n, m) + 1))


def criterion_1():
    shapes = 0
    for n in range(5):
        X = [cs.standard_cube(n)]
        if n >= 1:
            X.append(cs.boundary_sphere(n))
            X += [cs.horn(n, i, e) for i in range(1, n + 1) for e in (-1, 1)]
        for Y in X:
            rep = cs.validate(Y)
            assert rep.ok, (Y, rep.violations[:2])
            shapes += 1
    for n, m in itertools.product(range(5), repeat=2):
        assert len(bc.enumerate_hom(n, m)) == hom_formula(n, m), (n, m)
    assert hom_formula(2, 2) == 13
    rng = np.random.default_rng(1000)
    C = cs.standard_cube(3)
    for _ in range(1000):
        n = int(rng.integers(0, 4))
        w1, m1 = bc.random_word(rng, n, int(rng.integers(0, 5)))
        w2, m2 = bc.random_word(rng, m1, int(rng.integers(0, 5)))
        f, g = bc.normalize_word(w1, n), bc.normalize_word(w2, m1)
        gf = bc.compose(g, f)
        for p in itertools.product((-1, 0.5, 1), repeat=n):
            # words read right to left, so g after f is the concatenation w2 w1
            assert bc.apply_geometric(gf, p) == bc.apply_word(list(w2) + list(w1), p)
            assert bc.apply_geometric(f, p) == bc.apply_word(w1, p)
        if m2 <= 3:
            c = C.gen_cube(C.gens(m2)[int(rng.integers(len(C.gens(m2))))])
            assert C.apply_box(c, gf) == C.apply_box(C.apply_box(c, g), f)
    return f"{shapes} shapes valid, hom counts n,m<=4, 1000 random composites"


def criterion_2():
    for m in range(5):
        for n in range(5 - m):
            P = cs.reduced_product(cs.standard_cube(m), cs.standard_cube(n))
            Q = cs.standard_cube(m + n)
            assert P.cell_counts() == Q.cell_counts()
            assert cs.isomorphic_via(P, Q, cs.cube_product_iso(m, n)), (m, n)
    return "15 pairs (m,n) with m+n<=4 isomorphic via the coordinate concatenation"


def criterion_3():
    for n in range(5):
        C = zl.cubical_chain_complex(cs.standard_cube(n))
        assert C.check() == []
        assert [str(h) for h in zl.homology_all(C)] == ["Z"] + ["0"] * n
        assert C.euler_characteristic() == sum((-1) ** k * c for k, c in enumerate(cs.standard_cube(n).cell_counts()))
    for n in range(1, 5):
        S = cs.boundary_sphere(n)
        C = zl.cubical_chain_complex(S)
        assert C.check() == []
        expect = ["Z^2"] if n == 1 else ["Z"] + ["0"] * (n - 2) + ["Z"]
        assert [str(h) for h in zl.homology_all(C)] == expect
        assert C.euler_characteristic() == sum((-1) ** k * c for k, c in enumerate(S.cell_counts()))
        assert C.euler_characteristic() == 1 + (-1) ** (n - 1)
    S = cs.load_cubical_set(FIX / "boundary_square.cub")
    T = cs.reduced_product(S, S)
    C = zl.cubical_chain_complex(T)
    assert C.check() == [] and [str(h) for h in zl.homology_all(C)] == ["Z", "Z^2", "Z"]
    assert C.euler_characteristic() == 0
    return "cubes, spheres n<=4, torus (Z, Z^2, Z)"


def criterion_4():
    assert kan.is_kan(cs.load_cubical_set(FIX / "two_points.cub"), 3).ok
    v = kan.is_kan(kan.minimal_circle(), 2)
    assert not v.ok and v.counterexample["n"] == 2
    for p in sorted(FIX.glob("*.cub")):
        X = cs.load_cubical_set(p)
        up = min(X.trunc_dim, 3)
        if kan.is_contractible(X, up).ok:
            assert kan.is_kan(X, up).ok, p.name
    X = cs.load_cubical_set(FIX / "bz2.cub")
    cert = kan.is_kan(X, 2, memo=True)
    g = kan.pi_n(X, X.gens(0)[0], 1, cert)
    g_rev = kan.pi_n(X, X.gens(0)[0], 1, cert, order="reversed")
    assert g.order == 2 and kan.check_group_table(g.table) == g.identity
    e = g.identity
    assert g.table == [[0, 1], [1, 0]] if e == 0 else g.table == [[1, 0], [0, 1]]
    assert kan.same_group(g, g_rev)
    return "two points Kan to 3, circle refuted in dim 2, |pi_1 B(Z/2)| = 2"


def criterion_5():
    rng = np.random.default_rng(5)
    nodes = 0
    for _ in range(20):
        fc = ss.random_filtered_complex(rng, top=3, max_rank=8, levels=4)
        C = ss.build_filtration_couple(fc)
        P = ss.Pages(C)
        assert ss.validate_couple(C).ok
        assert ss.page_checks(C, C.r_max, P).ok
        for r in range(1, C.r_max):
            assert ss.homology_step_check(C, r, P).ok
        r_inf = C.r_max + 1
        assert ss.convergence_check(C, r_inf, P).ok
        for (p, q) in C.window.points():
            if p < 0 or q < 0 or p + q < 2 or p > fc.max_level or p + q > fc.top:
                continue
            got = C.eng.quotient(C.E(p, q), P.Z(r_inf, p, q), P.B(r_inf, p, q)).text
            assert got == str(ss.graded_homology(fc, p, p + q)), (p, q)
            nodes += 1
    assert ss.monoid_hom_theorem_check(*monoid_fixture()).ok
    return f"20 random filtered complexes, {nodes} convergence nodes vs Smith oracle, monoid fixture"


def criterion_6():
    fams = {n: gc.load_family(FIX / f"{n}.met") for n in
            ("flat", "hyperbolic", "sphere_family", "generic", "generic_t", "sphere_two_param")}
    worst = 0.0
    for n in ("flat", "hyperbolic", "sphere_family", "generic"):
        rep = gc.curvature_check(fams[n], samples=100)
        assert rep["ok"] and rep["accepted"] == 100, n
        worst = max(worst, rep["max_rel_err"])
    assert worst < 1e-5
    for p in fams["hyperbolic"].samples(20, 0):
        assert abs(gc.scal_warped(fams["hyperbolic"], p) + 6) < 1e-9
    for n in ("generic_t", "sphere_family"):
        rep = gc.rescaling_check(fams[n])
        assert rep["ok"] and -2.2 <= rep["decay_exponent"] <= -1.8, n
    for n in ("sphere_family", "sphere_two_param"):
        rep = gc.suspension_check(fams[n])
        assert rep["ok"] and rep["identity_residual"] < 1e-6
        assert rep["predicate_holds"] > 0 and "counterexample" not in rep
        assert gc.error_term_check(fams[n])["ok"]
    rng = np.random.default_rng(6)
    keys = ("isometry", "H0_self_adjoint", "H_self_adjoint", "square_is_gram", "inverse_law")
    pg = 0.0
    for _ in range(200):
        k = int(rng.integers(2, 6))
        r = gc.pre_gauge_report(gc.random_pd(rng, k), gc.random_pd(rng, k))
        pg = max(pg, max(r[x] for x in keys))
    assert pg < 1e-9
    assert gc.angle_chart_check("0.5 + 0.3*sin(t1)", R=2.0, samples=100)["ok"]
    rep = gc.angle_chart_check("0.5", samples=100, polar_radius=2.0)
    assert rep["ok"] and rep["polar_point_error"] < 1e-5
    return f"scal rel err {worst:.1e}, pre-gauge worst {pg:.1e}"


def criterion_7():
    out = []
    for n in (2, 3):
        cfg = ls.DiceConfig(n, 21.0)
        rep = ls.property_scan(cfg, samples=10_000, seed=0)
        assert rep.ok and rep.counts["violations"] == 0, rep.violations[:3]
        fr = ls.flow_decomposition_check(cfg, samples=50, seed=0)
        assert fr.ok and fr.trajectories == 50, fr.violations[:3]
        assert fr.max_level_error < 1e-5 and fr.max_ortho_residual < 1e-4
        assert fr.max_translation_error < 1e-9
        out.append(f"n={n}: level {fr.max_level_error:.0e}, ortho {fr.max_ortho_residual:.0e}")
    return "; ".join(out)


def criterion_8():
    def run(argv):
        o = io.StringIO()
        code = cli.run(argv, o, io.StringIO())
        return code, o.getvalue()

    for name, argv, code in CASES:
        a = run(argv + ["--parallel", "off"])
        b = run(argv + ["--parallel", "on"])
        c = run(argv + ["--parallel", "off"])
        assert a[0] == code and a == b == c, name
    return f"{len(CASES)} invocations over {len({c[1][0] for c in CASES})} subcommands byte-identical"


CRITERIA = [
    (1, "box/cubical identities", criterion_1, 10),
    (2, "reduced product of cubes", criterion_2, 5),
    (3, "homology", criterion_3, 10),
    (4, "Kan engine", criterion_4, 60),
    (5, "spectral sequence", criterion_5, 60),
    (6, "curvature", criterion_6, 120),
    (7, "dice and flow", criterion_7, 120),
    (8, "CLI determinism", criterion_8, None),
]


def run_criterion(num, title, fn, limit):
    t = time.perf_counter()
    err = None
    try:
        detail = fn()
    except AssertionError as e:
        detail, err = f"assertion failed {e}", e
    dt = time.perf_counter() - t
    ok = err is None and (limit is None or dt < limit)
    if err is None and not ok:
        detail += f"; over the {limit} s budget"
    lim = f" (limit {limit} s)" if limit else ""
    line = f"criterion {num} {'PASS' if ok else 'FAIL'} {dt:7.2f} s{lim}  {title}: {detail}"
    print(line)
    LINES.append(line)
    return ok, line


@pytest.mark.parametrize("num,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, limit):
    ok, line = run_criterion(num, title, fn, limit)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
