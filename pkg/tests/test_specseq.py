import json

import numpy as np
import pytest

from cubekit import specseq as ss
from cubekit import zlinalg as zl
from cubekit.specseq.fixtures import monoid_fixture, s3_couple, two_step_complex

SEEDS = range(20)


def quotient_text(C, P, r, p, q):
    return C.eng.quotient(C.E(p, q), P.Z(r, p, q), P.B(r, p, q)).text


def graded_piece_homology(fc, p, n):
    """E^1 oracle: H_n of F_p/F_{p-1}, built from the level-p basis elements."""
    idx = {m: [b for b in range(fc.ranks[m]) if fc.levels[m][b] == p] for m in range(fc.top + 1)}
    ranks = [len(idx[m]) for m in range(fc.top + 1)]
    bd = {m: fc.d(m)[np.ix_(idx[m - 1], idx[m])] if ranks[m - 1] and ranks[m] else zl.zeros(ranks[m - 1], ranks[m])
          for m in range(1, fc.top + 1)}
    return zl.homology(zl.ChainComplex(ranks, bd), n).invariants


@pytest.fixture(scope="module")
def random_couples():
    out = []
    rng = np.random.default_rng(2024)
    for _ in SEEDS:
        fc = ss.random_filtered_complex(rng, top=3, max_rank=8, levels=4)
        C = ss.build_filtration_couple(fc)
        out.append((fc, C, ss.Pages(C)))
    return out


def test_random_couples_are_exact(random_couples):
    for fc, C, _ in random_couples:
        assert max(fc.ranks) <= 8 and fc.max_level <= 3
        rep = ss.validate_couple(C)
        assert rep.ok, rep.violations[:3]


def test_page_identities(random_couples):
    # d^1 = j k, ker d^r = Z^{r+1}, im d^r = B^{r+1}/B^r, inclusion chain
    for _, C, P in random_couples:
        rep = ss.page_checks(C, C.r_max, P)
        assert rep.ok and rep.checked > 0, rep.violations[:3]


def test_first_page_is_homology_of_graded_pieces(random_couples):
    for fc, C, P in random_couples:
        for (p, q) in C.support_E():
            assert quotient_text(C, P, 1, p, q) == str(graded_piece_homology(fc, p, p + q))


def test_next_page_is_homology(random_couples):
    for _, C, P in random_couples:
        for r in range(1, C.r_max):
            rep = ss.homology_step_check(C, r, P)
            assert rep.ok, rep.violations[:3]


def test_convergence_against_smith_oracle(random_couples):
    nodes = 0
    for fc, C, P in random_couples:
        r_inf = C.r_max + 1
        rep = ss.convergence_check(C, r_inf, P)
        assert rep.ok, rep.violations[:3]
        for (p, q) in C.window.points():
            if p < 0 or q < 0 or p + q < 2 or p > fc.max_level or p + q > fc.top:
                continue
            oracle = str(ss.graded_homology(fc, p, p + q))
            assert quotient_text(C, P, r_inf, p, q) == oracle, (p, q)
            if oracle != "0":
                nodes += 1
                assert rep.details[f"{p},{q}"]["gr"] == oracle
    assert nodes > 20


def test_graded_pieces_add_up_to_total_rank(random_couples):
    for fc, C, P in random_couples:
        for n in range(fc.top + 1):
            tot = zl.homology(fc.complex, n).invariants
            assert sum(ss.graded_homology(fc, p, n).rank for p in range(n + 1)) == tot.rank


def test_pages_stabilize(random_couples):
    for fc, C, P in random_couples:
        for (p, q), v in ss.stabilization(C, C.r_max, P).items():
            assert v["Z"] <= max(p + 1, 1)
            assert v["B"] <= max(p, q) + 2


def test_two_step_complex_by_hand():
    C = ss.build_filtration_couple(two_step_complex())
    P = ss.Pages(C)
    # E^1 = Z in degrees 0, 1, 2 with d^1 = 2 from (2,0) to (1,0)
    assert [quotient_text(C, P, 1, p, 0) for p in range(3)] == ["Z", "Z", "Z"]
    assert [quotient_text(C, P, 3, p, 0) for p in range(3)] == ["Z", "Z/2", "0"]


def test_nonabelian_couple():
    C = s3_couple()
    P = ss.Pages(C)
    assert ss.validate_couple(C).ok
    assert ss.page_checks(C, 3, P).ok
    # d^1 from Z/3 onto A3, so E^2_{0,1} = S3/A3 and E^2_{1,1} = 1
    assert P.E_quotient(2, 0, 1).size == 2
    assert P.E_quotient(2, 1, 1).size == 1
    assert ss.convergence_check(C, 4, P).ok


def test_monoid_homomorphism_theorem():
    rep = ss.monoid_hom_theorem_check(*monoid_fixture())
    assert rep.ok and rep.details["quotient_size"] == 2
    assert rep.details["quotient_kind"] == "abelian_group"


def test_monoid_hypotheses_enforced():
    L, M, A, f, g = monoid_fixture()
    with pytest.raises(ss.HypothesisError):
        ss.monoid_hom_theorem_check(L, M, A, f, tuple(0 for _ in g))


def test_json_round_trip(tmp_path):
    C = s3_couple()
    obj = ss.couple_to_json(C)
    p = tmp_path / "c.json"
    p.write_text(json.dumps(obj))
    assert ss.couple_to_json(ss.load_couple(p)) == obj


def test_fixture_files_load(fixtures_dir):
    for name in ("s3_couple", "filtered_skeletal", "filtered_two_step", "filtered_random"):
        C = ss.load_couple(fixtures_dir / f"{name}.json")
        assert ss.validate_couple(C).ok


def test_table_engine_agrees_with_group_engine():
    # Z/4 coefficients: multiplication by 2 has kernel and cokernel Z/2
    f = two_step_complex()
    C = ss.build_filtration_couple(ss.FilteredComplex(f.ranks, f.boundaries, f.levels, modulus=4))
    T = ss.to_table_couple(C)
    P, Q = ss.Pages(C), ss.Pages(T)
    sizes = []
    for (p, q) in C.support_E():
        a = C.eng.quotient(C.E(p, q), P.Z(2, p, q), P.B(2, p, q))
        b = T.eng.quotient(T.E(p, q), Q.Z(2, p, q), Q.B(2, p, q))
        assert a.size == b.size
        sizes.append(b.size)
    assert sizes == [4, 2, 2]
    assert ss.page_checks(T, 2, Q).ok


def test_rejects_bad_filtration():
    with pytest.raises(ss.FiltrationError):
        ss.FilteredComplex([1, 1], {1: zl.imat([[1]])}, {0: [1], 1: [0]})
