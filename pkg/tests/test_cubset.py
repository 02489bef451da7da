import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubekit import boxcat as bc
from cubekit import cubset as cs


def shapes():
    for n in range(1, 5):
        yield cs.standard_cube(n)
        yield cs.boundary_sphere(n)
        for i in range(1, n + 1):
            for e in (-1, 1):
                yield cs.horn(n, i, e)


def test_standard_shapes_satisfy_cubical_identities():
    for X in shapes():
        rep = cs.validate(X)
        assert rep.ok, (X, rep.violations[:2])


def test_cell_counts():
    from math import comb
    for n in range(5):
        C = cs.standard_cube(n)
        assert C.cell_counts() == [comb(n, k) * 2 ** (n - k) for k in range(n + 1)]
    for n in range(1, 5):
        H = cs.horn(n, 1, 1)
        assert sum(H.cell_counts()) == 3 ** n - 2


def test_faces_match_box_action():
    """Face of a cell of the standard cube is the composite morphism."""
    n = 3
    C = cs.standard_cube(n)
    for m in range(1, n + 1):
        for phi in bc.injective_morphisms(m, n):
            g = cs.cell_name(phi)
            for i in range(1, m + 1):
                for e in (-1, 1):
                    psi = bc.compose(phi, bc.delta(m - 1, i, e))
                    assert C.face(C.gen_cube(g), i, e).gen == cs.cell_name(psi)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_apply_box_is_a_functor(seed):
    rng = np.random.default_rng(seed)
    C = cs.standard_cube(3)
    c = C.gen_cube(C.gens(int(rng.integers(0, 4)))[0])
    w1, d1 = bc.random_word(rng, c.dim, 0)
    f = bc.normalize_word(w1, c.dim)
    # random g: I^a -> I^k and h: I^k -> I^dim c, compare X(h o g) = X(g) X(h)
    k = int(rng.integers(0, 4))
    a = int(rng.integers(0, 4))
    hs = bc.enumerate_hom(k, c.dim)
    gs = bc.enumerate_hom(a, k)
    h = hs[int(rng.integers(len(hs)))]
    g = gs[int(rng.integers(len(gs)))]
    assert C.apply_box(c, bc.compose(h, g)) == C.apply_box(C.apply_box(c, h), g)
    assert C.apply_box(c, f) == c


def test_degeneracy_identities():
    X = cs.standard_cube(2, trunc=4)
    for c in cs.all_cubes_upto(X, 3):
        n = c.dim
        for j in range(1, n + 2):
            s = X.degeneracy(c, j)
            for e in (-1, 1):
                assert X.face(s, j, e) == c
            for i in range(1, n + 2):
                for e in (-1, 1):
                    if i < j and n >= 1:
                        assert X.face(s, i, e) == X.degeneracy(X.face(c, i, e), j - 1)
                    elif i > j and n >= 1:
                        assert X.face(s, i, e) == X.degeneracy(X.face(c, i - 1, e), j)
        for i, j in itertools.combinations_with_replacement(range(1, n + 2), 2):
            lhs = X.degeneracy(X.degeneracy(c, i), j + 1)
            rhs = X.degeneracy(X.degeneracy(c, j), i)
            assert lhs == rhs


@pytest.mark.parametrize("m,n", [(m, n) for m in range(5) for n in range(5 - m)])
def test_reduced_product_of_cubes_is_a_cube(m, n):
    P = cs.reduced_product(cs.standard_cube(m), cs.standard_cube(n))
    C = cs.standard_cube(m + n)
    assert P.cell_counts() == C.cell_counts()
    assert cs.isomorphic_via(P, C, cs.cube_product_iso(m, n))
    assert cs.validate(P).ok


def test_isomorphism_detects_wrong_bijection():
    P = cs.reduced_product(cs.standard_cube(1), cs.standard_cube(1))
    iso = cs.cube_product_iso(1, 1)
    swapped = {k: v[::-1] if len(v) == 2 else v for k, v in iso.items()}
    assert not cs.isomorphic_via(P, cs.standard_cube(2), swapped)


def test_text_round_trip(fixtures_dir):
    for X in list(shapes())[:6] + [cs.load_cubical_set(fixtures_dir / "bz2.cub")]:
        Y = cs.parse_cubical_set(cs.format_cubical_set(X))
        nz = lambda Z: {k: v for k, v in Z.generators.items() if v}
        assert nz(Y) == nz(X) and Y.faces == X.faces and Y.trunc_dim == X.trunc_dim


@pytest.mark.parametrize("text,line,col", [
    ("dim 0: a\ndim 1: e\nface e 1 - = a\nface e 1 + = b\n", 4, 14),
    ("dim 0: a\nfoo bar\n", 2, 1),
    ("dim 0: a a\n", 1, 10),
    ("dim 0: a\ndim 1: e\nface e 2 - = a\nface e 1 + = a\n", 3, 8),
    ("dim 0: a\ndim 1: e\nface e 1 - = a[s 3]\nface e 1 + = a\n", 3, 14),
])
def test_format_errors_have_positions(text, line, col):
    with pytest.raises(cs.FormatError) as ei:
        cs.parse_cubical_set(text)
    assert (ei.value.line, ei.value.col) == (line, col)


def test_missing_face_is_an_error():
    with pytest.raises(cs.FormatError, match="missing face"):
        cs.parse_cubical_set("dim 0: a\ndim 1: e\nface e 1 - = a\n")


def test_degeneracy_word_normalization():
    # s_1 s_1 applied to a vertex: dummy set {1, 2}
    assert cs.normalize_word([1, 1], 0) == (1, 2)
    # s_2 after s_1 on a 1-cube: positions {1, 2}
    assert cs.normalize_word([1, 2], 1) == (1, 2)
    with pytest.raises(cs.CubicalError):
        cs.normalize_word([3], 1)


def test_map_loading_and_validation(fixtures_dir):
    f = cs.load_map(fixtures_dir / "circle_to_point.map")
    assert cs.validate_map(f).ok
    with pytest.raises(cs.FormatError):
        cs.parse_map("map f: v -> nowhere\n", f.source, f.target)


def test_disjoint_union_and_subset():
    X = cs.disjoint_union(cs.standard_cube(1), cs.point(1))
    assert X.cell_counts() == [3, 1]
    C = cs.standard_cube(2)
    with pytest.raises(cs.CubicalError):
        C.subset(["*-"])
