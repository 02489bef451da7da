import itertools
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cubekit import cubset as cs
from cubekit import zlinalg as z


def determinant_divisor_factors(M):
    """Invariant factors as ratios of gcds of k x k minors (independent oracle)."""
    A = sympy.Matrix(M.tolist())
    m, n = A.shape
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, int(A.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


small_mats = st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(small_mats)
def test_invariant_factors_match_minor_gcds(rows):
    M = z.imat(rows)
    assert z.invariant_factors(M) == determinant_divisor_factors(M)


@settings(max_examples=80, deadline=None)
@given(small_mats)
def test_smith_form_is_a_unimodular_factorization(rows):
    M = z.imat(rows)
    U, S, V = z.smith_normal_form(M)
    assert z.mat_eq(U @ M @ V, S)
    assert abs(int(sympy.Matrix(U.tolist()).det())) == 1
    assert abs(int(sympy.Matrix(V.tolist()).det())) == 1
    d = [S[i, i] for i in range(min(S.shape))]
    off = S.copy()
    for i in range(len(d)):
        off[i, i] = 0
    assert z.is_zero(off)
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz) and all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=60, deadline=None)
@given(small_mats)
def test_kernel_basis(rows):
    M = z.imat(rows)
    K = z.kernel_basis(M)
    assert z.is_zero(M @ K)
    assert K.shape[1] == M.shape[1] - sympy.Matrix(rows).rank()


@pytest.mark.parametrize("n", range(0, 5))
def test_cube_homology_is_a_point(n):
    H = z.homology_all(z.cubical_chain_complex(cs.standard_cube(n)))
    assert [str(h) for h in H] == ["Z"] + ["0"] * n


@pytest.mark.parametrize("n", range(1, 5))
def test_sphere_homology(n):
    C = z.cubical_chain_complex(cs.boundary_sphere(n))
    H = z.homology_all(C)
    expect = ["Z"] + ["0"] * (n - 2) + ["Z"] if n > 1 else ["Z^2"]
    assert [str(h) for h in H] == expect
    assert C.euler_characteristic() == 1 + (-1) ** (n - 1)


@pytest.mark.parametrize("n", range(1, 5))
def test_boundary_squares_to_zero(n):
    for X in (cs.standard_cube(n), cs.boundary_sphere(n), cs.horn(n, 1, -1)):
        assert z.cubical_chain_complex(X).check() == []


def test_torus_from_reduced_product(fixtures_dir):
    S = cs.load_cubical_set(fixtures_dir / "boundary_square.cub")
    T = cs.reduced_product(S, S)
    C = z.cubical_chain_complex(T)
    assert C.check() == []
    assert [str(h) for h in z.homology_all(C)] == ["Z", "Z^2", "Z"]


def test_torsion_in_classifying_space(fixtures_dir):
    X = cs.load_cubical_set(fixtures_dir / "bz2.cub")
    H = z.homology_all(z.cubical_chain_complex(X))
    assert str(H[1]) == "Z/2"


def test_torsion_from_presentation():
    C = z.ChainComplex([1, 1], {1: z.imat([[2]])})
    assert [str(h) for h in z.homology_all(C)] == ["Z/2", "0"]
    G = z.FgAbelianGroup(3, z.imat([[2, 0], [0, 3], [0, 0]]))
    assert G.invariants.torsion == (6,) and G.invariants.rank == 1


def test_not_a_complex():
    C = z.ChainComplex([1, 1, 1], {1: z.imat([[1]]), 2: z.imat([[1]])})
    assert C.check() == [2]
    with pytest.raises(z.NotAComplex):
        z.homology(C, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_homology_invariant_under_change_of_basis(seed):
    rng = np.random.default_rng(seed)
    C = z.cubical_chain_complex(cs.boundary_sphere(2))
    ps = [z.random_unimodular(rng, r) for r in C.ranks]
    bd = {k: ps[k - 1][0] @ C.d(k) @ ps[k][1] for k in range(1, C.top + 1)}
    D = z.ChainComplex(C.ranks, bd)
    assert [str(h) for h in z.homology_all(D)] == [str(h) for h in z.homology_all(C)]
