import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crrigid.exactnum import ExactMatrix, GaussianRational, I, kernel_basis, rank
from crrigid.polyalg import (
    GramPair,
    HermitianPoly,
    VectorForm,
    conj_swap,
    is_positive_definite,
    linear_substitute,
    monomial_basis,
    multiply,
    pairing,
    s1_decompose,
    s1_generator,
    s1_subspace,
    space_dim,
    variable,
)

from conftest import gq, random_form, random_invertible, random_poly


def x(n, i):
    return variable(n, i)


def xb(n, i):
    return variable(n, i, conjugate=True)


def test_space_dim_examples():
    assert space_dim(2, 2, 0) == 3
    assert all(space_dim(1, k, l) == 1 for k in range(4) for l in range(4))
    assert space_dim(9, 3, 3) == 165**2 == 27225


def test_basis_count_matches_space_dim():
    for n in range(1, 10):
        for k in range(4):
            for l in range(4):
                basis = monomial_basis(n, k, l)
                assert len(basis) == space_dim(n, k, l) == comb(n + k - 1, k) * comb(n + l - 1, l)
                assert len(set(basis)) == len(basis)


def test_basis_order_is_lex_descending():
    assert monomial_basis(2, 2, 0) == ((2, 0, 0, 0), (1, 1, 0, 0), (0, 2, 0, 0))


def test_multiply_examples():
    n = 2
    p = x(n, 0) + x(n, 1).scale(I)
    assert multiply(p, HermitianPoly.one(n)) == p
    assert multiply(x(n, 0), xb(n, 0)).terms == {(1, 0, 1, 0): 1}
    lhs = multiply(x(n, 0) + x(n, 1), xb(n, 0) - xb(n, 1))
    rhs = (
        multiply(x(n, 0), xb(n, 0))
        - multiply(x(n, 0), xb(n, 1))
        + multiply(x(n, 1), xb(n, 0))
        - multiply(x(n, 1), xb(n, 1))
    )
    assert lhs == rhs and len(lhs.terms) == 4


def test_conj_swap_examples():
    n = 2
    assert conj_swap(multiply(x(n, 0), xb(n, 1))) == multiply(x(n, 1), xb(n, 0))
    assert conj_swap(x(n, 0).scale(I)) == xb(n, 0).scale(-I)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_multiply_commutative_associative_and_conj_involution(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    p, q, s = (random_poly(rng, n, rng.randint(0, 2), rng.randint(0, 2)) for _ in range(3))
    assert multiply(p, q) == multiply(q, p)
    assert multiply(multiply(p, q), s) == multiply(p, multiply(q, s))
    assert conj_swap(conj_swap(p)) == p
    assert conj_swap(multiply(p, q)) == multiply(conj_swap(p), conj_swap(q))


def test_evaluate_uses_conjugates():
    n = 1
    p = multiply(x(n, 0), xb(n, 0))
    assert p.evaluate([gq(1, 2)]) == 5


def test_pairing_examples():
    n = 2
    H = VectorForm.from_polys([multiply(x(n, 0), x(n, 1))])
    P = VectorForm.from_polys([multiply(x(n, 0), x(n, 0))])
    assert pairing(H, VectorForm.zero(n, 1, 1)).is_zero()
    expected = HermitianPoly(n, 2, 2, {(1, 1, 2, 0): 1})
    assert pairing(H, P) == expected


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_pairing_hermitian_symmetry(seed):
    rng = random.Random(seed)
    n, r = rng.randint(1, 3), rng.randint(1, 3)
    H = random_form(rng, n, rng.randint(1, 2), r)
    P = random_form(rng, n, rng.randint(1, 2), r)
    G = ExactMatrix.from_rows([[gq(2 if a == b else 0) + (gq(0, 1) if b == a + 1 else 0) + (gq(0, -1) if a == b + 1 else 0) for b in range(r)] for a in range(r)])
    assert is_positive_definite(G)
    assert conj_swap(pairing(H, P)) == pairing(P, H)
    assert conj_swap(pairing(H, P, G)) == pairing(P, H, G)


def test_s1_generator_examples():
    assert s1_generator(2) == multiply(x(2, 0), xb(2, 0)) + multiply(x(2, 1), xb(2, 1))
    assert s1_generator(1) == multiply(x(1, 0), xb(1, 0))
    g = ExactMatrix.diagonal([2, 3])
    assert s1_generator(2, g) == multiply(x(2, 0), xb(2, 0)).scale(2) + multiply(x(2, 1), xb(2, 1)).scale(3)


def test_s1_subspace_examples():
    S = s1_subspace(1, 2, 2)
    assert S.ncols == 1 and S.columns[0] == {0: 1}
    S = s1_subspace(2, 1, 1)
    assert S.ncols == 1
    assert HermitianPoly.from_vector(2, 1, 1, S.columns[0]) == s1_generator(2)
    assert s1_subspace(4, 2, 2).ncols == 16
    assert s1_subspace(3, 0, 2).ncols == 0


@pytest.mark.parametrize("n,k,l", [(1, 1, 1), (2, 2, 2), (3, 2, 1), (4, 2, 2), (3, 3, 3)])
def test_s1_columns_independent(n, k, l):
    S = s1_subspace(n, k, l)
    assert rank(S) == S.ncols == space_dim(n, k - 1, l - 1)


def test_s1_decompose_examples():
    assert s1_decompose(HermitianPoly.zero(2, 2, 2)).is_zero()
    assert s1_decompose(multiply(x(2, 0), xb(2, 1))) is None


def _hermitian_pd(rng, n):
    """A A* + I with Gaussian-integer A."""
    A = random_invertible(rng, n)
    M = A @ A.conj_transpose() + ExactMatrix.identity(n)
    return M


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_s1_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    k, l = rng.randint(1, 3), rng.randint(1, 3)
    g = _hermitian_pd(rng, n) if rng.random() < 0.5 else None
    f = random_poly(rng, n, k - 1, l - 1)
    Q = multiply(s1_generator(n, g), f)
    assert s1_decompose(Q, g) == f
    # anything off the subspace by a non-multiple is rejected
    off = multiply(x(n, 0), xb(n, n - 1)) if n > 1 else None
    if off is not None and k == 1 and l == 1:
        assert s1_decompose(Q + off, g) is None


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_s1_decompose_agrees_with_linear_solve(seed):
    """Oracle: membership of Q in the column span of s1_subspace, by exact elimination."""
    from crrigid.exactnum import membership

    rng = random.Random(seed)
    n, k, l = rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 2)
    Q = random_poly(rng, n, k, l, density=0.3)
    if rng.random() < 0.5:
        Q = multiply(s1_generator(n), random_poly(rng, n, k - 1, l - 1))
    S = s1_subspace(n, k, l).to_dense()
    dense_cols = [list(S.column(j)) for j in range(S.cols)]
    vec = Q.sparse_vector()
    v = [vec.get(i, 0) for i in range(S.rows)]
    solved = membership(v, dense_cols) if dense_cols else (None if any(v) else [])
    assert (solved is None) == (s1_decompose(Q) is None)


def test_linear_substitute_composes():
    rng = random.Random(3)
    n = 2
    p = random_poly(rng, n, 2, 1)
    A, B = random_invertible(rng, n), random_invertible(rng, n)
    assert linear_substitute(linear_substitute(p, A), B) == linear_substitute(p, A @ B)
    assert linear_substitute(p, ExactMatrix.identity(n)) == p


def test_positive_definite_and_grampair_validation():
    assert is_positive_definite(ExactMatrix.from_rows([[2, I], [-I, 2]]))
    assert not is_positive_definite(ExactMatrix.from_rows([[1, 2], [2, 1]]))
    assert not is_positive_definite(ExactMatrix.from_rows([[1, I], [I, 1]]))
    with pytest.raises(ValueError):
        GramPair(ExactMatrix.from_rows([[1, 2], [2, 1]]), ExactMatrix.identity(1))


def test_vectorform_mix_and_coefficients():
    n = 2
    H = VectorForm.from_polys([x(n, 0), x(n, 1)])
    u = ExactMatrix.from_rows([[0, 1], [-1, 0]])
    assert H.mix(u) == VectorForm.from_polys([x(n, 1), -x(n, 0)])
    assert rank(H.coefficient_matrix()) == 2


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_json_round_trips(seed):
    rng = random.Random(seed)
    p = random_poly(rng, 3, 2, 1)
    assert HermitianPoly.from_json(p.to_json()) == p
    H = random_form(rng, 3, 2, 2)
    assert VectorForm.from_json(H.to_json()) == H


def test_json_errors_carry_paths():
    bad = {"n": 2, "k": 1, "components": [{"terms": [{"hol": [1, 0], "re": "1/1"}]}, {"terms": [{"hol": [1], "re": "1"}]}]}
    with pytest.raises(ValueError, match=r"components\[1\].*terms\[0\]"):
        VectorForm.from_json(bad)
    with pytest.raises(ValueError, match="bidegree"):
        HermitianPoly(2, 2, 0, {(1, 0, 0, 0): 1})
