import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crrigid.exactnum import ExactMatrix, GaussianRational, I, float_rank_oracle, membership
from crrigid.polyalg import (
    GramPair,
    HermitianPoly,
    VectorForm,
    conj_swap,
    linear_substitute,
    multiply,
    s1_decompose,
    s1_generator,
    variable,
)
from crrigid.rigidity import (
    NotNormalFormError,
    PreconditionError,
    Status,
    bochner_flat,
    bochner_rigid,
    gamma,
    is_skew_hermitian,
    iwatani_check,
    iwatani_normal_form,
    lemma1_solve,
    nondegenerate,
    recover_skew,
    verify_witness,
)

from conftest import gq, random_form, random_invertible, random_skew


def x(n, i):
    return variable(n, i)


def gr24():
    """x1 y2 - x2 y1 with variables (x1, x2, y1, y2)."""
    n = 4
    return VectorForm.from_polys([multiply(x(n, 0), x(n, 3)) - multiply(x(n, 1), x(n, 2))])


# --- gamma ---------------------------------------------------------------------


def test_gamma_examples():
    n = 2
    H = VectorForm.from_polys([multiply(x(n, 0), x(n, 1))])
    P = VectorForm.from_polys([multiply(x(n, 0), x(n, 0))])
    assert gamma(H, VectorForm.zero(n, 2, 1)).is_zero()
    expected = HermitianPoly(n, 2, 2, {(1, 1, 2, 0): 1, (2, 0, 1, 1): 1})
    assert gamma(H, P) == expected


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_gamma_hermitian_and_real_linear(seed):
    rng = random.Random(seed)
    n, k, r = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
    H, P, Q = (random_form(rng, n, k, r) for _ in range(3))
    g = gamma(H, P)
    assert conj_swap(g) == g
    assert gamma(H, P + Q) == g + gamma(H, Q)
    c = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    assert gamma(H, P.scale(c)) == g.scale(c)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_skew_mixing_is_in_gamma_kernel(seed):
    rng = random.Random(seed)
    n, k, r = rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 3)
    H = random_form(rng, n, k, r)
    u = random_skew(rng, r)
    assert is_skew_hermitian(u)
    assert gamma(H, H.mix(u)).is_zero()


def test_skew_mixing_with_w_gram():
    rng = random.Random(11)
    H = random_form(rng, 3, 2, 2)
    G = ExactMatrix.from_rows([[2, I], [-I, 3]])
    grams = GramPair(ExactMatrix.identity(3), G)
    # u = G^{-1}-twisted skew: u^T G + G conj(u) = 0 for u^T = s G^{-1} with s skew-Hermitian
    s = random_skew(rng, 2)
    Ginv = ExactMatrix.from_rows([[Fraction(3, 5), -I * Fraction(1, 5)], [I * Fraction(1, 5), Fraction(2, 5)]])
    assert Ginv @ G == ExactMatrix.identity(2)
    u = (s @ Ginv).transpose()
    assert is_skew_hermitian(u, G)
    assert gamma(H, H.mix(u), grams).is_zero()


# --- bochner_rigid ---------------------------------------------------------------


def test_grassmannian_24_is_rigid():
    v = bochner_rigid(gr24())
    assert v.status is Status.RIGID and v.witness is None
    assert len(v.solution_space) == len(v.gamma_kernel) == 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_single_variable_not_rigid(k):
    H = VectorForm.from_polys([HermitianPoly(1, k, 0, {(k, 0): 1})])
    v = bochner_rigid(H)
    assert v.status is Status.NOT_RIGID
    assert v.witness == H
    assert gamma(H, H) == multiply(s1_generator(1), HermitianPoly(1, k - 1, k - 1, {(k - 1, k - 1): 2}))
    assert verify_witness(H, v.witness)


def test_zero_form_is_degenerate():
    v = bochner_rigid(VectorForm.zero(3, 2, 2))
    assert v.status is Status.DEGENERATE
    assert v.to_json()["status"] == "DEGENERATE"


def test_equal_dimension_bound_is_not_enough():
    # r = n/2 exactly: x1^2 + x2^2 = (x1 + i x2)(x1 - i x2) admits P with gamma in S1 \ {0}
    n = 2
    H = VectorForm.from_polys([multiply(x(n, 0), x(n, 0)) + multiply(x(n, 1), x(n, 1))])
    v = bochner_rigid(H)
    assert v.status is Status.NOT_RIGID
    assert verify_witness(H, v.witness)


def test_verdict_json_shape():
    v = bochner_rigid(VectorForm.from_polys([HermitianPoly(1, 2, 0, {(2, 0): 1})]))
    js = v.to_json()
    assert set(js) == {"status", "witness", "solution_dim", "kernel_dim", "systems"}
    assert VectorForm.from_json(js["witness"]) == v.witness
    assert v.to_json(emit_witness=False)["witness"] is None


def test_witness_is_reproducible():
    rng = random.Random(5)
    H = VectorForm.from_polys([HermitianPoly(2, 2, 0, {(2, 0, 0, 0): 1, (0, 2, 0, 0): 1})])
    assert bochner_rigid(H).witness == bochner_rigid(H).witness


def _transformed(H, A, g=None):
    Hp = VectorForm(H.n, H.k, tuple(linear_substitute(h, A) for h in H.components))
    gen = linear_substitute(s1_generator(H.n, g), A)
    n = H.n
    gp = ExactMatrix.from_rows(
        [[gen.terms.get(tuple(int(t == i) for t in range(n)) + tuple(int(t == j) for t in range(n)), 0) for j in range(n)] for i in range(n)],
        n,
    )
    return Hp, GramPair(gp, ExactMatrix.identity(H.r))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verdict_frame_invariance(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    k = rng.randint(1, 2)
    r = rng.randint(1, 2)
    H = random_form(rng, n, k, r, density=0.5)
    if rng.random() < 0.3:
        H = VectorForm.from_polys([multiply(x(n, 0), x(n, 0)) + (multiply(x(n, 1), x(n, 1)) if n > 1 else HermitianPoly.zero(n, 2, 0))])
    A = random_invertible(rng, n)
    Hp, grams = _transformed(H, A)  # GramPair validates positive definiteness
    assert bochner_rigid(H).status is bochner_rigid(Hp, grams).status


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rigid_nondegenerate_solutions_are_skew_mixings(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    r = rng.randint(1, max(1, n // 2))
    H = random_form(rng, n, 2, r)
    v = bochner_rigid(H)
    if v.status is Status.RIGID and nondegenerate(H):
        assert len(v.solution_space) <= r * r
        for P in v.solution_space:
            u = recover_skew(H, P)
            assert u is not None and is_skew_hermitian(u)
            assert H.mix(u) == P


def test_systems_cross_checked_by_float_oracle():
    v = bochner_rigid(gr24())
    for s in v.systems.values():
        assert float_rank_oracle(s.matrix) == s.rank


# --- nondegenerate / recover_skew ---------------------------------------------------


def test_nondegenerate_examples():
    assert not nondegenerate(VectorForm.zero(2, 2, 1))
    assert nondegenerate(VectorForm.from_polys([multiply(x(2, 0), x(2, 1))]))
    assert nondegenerate(gr24())
    dup = VectorForm.from_polys([x(2, 0), x(2, 0).scale(2)])
    assert not nondegenerate(dup)


def test_recover_skew_examples():
    H = gr24()
    assert recover_skew(H, VectorForm.zero(4, 2, 1)) == ExactMatrix.from_rows([[GaussianRational(0)]])
    assert recover_skew(H, H.scale(I)).entries == ((I,),)
    rng = random.Random(2)
    for _ in range(10):
        u = random_skew(rng, 1)
        got = recover_skew(H, H.mix(u))
        assert got.entries[0][0] == u.entries[0][0]


def test_recover_skew_round_trip_r2():
    rng = random.Random(8)
    n = 4
    H = VectorForm.from_polys([multiply(x(n, 0), x(n, 3)) - multiply(x(n, 1), x(n, 2)), multiply(x(n, 0), x(n, 2))])
    for _ in range(10):
        u = random_skew(rng, 2)
        assert recover_skew(H, H.mix(u)) == ExactMatrix.from_rows([[GaussianRational(0) + e for e in row] for row in u.entries])


def test_recover_skew_preconditions():
    H = gr24()
    with pytest.raises(PreconditionError):
        recover_skew(H, H)
    with pytest.raises(PreconditionError):
        recover_skew(VectorForm.zero(4, 2, 1), VectorForm.zero(4, 2, 1))


# --- lemma1 ----------------------------------------------------------------------


def test_lemma1_grassmannian_has_only_zero():
    res = lemma1_solve(gr24())
    assert res.dim == 0 and res.pairing_vanishes


def test_lemma1_zero_form_everything_solves():
    res = lemma1_solve(VectorForm.zero(3, 2, 2))
    assert res.dim == 2 * 2 * 3


def test_lemma1_single_variable():
    H = VectorForm.from_polys([HermitianPoly(1, 2, 0, {(2, 0): 1})])
    res = lemma1_solve(H)
    assert res.dim == 2
    B = VectorForm.from_polys([x(1, 0)])
    from crrigid.polyalg import pairing

    assert s1_decompose(pairing(H, B)) is not None
    with pytest.raises(ValueError):
        lemma1_solve(VectorForm.from_polys([x(1, 0)]))


# --- flatness and Iwatani -------------------------------------------------------------


def test_bochner_flat_examples():
    assert bochner_flat(VectorForm.zero(2, 2, 1))
    assert bochner_flat(iwatani_normal_form(2))
    assert not bochner_flat(gr24())
    assert bochner_rigid(gr24()).rigid


def test_normal_form_gamma_is_generator_multiple():
    for n in range(2, 6):
        H = iwatani_normal_form(n)
        q = s1_decompose(gamma(H, H))
        xn = HermitianPoly(n, 1, 1, {tuple(int(i == n - 1) for i in range(n)) * 2: 8})
        assert q == xn


def test_iwatani_examples():
    assert iwatani_check(iwatani_normal_form(3)) == (True, Fraction(1))
    assert iwatani_check(iwatani_normal_form(4, 3)) == (True, Fraction(9))
    n = 2
    overlap = VectorForm.from_polys([multiply(x(n, 0), x(n, 1)).scale(2) + multiply(x(n, 1), x(n, 1))])
    assert not iwatani_check(overlap).ok
    with pytest.raises(NotNormalFormError):
        iwatani_check(VectorForm.from_polys([multiply(x(n, 0), x(n, 0))]))


def test_iwatani_with_w_gram():
    H = iwatani_normal_form(2)
    assert iwatani_check(H, ExactMatrix.diagonal([1, 1])).ok
    assert not iwatani_check(H, ExactMatrix.diagonal([2, 1])).ok
