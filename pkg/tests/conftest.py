"""Shared builders and hypothesis strategies."""
from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from crrigid.exactnum import ExactMatrix, GaussianRational
from crrigid.polyalg import HermitianPoly, VectorForm, monomial_basis


def gq(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


small_ints = st.integers(min_value=-4, max_value=4)
small_rationals = st.builds(Fraction, small_ints, st.integers(min_value=1, max_value=4))
gaussians = st.builds(GaussianRational, small_rationals, small_rationals)


def random_poly(rng: random.Random, n: int, k: int, l: int, density: float = 0.6, bound: int = 3) -> HermitianPoly:
    terms = {}
    for m in monomial_basis(n, k, l):
        if rng.random() < density:
            c = GaussianRational(rng.randint(-bound, bound), rng.randint(-bound, bound))
            if c:
                terms[m] = c
    return HermitianPoly(n, k, l, terms)


def random_form(rng: random.Random, n: int, k: int, r: int, density: float = 0.6, bound: int = 3) -> VectorForm:
    return VectorForm(n, k, tuple(random_poly(rng, n, k, 0, density, bound) for _ in range(r)))


def random_skew(rng: random.Random, r: int, bound: int = 3) -> ExactMatrix:
    """u with u + u* = 0."""
    rows = [[GaussianRational(0)] * r for _ in range(r)]
    for a in range(r):
        rows[a][a] = GaussianRational(0, rng.randint(-bound, bound))
        for b in range(a + 1, r):
            z = GaussianRational(rng.randint(-bound, bound), rng.randint(-bound, bound))
            rows[a][b] = z
            rows[b][a] = -z.conjugate()
    return ExactMatrix.from_rows(rows, r)


def random_invertible(rng: random.Random, n: int, bound: int = 2) -> ExactMatrix:
    from crrigid.exactnum import rank

    while True:
        A = ExactMatrix.from_rows(
            [[GaussianRational(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)],
            n,
        )
        if rank(A) == n:
            return A
