"""Bochner rigidity of holomorphic vector-valued forms and related checks.

For H in S^{k,0}(V*) (x) W the operator gamma(H, P) = <H, Pbar> + <P, Hbar>
is only real-linear in P, so every solution space below is computed after
splitting each complex coefficient into real and imaginary parts.  The real
coordinates of P are indexed by ``(a * D + j) * 2 + part`` where j runs over
the monomial basis of S^{k,0} (size D) and part 0/1 multiplies by 1/i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from ..exactnum import (
    ExactMatrix,
    GaussianRational,
    I,
    SparseColumns,
    SparseEchelon,
    constrained_preimage,
    kernel_basis,
    membership,
    rank,
    realify_vector,
    rref,
    reduce_modulo,
)
from ..polyalg import (
    GramPair,
    HermitianPoly,
    VectorForm,
    conj_swap,
    monomial_basis,
    multiply,
    pairing,
    s1_decompose,
    s1_subspace,
    space_dim,
)
from .verdict import LinearSystem, RigidityVerdict, Status

__all__ = [
    "gamma",
    "bochner_rigid",
    "nondegenerate",
    "recover_skew",
    "lemma1_solve",
    "Lemma1Result",
    "bochner_flat",
    "iwatani_check",
    "iwatani_normal_form",
    "IwataniResult",
    "NotNormalFormError",
    "PreconditionError",
    "is_skew_hermitian",
    "verify_witness",
]

_UNITS = (GaussianRational(1), I)


class PreconditionError(ValueError):
    pass


class NotNormalFormError(ValueError):
    pass


def _grams(H: VectorForm, grams: GramPair | None) -> GramPair:
    if grams is None:
        return GramPair.identity(H.n, H.r)
    if grams.n != H.n or grams.r != H.r:
        raise ValueError(f"grams are {grams.n}x{grams.r}, form needs {H.n}x{H.r}")
    return grams


def gamma(H: VectorForm, P: VectorForm, grams: GramPair | None = None) -> HermitianPoly:
    if (H.n, H.k, H.r) != (P.n, P.k, P.r):
        raise ValueError("gamma needs H and P with the same (n, k, r)")
    G = grams.G if grams is not None else None
    return pairing(H, P, G) + pairing(P, H, G)


def _weighted(H: VectorForm, G: ExactMatrix) -> list:
    """Hg_a = sum_c G_ca H^c, so that gamma(H, u m e_a) = conj(u) Hg_a mbar + u m conj(Hg_a)."""
    out = []
    for a in range(H.r):
        acc = HermitianPoly.zero(H.n, H.k, 0)
        for c in range(H.r):
            w = G.entries[c][a]
            if w:
                acc = acc + H.components[c].scale(w)
        out.append(acc)
    return out


def _monomial(n: int, m: tuple) -> HermitianPoly:
    return HermitianPoly._trusted(n, sum(m[:n]), sum(m[n:]), {m: GaussianRational(1)})


def _real_to_form(x, n: int, k: int, r: int) -> VectorForm:
    basis = monomial_basis(n, k, 0)
    D = len(basis)
    items = x.items() if isinstance(x, dict) else enumerate(x)
    coeffs: dict = {}
    for t, c in items:
        if not c:
            continue
        t2, part = divmod(t, 2)
        coeffs[t2] = coeffs.get(t2, GaussianRational(0)) + _UNITS[part] * c
    comps = []
    for a in range(r):
        terms = {basis[j]: coeffs[a * D + j] for j in range(D) if coeffs.get(a * D + j)}
        comps.append(HermitianPoly._trusted(n, k, 0, terms))
    return VectorForm(n, k, tuple(comps))


def _form_to_real(P: VectorForm) -> list:
    basis = monomial_basis(P.n, P.k, 0)
    out = []
    for h in P.components:
        for m in basis:
            c = h.terms.get(m, GaussianRational(0))
            out += [c.re, c.im]
    return out


def _realified_columns(cols: list) -> list:
    """Complex sparse columns -> real columns for the units 1 and i."""
    out = []
    for v in cols:
        out.append(realify_vector(v))
        out.append(realify_vector({k: I * x for k, x in v.items()}))
    return out


def _gamma_columns(H: VectorForm, grams: GramPair) -> list:
    n, k = H.n, H.k
    Hg = _weighted(H, grams.G)
    Hg_bar = [conj_swap(h) for h in Hg]
    cols = []
    for a in range(H.r):
        for m in monomial_basis(n, k, 0):
            mono = _monomial(n, m)
            mono_bar = conj_swap(mono)
            left = multiply(Hg[a], mono_bar)
            right = multiply(mono, Hg_bar[a])
            for u in _UNITS:
                g = left.scale(u.conjugate()) + right.scale(u)
                cols.append(realify_vector(g.sparse_vector()))
    return cols


def _outside(vectors: list, span: list):
    """First vector (in order) not in span(span), or None."""
    ech = SparseEchelon()
    for v in span:
        ech.insert(v)
    for v in vectors:
        if ech.reduce(v):
            return v
    return None


def _inverse(M: ExactMatrix) -> ExactMatrix:
    n = M.rows
    aug = ExactMatrix.from_rows([list(M.entries[i]) + [int(i == j) for j in range(n)] for i in range(n)], 2 * n)
    R, _, _ = rref(aug)
    return ExactMatrix.from_rows([row[n:] for row in R.entries], n)


def _skew_mixings(H: VectorForm, grams: GramPair) -> list:
    """Real coordinates of u H for a real basis of the G-skew matrices u.

    u is G-skew (u^T G + G conj(u) = 0) iff u^T = s G^{-1} with s skew-Hermitian.
    """
    r = H.r
    zero = GaussianRational(0)
    basis = []
    for a in range(r):
        for b in range(a, r):
            units = [I] if a == b else [GaussianRational(1), I]
            for z in units:
                s = [[zero] * r for _ in range(r)]
                s[a][b] = z
                s[b][a] = -z.conjugate() if a != b else z
                basis.append(ExactMatrix.from_rows(s, r))
    Ginv = None if _is_identity(grams.G) else _inverse(grams.G)
    out = []
    for s in basis:
        u = s.transpose() if Ginv is None else (s @ Ginv).transpose()
        x = _form_to_real(H.mix(u))
        out.append({i: c for i, c in enumerate(x) if c})
    return out


def bochner_rigid(H: VectorForm, grams: GramPair | None = None) -> RigidityVerdict:
    """Decide whether gamma(H, P) in S_1 forces gamma(H, P) = 0."""
    grams = _grams(H, grams)
    n, k, r = H.n, H.k, H.r
    if H.is_zero():
        return RigidityVerdict(Status.DEGENERATE, None, (), ())
    nrows = 2 * space_dim(n, k, k)
    cols = _gamma_columns(H, grams)
    s1 = _realified_columns(s1_subspace(n, k, k, grams.g).columns)
    ncols = len(cols)
    # the skew mixings of H always lie in ker(gamma), and ker(gamma) in the
    # solution set; both serve as certified early exits for the eliminations
    kern = kernel_basis(SparseColumns(nrows, cols), sparse=True, known=_skew_mixings(H, grams))
    # constrained preimage, split so the reduced system can be reported
    residual = reduce_modulo(SparseColumns(nrows, cols), SparseColumns(nrows, s1))
    sol = kernel_basis(SparseColumns(nrows, residual), sparse=True, known=kern)
    systems = {
        "gamma": LinearSystem(nrows, ncols, ncols - len(kern), SparseColumns(nrows, cols)),
        "s1": LinearSystem(nrows, len(s1), rank(SparseColumns(nrows, s1)), SparseColumns(nrows, s1)),
        "gamma_mod_s1": LinearSystem(nrows, ncols, ncols - len(sol), SparseColumns(nrows, residual)),
    }
    sol_forms = tuple(_real_to_form(x, n, k, r) for x in sol)
    kern_forms = tuple(_real_to_form(x, n, k, r) for x in kern)
    if len(sol) == len(kern):
        return RigidityVerdict(Status.RIGID, None, sol_forms, kern_forms, systems)
    w = _outside(sol, kern)
    witness = _real_to_form(w, n, k, r)
    return RigidityVerdict(Status.NOT_RIGID, witness, sol_forms, kern_forms, systems)


def verify_witness(H: VectorForm, P: VectorForm, grams: GramPair | None = None) -> bool:
    """True iff gamma(H, P) is a nonzero element of S_1."""
    grams = _grams(H, grams)
    g = gamma(H, P, grams)
    return (not g.is_zero()) and s1_decompose(g, grams.g) is not None


def nondegenerate(H: VectorForm) -> bool:
    """The induced map S^{k,0}(V) -> W is onto: coefficient matrix has rank r."""
    if H.r == 0:
        return True
    return rank(H.coefficient_matrix()) == H.r


def is_skew_hermitian(u: ExactMatrix, G: ExactMatrix | None = None) -> bool:
    """u^T G + G conj(u) == 0, which is u + u* == 0 for G = I."""
    r = u.rows
    for a in range(r):
        for b in range(r):
            if G is None:
                s = u.entries[a][b] + _conj(u.entries[b][a])
            else:
                s = sum(
                    (u.entries[c][a] * G.entries[c][b] + G.entries[a][c] * _conj(u.entries[c][b]) for c in range(r)),
                    Fraction(0),
                )
            if s:
                return False
    return True


def _conj(x):
    return x.conjugate()


def recover_skew(H: VectorForm, P: VectorForm, grams: GramPair | None = None) -> ExactMatrix | None:
    """Solve P^a = sum_b u_ab H^b for the skew-Hermitian matrix u.

    Raises PreconditionError if H is degenerate or gamma(H, P) != 0.
    Returns None if no such u exists.
    """
    grams = _grams(H, grams)
    if not nondegenerate(H):
        raise PreconditionError("H is degenerate")
    if not gamma(H, P, grams).is_zero():
        raise PreconditionError("gamma(H, P) is not zero")
    Hc = H.coefficient_matrix().entries
    Pc = P.coefficient_matrix().entries
    rows = []
    for a in range(H.r):
        c = membership(list(Pc[a]), [list(h) for h in Hc])
        if c is None:
            return None
        rows.append(c)
    u = ExactMatrix.from_rows([[GaussianRational(0) + x for x in row] for row in rows], H.r)
    if not is_skew_hermitian(u, None if _is_identity(grams.G) else grams.G):
        return None
    return u


def _is_identity(M: ExactMatrix) -> bool:
    return M == ExactMatrix.identity(M.rows)


@dataclass(frozen=True)
class Lemma1Result:
    solutions: tuple
    pairing_vanishes: bool
    system: LinearSystem

    @property
    def dim(self) -> int:
        return len(self.solutions)

    def to_json(self) -> dict:
        return {
            "solution_dim": self.dim,
            "pairing_vanishes": self.pairing_vanishes,
            "system": self.system.to_json(),
        }


def lemma1_solve(H: VectorForm, grams: GramPair | None = None) -> Lemma1Result:
    """Real basis of {B in S^{1,0} (x) W : <H, Bbar> in S^{k-1,0}_1}."""
    grams = _grams(H, grams)
    n, k, r = H.n, H.k, H.r
    if k < 2:
        raise ValueError("lemma1_solve needs k >= 2")
    Hg = _weighted(H, grams.G)
    cols = []
    for a in range(r):
        for m in monomial_basis(n, 1, 0):
            mono_bar = conj_swap(_monomial(n, m))
            base = multiply(Hg[a], mono_bar)
            for u in _UNITS:
                cols.append(realify_vector(base.scale(u.conjugate()).sparse_vector()))
    nrows = 2 * space_dim(n, k, 1)
    s1 = _realified_columns(s1_subspace(n, k, 1, grams.g).columns)
    sol = constrained_preimage(SparseColumns(nrows, cols), SparseColumns(nrows, s1), sparse=True)
    forms = tuple(_real_to_form(x, n, 1, r) for x in sol)
    vanishes = all(pairing(H, B, grams.G).is_zero() for B in forms)
    system = LinearSystem(nrows, len(cols), len(cols) - len(sol), SparseColumns(nrows, cols))
    return Lemma1Result(forms, vanishes, system)


def bochner_flat(H: VectorForm, grams: GramPair | None = None) -> bool:
    """gamma(H, H) lies in S^{k-1,k-1}_1."""
    grams = _grams(H, grams)
    if H.is_zero():
        return True
    return s1_decompose(gamma(H, H, grams), grams.g) is not None


class IwataniResult(NamedTuple):
    ok: bool
    r_squared: Fraction | None


def normal_form_vectors(H: VectorForm) -> list:
    """nu_i = h^a_{in} w_a for H = sum_a h^a_ij x^i x^j w_a supported on x^n.

    With h symmetric, the polynomial coefficient of x^q x^n (q < n) is
    2 h_qn and that of (x^n)^2 is h_nn.
    """
    n = H.n
    if H.k != 2:
        raise NotNormalFormError("normal form needs a quadratic form")
    nus = [[GaussianRational(0)] * H.r for _ in range(n)]
    for a, h in enumerate(H.components):
        for m, c in h.terms.items():
            if m[n - 1] == 0:
                raise NotNormalFormError(f"component {a} has a monomial without x^{n}")
            if m[n - 1] == 2:
                nus[n - 1][a] = c
            else:
                q = next(i for i in range(n - 1) if m[i])
                nus[q][a] = c * Fraction(1, 2)
    return nus


def _inner(u, v, G: ExactMatrix | None):
    r = len(u)
    s = GaussianRational(0)
    for a in range(r):
        for b in range(r):
            gab = (1 if a == b else 0) if G is None else G.entries[a][b]
            if gab and u[a] and v[b]:
                s = s + u[a] * v[b].conjugate() * gab
    return s


def iwatani_check(H: VectorForm, G: ExactMatrix | None = None) -> IwataniResult:
    """Orthogonality of the nu_i and |nu_n|^2 = 4 |nu_q|^2; certificate r^2 = |nu_q|^2."""
    nus = normal_form_vectors(H)
    n = H.n
    for i in range(n):
        for j in range(i + 1, n):
            if _inner(nus[i], nus[j], G):
                return IwataniResult(False, None)
    top = _inner(nus[n - 1], nus[n - 1], G)
    r2 = top * Fraction(1, 4)
    for q in range(n - 1):
        if _inner(nus[q], nus[q], G) != r2:
            return IwataniResult(False, None)
    return IwataniResult(True, r2.re)


def iwatani_normal_form(n: int, scale=1) -> VectorForm:
    """H = sum_q 2 s x^q x^n w_q + 2 s (x^n)^2 w_n, so nu_q = s w_q and nu_n = 2 s w_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = GaussianRational(Fraction(scale)) * 2
    comps = []
    for q in range(n):
        m = [0] * (2 * n)
        m[q] += 1
        m[n - 1] += 1
        comps.append(HermitianPoly(n, 2, 0, {tuple(m): s}))
    return VectorForm(n, 2, tuple(comps))
