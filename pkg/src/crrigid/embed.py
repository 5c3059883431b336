"""Explicit polynomial embeddings, osculating flags and fundamental forms.

Maps are homogeneous polynomial maps C^{d+1} -> C^{D+1}.  Jets are taken in
the affine chart where the ``chart`` coordinate equals 1; the target stays
homogeneous and carries the standard Hermitian product, and every quotient
O_l / O_{l-1} is realized as the exact orthogonal complement.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial
from typing import Sequence

from .exactnum import ExactMatrix, GaussianRational, I, canonical_basis, membership
from .polyalg import (
    GramPair,
    HermitianPoly,
    VectorForm,
    conj_swap,
    monomial_basis,
    multiply,
    variable,
)

__all__ = [
    "PolyMap",
    "OsculatingFlag",
    "FFTower",
    "NonGenericPointError",
    "catalog",
    "CATALOG",
    "jet",
    "osculating_flag",
    "fundamental_forms",
    "span_equal",
    "whitney_pullback_check",
    "hermitian_quadric",
    "grassmannian_reference_forms",
    "random_point",
    "base_point",
]

_ZERO = GaussianRational(0)
_ONE = GaussianRational(1)


class NonGenericPointError(ValueError):
    pass


@dataclass(frozen=True)
class PolyMap:
    """Homogeneous polynomial map given by D+1 components in d+1 variables."""

    d: int
    components: tuple
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)
    chart: int = 0

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a map needs at least one component")
        degs = {c.k for c in comps if not c.is_zero()}
        if not degs:
            raise ValueError("all components vanish identically")
        if len(degs) > 1:
            raise ValueError(f"components have different degrees {sorted(degs)}")
        for c in comps:
            if c.n != self.d + 1 or c.l != 0:
                raise ValueError("components must be holomorphic in d+1 variables")
        if not 0 <= self.chart <= self.d:
            raise ValueError("chart index out of range")

    @property
    def D(self) -> int:
        return len(self.components) - 1

    @property
    def degree(self) -> int:
        return next(c.k for c in self.components if not c.is_zero())

    def affine_components(self) -> list:
        """Components with the chart variable set to 1, as {exponent tuple: coeff} in d variables."""
        out = []
        h = self.chart
        for c in self.components:
            poly: dict = {}
            for m, x in c.terms.items():
                e = m[: self.d + 1]
                key = e[:h] + e[h + 1 :]
                poly[key] = poly.get(key, _ZERO) + x
            out.append({k: v for k, v in poly.items() if v})
        return out

    def evaluate_affine(self, p: Sequence) -> list:
        p = [_gq(x) for x in p]
        out = []
        for poly in self.affine_components():
            s = _ZERO
            for e, c in poly.items():
                t = c
                for pi, ei in zip(p, e):
                    for _ in range(ei):
                        t = t * pi
                s = s + t
            out.append(s)
        return out

    def with_component(self, idx: int, poly: HermitianPoly) -> "PolyMap":
        comps = list(self.components)
        comps[idx] = poly
        return PolyMap(self.d, tuple(comps), self.name + "*", dict(self.params), self.chart)


def _gq(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    return GaussianRational(Fraction(x))


def _hol(nvars: int, terms: dict) -> HermitianPoly:
    k = sum(next(iter(terms))) if terms else 0
    return HermitianPoly(nvars, k, 0, {tuple(e) + (0,) * nvars: c for e, c in terms.items()})


def _mono(nvars: int, *idx: int) -> tuple:
    e = [0] * nvars
    for i in idx:
        e[i] += 1
    return tuple(e)


# ---------------------------------------------------------------------------
# catalog


def _linear(d: int) -> PolyMap:
    if d < 1:
        raise ValueError("linear needs d >= 1")
    nv = d + 1
    comps = tuple(_hol(nv, {_mono(nv, i): _ONE}) for i in range(nv))
    return PolyMap(d, comps, "linear", {"d": d})


def _veronese(d: int, degree: int = 2) -> PolyMap:
    if d < 1 or degree < 1:
        raise ValueError("veronese needs d >= 1 and degree >= 1")
    nv = d + 1
    comps = tuple(_hol(nv, {m[:nv]: _ONE}) for m in monomial_basis(nv, degree, 0))
    return PolyMap(d, comps, "veronese", {"d": d, "degree": degree})


def _det_poly(nv: int, cols: list) -> HermitianPoly:
    """Determinant of an n x n matrix whose entries are monomials (variable index) or None."""
    size = len(cols)
    terms: dict = {}
    for perm in permutations(range(size)):
        idx = []
        for row, c in enumerate(perm):
            v = cols[c][row]
            if v is None:
                break
            idx.append(v)
        else:
            sign = _perm_sign(perm)
            e = _mono(nv, *idx)
            terms[e] = terms.get(e, 0) + sign
    terms = {e: GaussianRational(c) for e, c in terms.items() if c}
    if not terms:
        return HermitianPoly.zero(nv, size, 0)
    return _hol(nv, terms)


def _perm_sign(perm) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def _plucker(n: int, p: int) -> PolyMap:
    """n x n minors of [t*I_n | X] with X an n x p matrix of affine coordinates.

    Variable 0 is t; X[i][a] is variable 1 + a*n + i, so the first column of X
    gives x^1..x^n, the second y^1..y^n and so on.
    """
    if not (n >= 1 and p >= 1):
        raise ValueError("plucker needs n >= 1 and p >= 1")
    nv = n * p + 1
    columns = []
    for c in range(n):
        columns.append([0 if r == c else None for r in range(n)])
    for a in range(p):
        columns.append([1 + a * n + r for r in range(n)])
    comps = tuple(_det_poly(nv, [columns[c] for c in S]) for S in combinations(range(n + p), n))
    return PolyMap(n * p, comps, "plucker", {"n": n, "p": p})


def _whitney_hat(n: int) -> PolyMap:
    """mu^0 = 2 xi^0 xi^{n+1}, mu^i = xi^i (i xi^0 + xi^{n+1}),
    mu^{n+i} = xi^i (-i xi^0 + xi^{n+1}), mu^{2n+1} = (xi^{n+1})^2 - (xi^0)^2."""
    if n < 1:
        raise ValueError("whitney_hat needs n >= 1")
    nv = n + 2
    last = n + 1
    comps = [_hol(nv, {_mono(nv, 0, last): GaussianRational(2)})]
    for i in range(1, n + 1):
        comps.append(_hol(nv, {_mono(nv, i, 0): I, _mono(nv, i, last): _ONE}))
    for i in range(1, n + 1):
        comps.append(_hol(nv, {_mono(nv, i, 0): -I, _mono(nv, i, last): _ONE}))
    comps.append(_hol(nv, {_mono(nv, last, last): _ONE, _mono(nv, 0, 0): -_ONE}))
    return PolyMap(n + 1, tuple(comps), "whitney_hat", {"n": n}, chart=last)


def _whitney_ball(n: int) -> PolyMap:
    """[t : z] -> [t^2 : (z^0)^2 : z^0 z^i : t z^i], the Whitney map in homogeneous form."""
    if n < 1:
        raise ValueError("whitney_ball needs n >= 1")
    nv = n + 2  # t, z^0, z^1..z^n
    comps = [_hol(nv, {_mono(nv, 0, 0): _ONE}), _hol(nv, {_mono(nv, 1, 1): _ONE})]
    comps += [_hol(nv, {_mono(nv, 1, 1 + i): _ONE}) for i in range(1, n + 1)]
    comps += [_hol(nv, {_mono(nv, 0, 1 + i): _ONE}) for i in range(1, n + 1)]
    return PolyMap(n + 1, tuple(comps), "whitney_ball", {"n": n})


CATALOG = {
    "linear": (_linear, ("d",)),
    "veronese": (_veronese, ("d", "degree")),
    "plucker": (_plucker, ("n", "p")),
    "whitney_hat": (_whitney_hat, ("n",)),
    "whitney_ball": (_whitney_ball, ("n",)),
}


def catalog(name: str, **params) -> PolyMap:
    if name not in CATALOG:
        raise ValueError(f"unknown embedding {name!r}; choose from {sorted(CATALOG)}")
    fn, allowed = CATALOG[name]
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"{name} does not take {sorted(extra)}")
    if name == "plucker":
        n, p = params.get("n"), params.get("p")
        if n is None or p is None or not (n >= p >= 2):
            raise ValueError("plucker needs n >= p >= 2")
    return fn(**{k: int(v) for k, v in params.items()})


def base_point(F: PolyMap) -> list:
    """The origin of the affine chart (the coordinate plane for plucker)."""
    return [_ZERO] * F.d


def random_point(F: PolyMap, seed: int, height: int = 5) -> list:
    """Gaussian-rational point with small-height parts; rejects points where F vanishes."""
    rng = random.Random(seed)
    while True:
        p = [
            GaussianRational(
                Fraction(rng.randint(-height, height), rng.randint(1, height)),
                Fraction(rng.randint(-height, height), rng.randint(1, height)),
            )
            for _ in range(F.d)
        ]
        if any(F.evaluate_affine(p)):
            return p


# ---------------------------------------------------------------------------
# jets


def _taylor(F: PolyMap, p: Sequence) -> dict:
    """Taylor coefficients at p: {alpha: vector in C^{D+1}}, F(p+v) = sum c_alpha v^alpha."""
    p = [_gq(x) for x in p]
    if len(p) != F.d:
        raise ValueError(f"point needs {F.d} coordinates")
    out: dict = {}
    D1 = F.D + 1
    for comp_idx, poly in enumerate(F.affine_components()):
        for e, c in poly.items():
            # prod_i (p_i + v_i)^e_i
            partial = {(): c}
            for pi, ei in zip(p, e):
                nxt: dict = {}
                for key, val in partial.items():
                    for s in range(ei + 1):
                        w = val * comb(ei, s)
                        for _ in range(ei - s):
                            w = w * pi
                        if w:
                            k2 = key + (s,)
                            nxt[k2] = nxt.get(k2, _ZERO) + w
                partial = nxt
            for alpha, val in partial.items():
                if not val:
                    continue
                vec = out.setdefault(alpha, [_ZERO] * D1)
                vec[comp_idx] = vec[comp_idx] + val
    return {a: v for a, v in out.items() if any(v)}


def _alphas(d: int, order: int) -> list:
    out = []
    for l in range(order + 1):
        out += [m[:d] for m in monomial_basis(d, l, 0)] if d else [()]
    return out


def jet(F: PolyMap, p: Sequence, order: int) -> list:
    """[(alpha, d^alpha F(p))] for |alpha| <= order, graded, lex descending within a degree."""
    T = _taylor(F, p)
    zero = tuple([0] * F.d)
    if zero not in T:
        raise ValueError("F vanishes at this point of the chart")
    out = []
    for alpha in _alphas(F.d, order):
        c = T.get(alpha)
        scale = 1
        for a in alpha:
            scale *= factorial(a)
        vec = [x * scale for x in c] if c is not None else [_ZERO] * (F.D + 1)
        out.append((alpha, vec))
    return out


# ---------------------------------------------------------------------------
# osculating flag


def _inner(u, v) -> GaussianRational:
    s = _ZERO
    for a, b in zip(u, v):
        if a and b:
            s = s + a * b.conjugate()
    return s


class _OrthoBasis:
    """Exact Gram-Schmidt without normalization."""

    def __init__(self):
        self.vectors: list = []
        self.norms: list = []

    def project_out(self, v) -> list:
        v = list(v)
        for u, nu in zip(self.vectors, self.norms):
            c = _inner(v, u) / nu
            if c:
                v = [a - c * b for a, b in zip(v, u)]
        return v

    def add(self, v) -> bool:
        w = self.project_out(v)
        if not any(w):
            return False
        self.vectors.append(w)
        self.norms.append(_inner(w, w))
        return True

    def copy(self) -> "_OrthoBasis":
        o = _OrthoBasis()
        o.vectors = list(self.vectors)
        o.norms = list(self.norms)
        return o


@dataclass(frozen=True)
class OsculatingFlag:
    point: tuple
    flag_bases: tuple  # orthogonal bases of O_0, O_1, ..., O_tau (cumulative)
    type_numbers: tuple  # (r_2, ..., r_tau)
    height: int
    tangent_dim: int
    g: ExactMatrix
    w_bases: tuple  # per level l >= 2: basis vectors of W_l
    w_grams: tuple
    status: str = "UNCHECKED"

    def dims(self) -> list:
        return [len(b) for b in self.flag_bases]

    def to_json(self) -> dict:
        return {
            "point": [x.to_json() for x in self.point],
            "tangent_dim": self.tangent_dim,
            "type_numbers": list(self.type_numbers),
            "height": self.height,
            "osculating_dims": self.dims(),
            "status": self.status,
        }


def _flag_core(F: PolyMap, p: Sequence):
    T = _taylor(F, p)
    zero = tuple([0] * F.d)
    if zero not in T:
        raise ValueError("F vanishes at this point of the chart")
    deg = F.degree
    ortho = _OrthoBasis()
    ortho.add(T[zero])
    bases = [tuple(ortho.vectors)]
    levels = [ortho.copy()]
    for l in range(1, deg + 1):
        grew = False
        for alpha in (m[: F.d] for m in monomial_basis(F.d, l, 0)):
            c = T.get(alpha)
            if c is not None and ortho.add(c):
                grew = True
        if not grew:
            break
        bases.append(tuple(ortho.vectors))
        levels.append(ortho.copy())
    return T, bases, levels


def osculating_flag(F: PolyMap, p: Sequence, check_generic: bool = True, seed: int = 0) -> OsculatingFlag:
    """Osculating spaces O_l = span{d^alpha F(p) : |alpha| <= l}, type numbers and height.

    With ``check_generic`` the type numbers are compared against those at a
    seeded random point; a mismatch sets status NON_GENERIC.
    """
    p = tuple(_gq(x) for x in p)
    T, bases, levels = _flag_core(F, p)
    dims = [len(b) for b in bases]
    tangent = dims[1] - dims[0] if len(dims) > 1 else 0
    type_numbers = tuple(dims[l] - dims[l - 1] for l in range(2, len(dims)))
    height = len(dims) - 1
    # tangent frame: d_i F(p) projected off F(p)
    lvl0 = levels[0]
    frame = []
    for i in range(F.d):
        alpha = tuple(int(j == i) for j in range(F.d))
        frame.append(lvl0.project_out(T.get(alpha, [_ZERO] * (F.D + 1))))
    g = ExactMatrix.from_rows([[_inner(a, b) for b in frame] for a in frame], F.d)
    w_bases, w_grams = [], []
    for l in range(2, len(dims)):
        prev = levels[l - 1]
        basis = []
        ob = _OrthoBasis()
        for alpha in (m[: F.d] for m in monomial_basis(F.d, l, 0)):
            c = T.get(alpha)
            if c is None:
                continue
            w = prev.project_out(c)
            if any(w) and ob.add(w):
                basis.append(w)
        w_bases.append(tuple(tuple(w) for w in basis))
        w_grams.append(ExactMatrix.from_rows([[_inner(a, b) for b in basis] for a in basis], len(basis)))
    status = "UNCHECKED"
    if check_generic:
        ref = osculating_flag(F, random_point(F, seed), check_generic=False)
        generic = (ref.tangent_dim, ref.type_numbers) == (tangent, type_numbers)
        status = "GENERIC" if generic else "NON_GENERIC"
    return OsculatingFlag(p, tuple(bases), type_numbers, height, tangent, g, tuple(w_bases), tuple(w_grams), status)


@dataclass(frozen=True)
class FFTower:
    """Fundamental forms F^2..F^tau in the chart variables, with frame Gram matrices."""

    forms: tuple
    grams: tuple
    flag: OsculatingFlag

    def level(self, l: int) -> VectorForm:
        return self.forms[l - 2]

    def gram(self, l: int) -> GramPair:
        return self.grams[l - 2]


def fundamental_forms(F: PolyMap, p: Sequence, check_generic: bool = True, seed: int = 0) -> FFTower:
    """Degree-l Taylor terms projected onto W_l = O_l minus O_{l-1}, in a basis of W_l."""
    flag = osculating_flag(F, p, check_generic=check_generic, seed=seed)
    if flag.status == "NON_GENERIC":
        raise NonGenericPointError(f"type numbers {flag.type_numbers} differ from the generic ones")
    if flag.tangent_dim != F.d:
        raise NonGenericPointError(f"map is not immersive here (tangent dim {flag.tangent_dim} < {F.d})")
    T = _taylor(F, flag.point)
    d = F.d
    _, _, levels = _flag_core(F, flag.point)
    forms, grams = [], []
    for l in range(2, flag.height + 1):
        prev = levels[l - 1]
        W = [list(w) for w in flag.w_bases[l - 2]]
        r = len(W)
        comps = [dict() for _ in range(r)]
        for m in monomial_basis(d, l, 0):
            c = T.get(m[:d])
            if c is None:
                continue
            w = prev.project_out(c)
            if not any(w):
                continue
            coeffs = membership(w, W)
            if coeffs is None:
                raise ArithmeticError("projected Taylor coefficient outside W_l")
            for a, x in enumerate(coeffs):
                if x:
                    comps[a][m] = x
        form = VectorForm(d, l, tuple(HermitianPoly(d, l, 0, c) for c in comps))
        forms.append(form)
        grams.append(GramPair(flag.g, flag.w_grams[l - 2]))
    return FFTower(tuple(forms), tuple(grams), flag)


# ---------------------------------------------------------------------------
# comparisons and references


def _components(forms) -> list:
    out = []
    for f in forms:
        if isinstance(f, VectorForm):
            out += list(f.components)
        else:
            out.append(f)
    return [h for h in out if not h.is_zero()]


def span_equal(A, B) -> bool:
    """Exact equality of the spans of the scalar components."""
    ca, cb = _components(A), _components(B)
    if not ca or not cb:
        return not ca and not cb
    shape = {(h.n, h.k, h.l) for h in ca + cb}
    if len(shape) != 1:
        raise ValueError("span_equal needs forms with the same (n, k)")
    n, k, l = shape.pop()
    basis = monomial_basis(n, k, l)
    va = [[h.terms.get(m, _ZERO) for m in basis] for h in ca]
    vb = [[h.terms.get(m, _ZERO) for m in basis] for h in cb]
    return canonical_basis(va) == canonical_basis(vb)


def grassmannian_reference_forms(n: int, p: int) -> dict:
    """The closed-form fundamental forms of the Grassmannian Gr(n, n+p).

    Variables: column a of the n x p chart matrix gives variables a*n .. a*n+n-1
    (x^i, y^i, z^i for a = 0, 1, 2).  Level l holds the l x l minors.
    """
    d = n * p
    out = {}
    for l in range(2, min(n, p) + 1):
        polys = []
        for rows in combinations(range(n), l):
            for cols in combinations(range(p), l):
                terms: dict = {}
                for perm in permutations(range(l)):
                    e = _mono(d, *(cols[perm[t]] * n + rows[t] for t in range(l)))
                    terms[e] = terms.get(e, 0) + _perm_sign(perm)
                polys.append(
                    HermitianPoly(d, l, 0, {e + (0,) * d: GaussianRational(c) for e, c in terms.items() if c})
                )
        out[l] = VectorForm(d, l, tuple(polys))
    return out


def hermitian_quadric(m: int) -> HermitianPoly:
    """Q_m = sum_{A=1}^m xi^A conj(xi^A) + i (xi^0 conj(xi^{m+1}) - xi^{m+1} conj(xi^0))."""
    nv = m + 2
    q = HermitianPoly.zero(nv, 1, 1)
    for A in range(1, m + 1):
        q = q + multiply(variable(nv, A), variable(nv, A, conjugate=True))
    cross = multiply(variable(nv, 0), variable(nv, m + 1, conjugate=True)) - multiply(
        variable(nv, m + 1), variable(nv, 0, conjugate=True)
    )
    return q + cross.scale(I)


def whitney_pullback_check(n: int, mapping: PolyMap | None = None):
    """Check Q_{2n}(Gamma(xi)) == 2 (xi^0 conj(xi^0) + xi^{n+1} conj(xi^{n+1})) Q_n(xi).

    Returns ``(holds, factor)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    F = mapping if mapping is not None else _whitney_hat(n)
    nv = n + 2
    if F.d + 1 != nv or len(F.components) != 2 * n + 2:
        raise ValueError("mapping must go from C^{n+2} to C^{2n+2}")
    mu = F.components
    pull = HermitianPoly.zero(nv, 2, 2)
    for A in range(1, 2 * n + 1):
        pull = pull + multiply(mu[A], conj_swap(mu[A]))
    cross = multiply(mu[0], conj_swap(mu[2 * n + 1])) - multiply(mu[2 * n + 1], conj_swap(mu[0]))
    pull = pull + cross.scale(I)
    factor = (
        multiply(variable(nv, 0), variable(nv, 0, conjugate=True))
        + multiply(variable(nv, n + 1), variable(nv, n + 1, conjugate=True))
    ).scale(2)
    return pull == multiply(factor, hermitian_quadric(n)), factor
