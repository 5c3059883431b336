"""Bigraded polynomial spaces S^{k,l}(V*) with exact coefficients.

A monomial x^h xbar^a is stored as the single tuple ``h + a`` of length
2n: holomorphic exponents first, antiholomorphic exponents after.  Inside
a fixed bidegree the basis is ordered lexicographically descending on that
tuple, so ``x1^k xbar1^l`` comes first.  Lex order is a monomial order, which
the S_1 machinery relies on (leading monomial of a product is the product of
leading monomials).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .exactnum import (
    ExactMatrix,
    GaussianRational,
    SparseColumns,
    as_exact,
    parse_rational,
    rref,
)

__all__ = [
    "Monomial",
    "HermitianPoly",
    "VectorForm",
    "GramPair",
    "space_dim",
    "monomial_basis",
    "monomial_index",
    "multiply",
    "conj_swap",
    "pairing",
    "s1_generator",
    "s1_subspace",
    "s1_decompose",
    "variable",
    "linear_substitute",
    "is_positive_definite",
]

Monomial = tuple  # length-2n exponent tuple, see module docstring

_ZERO = GaussianRational(0)


def _gq(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    return GaussianRational(as_exact(x))


def space_dim(n: int, k: int, l: int) -> int:
    if n < 1 or k < 0 or l < 0:
        raise ValueError("need n >= 1 and k, l >= 0")
    return comb(n + k - 1, k) * comb(n + l - 1, l)


@lru_cache(maxsize=None)
def _exponents(n: int, k: int) -> tuple:
    """Exponent vectors of degree k in n variables, lex descending."""
    if n == 1:
        return ((k,),)
    out = []
    for e in range(k, -1, -1):
        for rest in _exponents(n - 1, k - e):
            out.append((e,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_basis(n: int, k: int, l: int) -> tuple:
    """Basis monomials of S^{k,l} in the fixed graded-lex order."""
    hol = _exponents(n, k)
    anti = _exponents(n, l)
    return tuple(h + a for h in hol for a in anti)


@lru_cache(maxsize=None)
def monomial_index(n: int, k: int, l: int) -> dict:
    return {m: i for i, m in enumerate(monomial_basis(n, k, l))}


def _bidegree(m: Monomial, n: int) -> tuple:
    return sum(m[:n]), sum(m[n:])


class HermitianPoly:
    """An element of S^{k,l}(V*): exact coefficients on monomials x^h xbar^a."""

    __slots__ = ("n", "k", "l", "terms")

    def __init__(self, n: int, k: int, l: int, terms: Mapping | None = None):
        self.n, self.k, self.l = n, k, l
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != 2 * n:
                raise ValueError(f"monomial {m} does not have 2n={2 * n} exponents")
            if _bidegree(m, n) != (k, l):
                raise ValueError(f"monomial {m} is not of bidegree ({k},{l})")
            c = _gq(c)
            if c:
                clean[m] = clean.get(m, _ZERO) + c
                if not clean[m]:
                    del clean[m]
        self.terms = clean

    @classmethod
    def _trusted(cls, n, k, l, terms):
        p = object.__new__(cls)
        p.n, p.k, p.l, p.terms = n, k, l, terms
        return p

    @classmethod
    def zero(cls, n: int, k: int, l: int) -> "HermitianPoly":
        return cls._trusted(n, k, l, {})

    @classmethod
    def one(cls, n: int) -> "HermitianPoly":
        return cls._trusted(n, 0, 0, {(0,) * (2 * n): GaussianRational(1)})

    @classmethod
    def from_vector(cls, n: int, k: int, l: int, vec) -> "HermitianPoly":
        basis = monomial_basis(n, k, l)
        items = vec.items() if isinstance(vec, dict) else enumerate(vec)
        return cls._trusted(n, k, l, {basis[i]: _gq(c) for i, c in items if c})

    @property
    def bidegree(self) -> tuple:
        return self.k, self.l

    def is_zero(self) -> bool:
        return not self.terms

    def _check_same(self, other: "HermitianPoly"):
        if (self.n, self.k, self.l) != (other.n, other.k, other.l):
            raise ValueError(
                f"shape mismatch: (n,k,l)=({self.n},{self.k},{self.l}) vs ({other.n},{other.k},{other.l})"
            )

    def __add__(self, other: "HermitianPoly") -> "HermitianPoly":
        self._check_same(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m)
            if s is None:
                t[m] = c
            else:
                s = s + c
                if s:
                    t[m] = s
                else:
                    del t[m]
        return HermitianPoly._trusted(self.n, self.k, self.l, t)

    def __neg__(self) -> "HermitianPoly":
        return HermitianPoly._trusted(self.n, self.k, self.l, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "HermitianPoly") -> "HermitianPoly":
        return self + (-other)

    def scale(self, c) -> "HermitianPoly":
        c = _gq(c)
        if not c:
            return HermitianPoly.zero(self.n, self.k, self.l)
        return HermitianPoly._trusted(self.n, self.k, self.l, {m: c * x for m, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, HermitianPoly):
            return multiply(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, HermitianPoly):
            return NotImplemented
        if self.n != other.n:
            return False
        if not self.terms and not other.terms:
            return True
        return (self.k, self.l) == (other.k, other.l) and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.k, self.l, frozenset(self.terms.items())))

    def __repr__(self):
        return f"HermitianPoly(n={self.n}, ({self.k},{self.l}), {self.pretty()})"

    def pretty(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        n = self.n
        names = names or [f"x{i + 1}" for i in range(n)]
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            factors = []
            for i, e in enumerate(m[:n]):
                if e:
                    factors.append(names[i] + (f"^{e}" if e > 1 else ""))
            for i, e in enumerate(m[n:]):
                if e:
                    factors.append("~" + names[i] + (f"^{e}" if e > 1 else ""))
            parts.append(f"{c}" + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)

    def leading(self):
        m = max(self.terms)
        return m, self.terms[m]

    def sparse_vector(self) -> dict:
        """Coefficients keyed by basis index in S^{k,l}."""
        idx = monomial_index(self.n, self.k, self.l)
        return {idx[m]: c for m, c in self.terms.items()}

    def evaluate(self, z: Sequence) -> GaussianRational:
        """Value at the point z, with the antiholomorphic variables set to conj(z)."""
        z = [_gq(v) for v in z]
        zb = [v.conjugate() for v in z]
        n = self.n
        total = GaussianRational(0)
        for m, c in self.terms.items():
            t = c
            for i in range(n):
                if m[i]:
                    t = t * _pow(z[i], m[i])
                if m[n + i]:
                    t = t * _pow(zb[i], m[n + i])
            total = total + t
        return total

    def is_holomorphic(self) -> bool:
        return self.l == 0

    def to_json(self) -> dict:
        n = self.n
        return {
            "n": n,
            "k": self.k,
            "l": self.l,
            "terms": [
                {"hol": list(m[:n]), "antihol": list(m[n:]), **self.terms[m].to_json()}
                for m in sorted(self.terms, reverse=True)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "HermitianPoly":
        n, k, l = int(data["n"]), int(data["k"]), int(data.get("l", 0))
        terms: dict = {}
        for i, t in enumerate(data.get("terms", [])):
            hol = t.get("hol")
            anti = t.get("antihol", [0] * n)
            if hol is None or len(hol) != n or len(anti) != n:
                raise ValueError(f"terms[{i}]: hol/antihol must have length n={n}")
            m = tuple(int(e) for e in hol) + tuple(int(e) for e in anti)
            c = GaussianRational(parse_rational(t.get("re", "0")), parse_rational(t.get("im", "0")))
            terms[m] = terms.get(m, _ZERO) + c
        return cls(n, k, l, terms)


def _pow(z: GaussianRational, e: int) -> GaussianRational:
    out = GaussianRational(1)
    for _ in range(e):
        out = out * z
    return out


def variable(n: int, i: int, conjugate: bool = False) -> HermitianPoly:
    """The coordinate x^i (0-based), or its conjugate."""
    m = [0] * (2 * n)
    m[i + n if conjugate else i] = 1
    return HermitianPoly._trusted(n, 0 if conjugate else 1, 1 if conjugate else 0, {tuple(m): GaussianRational(1)})


def multiply(p: HermitianPoly, q: HermitianPoly) -> HermitianPoly:
    if p.n != q.n:
        raise ValueError("cannot multiply polynomials in different numbers of variables")
    out: dict = {}
    for m1, c1 in p.terms.items():
        for m2, c2 in q.terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            s = out.get(m)
            c = c1 * c2
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
    return HermitianPoly._trusted(p.n, p.k + q.k, p.l + q.l, out)


def conj_swap(p: HermitianPoly) -> HermitianPoly:
    """Complex conjugate: swap x and xbar exponents and conjugate coefficients."""
    n = p.n
    return HermitianPoly._trusted(
        n, p.l, p.k, {m[n:] + m[:n]: c.conjugate() for m, c in p.terms.items()}
    )


def linear_substitute(p: HermitianPoly, A) -> HermitianPoly:
    """p(A y): x^i -> sum_j A[i][j] y^j and xbar^i -> sum_j conj(A[i][j]) ybar^j."""
    n = p.n
    A = A.entries if isinstance(A, ExactMatrix) else A
    hol = [HermitianPoly(n, 1, 0, {_unit(n, j): A[i][j] for j in range(n)}) for i in range(n)]
    anti = [conj_swap(h) for h in hol]
    out = HermitianPoly.zero(n, p.k, p.l)
    for m, c in p.terms.items():
        t = HermitianPoly.one(n).scale(c)
        for i in range(n):
            for _ in range(m[i]):
                t = multiply(t, hol[i])
            for _ in range(m[n + i]):
                t = multiply(t, anti[i])
        out = out + t
    return out


def _unit(n: int, j: int, conjugate: bool = False) -> tuple:
    m = [0] * (2 * n)
    m[j + n if conjugate else j] = 1
    return tuple(m)


@dataclass(frozen=True)
class VectorForm:
    """H = sum_a H^a e_a in S^{k,0}(V*) (x) W, with r = dim W components."""

    n: int
    k: int
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for a, h in enumerate(comps):
            if not isinstance(h, HermitianPoly):
                raise TypeError(f"component {a} is not a HermitianPoly")
            if h.n != self.n:
                raise ValueError(f"component {a} has n={h.n}, expected {self.n}")
            if h.terms and (h.k, h.l) != (self.k, 0):
                raise ValueError(f"component {a} is not holomorphic of degree {self.k}")
        # normalise zero components to the right bidegree
        object.__setattr__(
            self,
            "components",
            tuple(h if h.terms else HermitianPoly.zero(self.n, self.k, 0) for h in comps),
        )

    @property
    def r(self) -> int:
        return len(self.components)

    @classmethod
    def from_polys(cls, polys: Iterable[HermitianPoly]) -> "VectorForm":
        polys = list(polys)
        if not polys:
            raise ValueError("need at least one component")
        n = polys[0].n
        k = next((p.k for p in polys if p.terms), polys[0].k)
        return cls(n, k, tuple(polys))

    @classmethod
    def zero(cls, n: int, k: int, r: int) -> "VectorForm":
        return cls(n, k, tuple(HermitianPoly.zero(n, k, 0) for _ in range(r)))

    def is_zero(self) -> bool:
        return all(h.is_zero() for h in self.components)

    def __add__(self, other: "VectorForm") -> "VectorForm":
        self._check(other)
        return VectorForm(self.n, self.k, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorForm") -> "VectorForm":
        self._check(other)
        return VectorForm(self.n, self.k, tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, c) -> "VectorForm":
        return VectorForm(self.n, self.k, tuple(h.scale(c) for h in self.components))

    def mix(self, u) -> "VectorForm":
        """Return P with P^a = sum_b u[a][b] H^b."""
        u = u.entries if isinstance(u, ExactMatrix) else u
        r = self.r
        out = []
        for a in range(r):
            acc = HermitianPoly.zero(self.n, self.k, 0)
            for b in range(r):
                if u[a][b]:
                    acc = acc + self.components[b].scale(u[a][b])
            out.append(acc)
        return VectorForm(self.n, self.k, tuple(out))

    def _check(self, other: "VectorForm"):
        if (self.n, self.k, self.r) != (other.n, other.k, other.r):
            raise ValueError("VectorForm shape mismatch")

    def coefficient_matrix(self) -> ExactMatrix:
        """r x dim S^{k,0} matrix of monomial coefficients."""
        basis = monomial_basis(self.n, self.k, 0)
        return ExactMatrix.from_rows(
            [[h.terms.get(m, _ZERO) for m in basis] for h in self.components], len(basis)
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "l": 0,
            "components": [{"terms": h.to_json()["terms"]} for h in self.components],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "VectorForm":
        n, k = int(data["n"]), int(data["k"])
        comps = []
        for a, c in enumerate(data["components"]):
            terms = c["terms"] if isinstance(c, Mapping) else c
            try:
                comps.append(HermitianPoly.from_json({"n": n, "k": k, "l": 0, "terms": terms}))
            except ValueError as exc:
                raise ValueError(f"components[{a}]: {exc}") from exc
        if not comps:
            raise ValueError("components: need at least one component")
        return cls(n, k, tuple(comps))


def is_positive_definite(M: ExactMatrix) -> bool:
    """Hermitian check plus exact positivity of all leading principal minors."""
    if M.rows != M.cols:
        return False
    if M.conj_transpose() != M:
        return False
    for s in range(1, M.rows + 1):
        det = _det([row[:s] for row in M.entries[:s]])
        if isinstance(det, GaussianRational):
            if det.im != 0:
                return False
            det = det.re
        if det <= 0:
            return False
    return True


def _det(rows) -> Fraction | GaussianRational:
    A = [list(r) for r in rows]
    n = len(A)
    det = Fraction(1)
    for j in range(n):
        p = next((i for i in range(j, n) if A[i][j]), None)
        if p is None:
            return Fraction(0)
        if p != j:
            A[j], A[p] = A[p], A[j]
            det = -det
        det = det * A[j][j]
        inv = 1 / A[j][j]
        for i in range(j + 1, n):
            if A[i][j]:
                f = A[i][j] * inv
                A[i] = [a - f * b for a, b in zip(A[i], A[j])]
    return det


@dataclass(frozen=True)
class GramPair:
    """Hermitian Gram matrices of the frames on V (g, n x n) and W (G, r x r)."""

    g: ExactMatrix
    G: ExactMatrix

    def __post_init__(self):
        if not is_positive_definite(self.g):
            raise ValueError("g must be Hermitian positive definite")
        if not is_positive_definite(self.G):
            raise ValueError("G must be Hermitian positive definite")

    @classmethod
    def identity(cls, n: int, r: int) -> "GramPair":
        return cls(ExactMatrix.identity(n), ExactMatrix.identity(r))

    @property
    def n(self) -> int:
        return self.g.rows

    @property
    def r(self) -> int:
        return self.G.rows

    def to_json(self) -> dict:
        return {"g": self.g.to_json(), "G": self.G.to_json()}


def pairing(H: VectorForm, P: VectorForm, G: ExactMatrix | None = None) -> HermitianPoly:
    """<H, Pbar> = sum_{a,b} G_ab H^a conj(P^b)  in S^{k,l}."""
    if H.n != P.n or H.r != P.r:
        raise ValueError("pairing needs forms with the same n and r")
    r = H.r
    out = HermitianPoly.zero(H.n, H.k, P.k)
    Pbar = [conj_swap(p) for p in P.components]
    for a in range(r):
        if H.components[a].is_zero():
            continue
        for b in range(r):
            gab = (1 if a == b else 0) if G is None else G.entries[a][b]
            if gab and not Pbar[b].is_zero():
                out = out + multiply(H.components[a], Pbar[b]).scale(gab)
    return out


def s1_generator(n: int, g: ExactMatrix | None = None) -> HermitianPoly:
    """sum_{ij} g_ij x^i xbar^j, which is sum_i x^i xbar^i for g = I."""
    if g is None:
        return HermitianPoly._trusted(
            n, 1, 1, {_unit_pair(n, i, i): GaussianRational(1) for i in range(n)}
        )
    if g.rows != n or g.cols != n:
        raise ValueError("g must be n x n")
    terms = {}
    for i in range(n):
        for j in range(n):
            if g.entries[i][j]:
                terms[_unit_pair(n, i, j)] = _gq(g.entries[i][j])
    return HermitianPoly._trusted(n, 1, 1, terms)


def _unit_pair(n: int, i: int, j: int) -> tuple:
    m = [0] * (2 * n)
    m[i] += 1
    m[n + j] += 1
    return tuple(m)


def s1_subspace(n: int, k: int, l: int, g: ExactMatrix | None = None) -> SparseColumns:
    """Columns gen*m, m running over the basis of S^{k-1,l-1}; empty if k or l is 0."""
    nrows = space_dim(n, k, l)
    if k == 0 or l == 0:
        return SparseColumns(nrows, [])
    gen = s1_generator(n, g)
    cols = []
    for m in monomial_basis(n, k - 1, l - 1):
        mono = HermitianPoly._trusted(n, k - 1, l - 1, {m: GaussianRational(1)})
        cols.append(multiply(gen, mono).sparse_vector())
    return SparseColumns(nrows, cols)


def s1_decompose(Q: HermitianPoly, g: ExactMatrix | None = None) -> HermitianPoly | None:
    """f with gen*f == Q exactly, or None when Q is not a multiple of the generator."""
    n = Q.n
    if Q.k < 1 or Q.l < 1:
        return HermitianPoly.zero(n, max(Q.k - 1, 0), max(Q.l - 1, 0)) if Q.is_zero() else None
    gen = s1_generator(n, g)
    lm, lc = gen.leading()
    inv = lc.inverse()
    rem = dict(Q.terms)
    quot: dict = {}
    while rem:
        m = max(rem)
        q = tuple(a - b for a, b in zip(m, lm))
        if min(q) < 0:
            return None
        c = rem[m] * inv
        quot[q] = c
        for gm, gc in gen.terms.items():
            t = tuple(a + b for a, b in zip(q, gm))
            s = rem.get(t, _ZERO) - c * gc
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    return HermitianPoly._trusted(n, Q.k - 1, Q.l - 1, quot)
