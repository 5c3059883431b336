"""Real symmetric forms, curvature-like tensors and Weyl rigidity.

Curvature-like tensors are stored on index pairs (i<j), (k<l); the other
components follow from R_ijkl = -R_jikl = -R_ijlk.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from ..exactnum import ExactMatrix, SparseColumns, SparseEchelon, kernel_basis, parse_rational, format_rational
from .verdict import LinearSystem, RigidityVerdict, Status

__all__ = [
    "RealSymForm",
    "CurvatureElement",
    "curvature_space_basis",
    "ricci_and_weyl",
    "ricci_contract",
    "kulkarni_nomizu",
    "gauss_gamma",
    "weyl_rigid",
]

_F0 = Fraction(0)


@dataclass(frozen=True)
class RealSymForm:
    """H = h^a_ij x^i x^j (x) w_a with r real symmetric n x n matrices."""

    n: int
    components: tuple

    def __post_init__(self):
        comps = tuple(tuple(tuple(Fraction(x) for x in row) for row in h) for h in self.components)
        object.__setattr__(self, "components", comps)
        for a, h in enumerate(comps):
            if len(h) != self.n or any(len(row) != self.n for row in h):
                raise ValueError(f"component {a} is not {self.n} x {self.n}")
            for i in range(self.n):
                for j in range(i):
                    if h[i][j] != h[j][i]:
                        raise ValueError(f"component {a} is not symmetric at ({i},{j})")

    @property
    def r(self) -> int:
        return len(self.components)

    @classmethod
    def diagonal(cls, values) -> "RealSymForm":
        n = len(values)
        return cls(n, ([[values[i] if i == j else 0 for j in range(n)] for i in range(n)],))

    def is_zero(self) -> bool:
        return all(not x for h in self.components for row in h for x in row)

    def trace_free(self) -> "RealSymForm":
        out = []
        for h in self.components:
            t = sum((h[i][i] for i in range(self.n)), _F0) / self.n
            out.append([[h[i][j] - (t if i == j else 0) for j in range(self.n)] for i in range(self.n)])
        return RealSymForm(self.n, tuple(out))

    def __add__(self, other: "RealSymForm") -> "RealSymForm":
        if (self.n, self.r) != (other.n, other.r):
            raise ValueError("shape mismatch")
        return RealSymForm(
            self.n,
            tuple(
                [[a[i][j] + b[i][j] for j in range(self.n)] for i in range(self.n)]
                for a, b in zip(self.components, other.components)
            ),
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "components": [[[format_rational(x) for x in row] for row in h] for h in self.components],
        }

    @classmethod
    def from_json(cls, data) -> "RealSymForm":
        comps = [[[parse_rational(x) for x in row] for row in h] for h in data["components"]]
        return cls(int(data["n"]), tuple(comps))


def _pairs(n: int) -> list:
    return list(combinations(range(n), 2))


class CurvatureElement:
    """A tensor with the algebraic symmetries of a Riemann tensor."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: dict | None = None):
        self.n = n
        clean = {}
        for (i, j, k, l), x in (entries or {}).items():
            if not (i < j and k < l):
                raise ValueError("entries must be keyed by i<j, k<l")
            x = Fraction(x)
            if x:
                clean[(i, j, k, l)] = x
        self.entries = clean

    def __getitem__(self, idx) -> Fraction:
        i, j, k, l = idx
        if i == j or k == l:
            return _F0
        s = 1
        if i > j:
            i, j, s = j, i, -s
        if k > l:
            k, l, s = l, k, -s
        x = self.entries.get((i, j, k, l), _F0)
        return x if s > 0 else -x

    def __eq__(self, other):
        if not isinstance(other, CurvatureElement):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, frozenset(self.entries.items())))

    def __repr__(self):
        return f"CurvatureElement(n={self.n}, {len(self.entries)} nonzero)"

    def __sub__(self, other: "CurvatureElement") -> "CurvatureElement":
        keys = set(self.entries) | set(other.entries)
        return CurvatureElement(self.n, {t: self.entries.get(t, _F0) - other.entries.get(t, _F0) for t in keys})

    def __add__(self, other: "CurvatureElement") -> "CurvatureElement":
        keys = set(self.entries) | set(other.entries)
        return CurvatureElement(self.n, {t: self.entries.get(t, _F0) + other.entries.get(t, _F0) for t in keys})

    def scale(self, c) -> "CurvatureElement":
        return CurvatureElement(self.n, {t: c * x for t, x in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def vector(self) -> dict:
        """Coordinates on unordered pairs of pairs (P <= Q), as a sparse dict."""
        idx = _pair_pair_index(self.n)
        out = {}
        for (P, Q), t in idx.items():
            x = self[P + Q]
            if x:
                out[t] = x
        return out

    def is_curvature_like(self) -> bool:
        n = self.n
        for P in _pairs(n):
            for Q in _pairs(n):
                if self[P + Q] != self[Q + P]:
                    return False
        for i, j, k, l in permutations(range(n), 4):
            if self[i, j, k, l] + self[i, k, l, j] + self[i, l, j, k]:
                return False
        return True


def _pair_pair_index(n: int) -> dict:
    ps = _pairs(n)
    out = {}
    for a, P in enumerate(ps):
        for Q in ps[a:]:
            out[(P, Q)] = len(out)
    return out


def _from_pair_vector(n: int, vec) -> CurvatureElement:
    idx = _pair_pair_index(n)
    items = vec.items() if isinstance(vec, dict) else enumerate(vec)
    val = {t: x for t, x in items if x}
    entries = {}
    for (P, Q), t in idx.items():
        x = val.get(t)
        if x:
            entries[P + Q] = x
            entries[Q + P] = x
    return CurvatureElement(n, entries)


def curvature_space_basis(n: int) -> list:
    """Basis of K(V): pair-symmetric tensors on Lambda^2 obeying the first Bianchi identity."""
    if n < 2:
        raise ValueError("n must be at least 2")
    idx = _pair_pair_index(n)
    rows = []
    for i, j, k, l in combinations(range(n), 4):
        # R_ijkl + R_iklj + R_iljk = 0, written on sorted pairs
        eq: dict = {}
        for (a, b, c, d), s in (((i, j, k, l), 1), ((i, k, j, l), -1), ((i, l, j, k), 1)):
            P, Q = (a, b), (c, d)
            t = idx[(P, Q)] if (P, Q) in idx else idx[(Q, P)]
            eq[t] = eq.get(t, 0) + s
        rows.append([eq.get(t, 0) for t in range(len(idx))])
    if not rows:
        return [_from_pair_vector(n, {t: 1}) for t in range(len(idx))]
    M = ExactMatrix.from_rows(rows)
    return [_from_pair_vector(n, v) for v in kernel_basis(M)]


def ricci_contract(R: CurvatureElement) -> list:
    """ric_jl = sum_i R_ijil."""
    n = R.n
    return [[sum((R[i, j, i, l] for i in range(n)), _F0) for l in range(n)] for j in range(n)]


def kulkarni_nomizu(h, p) -> CurvatureElement:
    """(h o p)_ijkl = h_ik p_jl + h_jl p_ik - h_il p_jk - h_jk p_il."""
    n = len(h)
    entries = {}
    for i, j in _pairs(n):
        for k, l in _pairs(n):
            x = h[i][k] * p[j][l] + h[j][l] * p[i][k] - h[i][l] * p[j][k] - h[j][k] * p[i][l]
            if x:
                entries[(i, j, k, l)] = x
    return CurvatureElement(n, entries)


def ricci_and_weyl(K: CurvatureElement):
    """Split K = weyl + (h o g) with ricci_contract(weyl) = 0.

    h solves (n-2) h + tr(h) g = ric; for n = 2 the Ricci tensor is a
    multiple of g and h = ric / 2.
    """
    if not K.is_curvature_like():
        raise ValueError("input does not have the symmetries of a curvature tensor")
    n = K.n
    ric = ricci_contract(K)
    s = sum((ric[i][i] for i in range(n)), _F0)
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if n == 2:
        h = [[x / 2 for x in row] for row in ric]
    else:
        c = s / (2 * (n - 1))
        h = [[(ric[i][j] - c * eye[i][j]) / (n - 2) for j in range(n)] for i in range(n)]
    weyl = K - kulkarni_nomizu(h, eye)
    return ric, weyl


def gauss_gamma(H: RealSymForm, P: RealSymForm) -> CurvatureElement:
    """Linearized Gauss map: sum_a h^a o p^a (Kulkarni-Nomizu)."""
    if (H.n, H.r) != (P.n, P.r):
        raise ValueError("gauss_gamma needs H and P with the same (n, r)")
    out = CurvatureElement(H.n)
    for h, p in zip(H.components, P.components):
        out = out + kulkarni_nomizu(h, p)
    return out


def _sym_basis(n: int, r: int) -> list:
    """Real basis of S^2 V* (x) W as (a, i, j) with i <= j."""
    return [(a, i, j) for a in range(r) for i in range(n) for j in range(i, n)]


def _basis_form(n: int, r: int, a: int, i: int, j: int) -> RealSymForm:
    comps = []
    for b in range(r):
        m = [[0] * n for _ in range(n)]
        if b == a:
            m[i][j] = 1
            m[j][i] = 1
        comps.append(m)
    return RealSymForm(n, tuple(comps))


def _form_vector(P: RealSymForm) -> dict:
    out = {}
    for t, (a, i, j) in enumerate(_sym_basis(P.n, P.r)):
        x = P.components[a][i][j]
        if x:
            out[t] = x
    return out


def _vector_form(n: int, r: int, vec) -> RealSymForm:
    comps = [[[_F0] * n for _ in range(n)] for _ in range(r)]
    items = vec.items() if isinstance(vec, dict) else enumerate(vec)
    basis = _sym_basis(n, r)
    for t, x in items:
        if x:
            a, i, j = basis[t]
            comps[a][i][j] = x
            comps[a][j][i] = x
    return RealSymForm(n, tuple(comps))


def weyl_rigid(H: RealSymForm) -> RigidityVerdict:
    """Solve gamma(H, P)^Weyl = 0 over real P and compare with the trivial solutions.

    Trivial solutions are the skew mixings P^a = v_ab H^b (v = -v^T) and the
    pure-trace forms P^a = c_a g, whose gamma is pure Ricci.
    """
    n, r = H.n, H.r
    if H.is_zero():
        return RigidityVerdict(Status.DEGENERATE, None, (), ())
    nrows = len(_pair_pair_index(n))
    cols = []
    for a, i, j in _sym_basis(n, r):
        _, w = ricci_and_weyl(gauss_gamma(H, _basis_form(n, r, a, i, j)))
        cols.append(w.vector())
    M = SparseColumns(nrows, cols)
    sol = kernel_basis(M, sparse=True)

    trivial = []
    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    for a in range(r):
        comps = [eye if b == a else [[0] * n for _ in range(n)] for b in range(r)]
        trivial.append(_form_vector(RealSymForm(n, tuple(comps))))
    for a in range(r):
        for b in range(a + 1, r):
            comps = [[[0] * n for _ in range(n)] for _ in range(r)]
            comps[a] = H.components[b]
            comps[b] = [[-x for x in row] for row in H.components[a]]
            trivial.append(_form_vector(RealSymForm(n, tuple(comps))))
    ech = SparseEchelon()
    for v in trivial:
        ech.insert(v)
    trivial_basis = list(ech.pivots.values())

    systems = {"weyl_gamma": LinearSystem(nrows, len(cols), len(cols) - len(sol), M)}
    sol_forms = tuple(_vector_form(n, r, v) for v in sol)
    triv_forms = tuple(_vector_form(n, r, v) for v in trivial_basis)
    if len(sol) == len(trivial_basis):
        return RigidityVerdict(Status.RIGID, None, sol_forms, triv_forms, systems)
    witness = next(v for v in sol if ech.reduce(v))
    return RigidityVerdict(Status.NOT_RIGID, _vector_form(n, r, witness), sol_forms, triv_forms, systems)
