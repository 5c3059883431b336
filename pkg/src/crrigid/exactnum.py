"""Exact arithmetic over Q and Q[i], and the linear algebra built on it.

Rationals are plain :class:`fractions.Fraction` values.  Gaussian rationals
are :class:`GaussianRational`.  Small matrices use the dense
:class:`ExactMatrix`; the large, very sparse systems produced by the
rigidity checks use :class:`SparseColumns`.  Every solver accepts either.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import heapq
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

__all__ = [
    "GaussianRational",
    "I",
    "as_exact",
    "parse_rational",
    "format_rational",
    "ExactMatrix",
    "SparseColumns",
    "SparseEchelon",
    "rref",
    "rank",
    "kernel_basis",
    "membership",
    "constrained_preimage",
    "reduce_modulo",
    "canonical_basis",
    "same_span",
    "realify",
    "realify_vector",
    "float_rank_oracle",
]

Number = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    """A complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        z = object.__new__(cls)
        object.__setattr__(z, "re", re)
        object.__setattr__(z, "im", im)
        return z

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self.re * other, self.im * other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def inverse(self) -> "GaussianRational":
        n = self.abs2()
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational._raw(self.re / n, -self.im / n)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, data) -> "GaussianRational":
        if isinstance(data, dict):
            return cls(parse_rational(data.get("re", "0")), parse_rational(data.get("im", "0")))
        return cls(parse_rational(data))


I = GaussianRational(0, 1)


def as_exact(x) -> Fraction | GaussianRational:
    """Coerce ints/strings/Fractions/GaussianRationals to an exact scalar."""
    if isinstance(x, (GaussianRational, Fraction)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if not isinstance(s, str):
        raise TypeError(f"rational must be a 'p/q' string, got {type(s).__name__}")
    return Fraction(s.strip())


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _conj(x):
    return x.conjugate() if isinstance(x, GaussianRational) else x


# ---------------------------------------------------------------------------
# dense matrices


@dataclass(frozen=True)
class ExactMatrix:
    """Dense row-major matrix of exact scalars."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], cols: int | None = None) -> "ExactMatrix":
        data = tuple(tuple(as_exact(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        z = Fraction(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def column(self, j: int) -> list:
        return [r[j] for r in self.entries]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else ())

    def conj_transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols,
            self.rows,
            tuple(tuple(_conj(self.entries[i][j]) for i in range(self.rows)) for j in range(self.cols)),
        )

    def is_complex(self) -> bool:
        return any(isinstance(x, GaussianRational) and x.im != 0 for r in self.entries for x in r)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError("dimension mismatch in matrix product")
            ot = other.transpose().entries
            return ExactMatrix(
                self.rows,
                other.cols,
                tuple(tuple(_dot(r, c) for c in ot) for r in self.entries),
            )
        v = list(other)
        if len(v) != self.cols:
            raise ValueError("dimension mismatch in matrix-vector product")
        return [_dot(r, v) for r in self.entries]

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return ExactMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, tuple(tuple(c * x for x in r) for r in self.entries))

    def is_zero(self) -> bool:
        return all(not x for r in self.entries for x in r)

    def to_sparse(self) -> "SparseColumns":
        cols = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self.entries):
            for j, x in enumerate(r):
                if x:
                    cols[j][i] = x
        return SparseColumns(self.rows, cols)

    def to_json(self) -> list:
        return [[_scalar_json(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, data) -> "ExactMatrix":
        if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
            raise ValueError("matrix must be a non-empty list of rows")
        width = len(data[0])
        rows = []
        for i, r in enumerate(data):
            if len(r) != width:
                raise ValueError(f"[{i}]: row has {len(r)} entries, expected {width}")
            try:
                rows.append([GaussianRational.from_json(x) if isinstance(x, dict) else parse_rational(x) for x in r])
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise ValueError(f"[{i}]: {exc}") from exc
        return cls.from_rows(rows, width)


def _dot(a, b):
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s = s + x * y
    return s


def _scalar_json(x):
    if isinstance(x, GaussianRational):
        return x.to_json()
    return format_rational(x)


# ---------------------------------------------------------------------------
# sparse column systems


@dataclass
class SparseColumns:
    """A matrix given column by column as ``{row: value}`` dicts.

    Zero entries must not be stored.
    """

    nrows: int
    columns: list

    @property
    def ncols(self) -> int:
        return len(self.columns)

    def to_dense(self) -> ExactMatrix:
        rows = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                rows[i][j] = x
        return ExactMatrix(self.nrows, self.ncols, tuple(tuple(r) for r in rows))

    def apply(self, x: Sequence) -> dict:
        """Return ``M @ x`` as a sparse dict."""
        if len(x) != self.ncols:
            raise ValueError("dimension mismatch")
        out: dict = {}
        for c, col in zip(x, self.columns):
            if c:
                _axpy(out, c, col)
        return out

    def support_rows(self) -> list:
        rows = set()
        for col in self.columns:
            rows.update(col)
        return sorted(rows)


def _axpy(acc: dict, c, v: dict) -> None:
    """acc += c * v, dropping exact zeros."""
    for k, x in v.items():
        y = acc.get(k)
        if y is None:
            acc[k] = c * x
        else:
            y = y + c * x
            if y:
                acc[k] = y
            else:
                del acc[k]


class SparseEchelon:
    """Incrementally built echelon basis of a subspace of F^N.

    Each stored vector has a distinct pivot (its smallest nonzero index) with
    pivot entry 1.  ``reduce`` maps v to the unique vector in v + span that
    vanishes at every pivot, so the reduction is linear in v.  Optionally
    tracks, for every stored vector, its expression in terms of the inserted
    vectors.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict = {}
        self.combos: dict = {}

    def __len__(self):
        return len(self.pivots)

    def reduce(self, v: dict, combo: dict | None = None, full: bool = True) -> dict:
        """Eliminate pivot entries of v in increasing index order.

        With ``full=False`` stop at the first nonzero non-pivot entry (head
        reduction), which is all that insertion needs.
        """
        v = dict(v)
        heap = list(v) if not full else [k for k in v if k in self.pivots]
        heapq.heapify(heap)
        while heap:
            p = heapq.heappop(heap)
            c = v.get(p)
            if not c:
                continue
            basis = self.pivots.get(p)
            if basis is None:
                if full:
                    continue
                break
            for k, x in basis.items():
                y = v.get(k)
                if y is None:
                    v[k] = -c * x
                    if not full or k in self.pivots:
                        heapq.heappush(heap, k)
                else:
                    y = y - c * x
                    if y:
                        v[k] = y
                    else:
                        del v[k]
            if combo is not None:
                _axpy(combo, -c, self.combos[p])
        return v

    def insert(self, v: dict, combo: dict | None = None) -> int | None:
        """Reduce and insert v.  Returns the new pivot, or None if v was dependent."""
        r = self.reduce(v, combo, full=False)
        if not r:
            return None
        p = min(r)
        inv = 1 / r[p]
        if inv != 1:
            r = {k: x * inv for k, x in r.items()}
            if combo is not None:
                combo = {k: x * inv for k, x in combo.items()}
        self.pivots[p] = r
        if self.track:
            self.combos[p] = combo if combo is not None else {}
        return p


def _as_columns(M) -> SparseColumns:
    if isinstance(M, SparseColumns):
        return M
    if isinstance(M, ExactMatrix):
        return M.to_sparse()
    raise TypeError(f"expected ExactMatrix or SparseColumns, got {type(M).__name__}")


def _as_sparse_vector(v) -> dict:
    if isinstance(v, dict):
        return {k: x for k, x in v.items() if x}
    return {i: as_exact(x) for i, x in enumerate(v) if x}


def _densify(v: dict, n: int) -> list:
    out = [Fraction(0)] * n
    for k, x in v.items():
        out[k] = x
    return out


# ---------------------------------------------------------------------------
# solvers


def rref(M: ExactMatrix):
    """Reduced row echelon form.

    Pivot rule: for each column left to right, the first row (top to bottom)
    at or below the current pivot row with a nonzero entry.
    Returns ``(R, pivot_columns, rank)``.
    """
    A = [list(r) for r in M.entries]
    pivots = []
    prow = 0
    for j in range(M.cols):
        if prow == M.rows:
            break
        sel = next((i for i in range(prow, M.rows) if A[i][j]), None)
        if sel is None:
            continue
        A[prow], A[sel] = A[sel], A[prow]
        inv = 1 / A[prow][j]
        A[prow] = [x * inv if x else x for x in A[prow]]
        pr = A[prow]
        for i in range(M.rows):
            if i != prow and A[i][j]:
                f = A[i][j]
                A[i] = [a - f * b if b else a for a, b in zip(A[i], pr)]
        pivots.append(j)
        prow += 1
    R = ExactMatrix(M.rows, M.cols, tuple(tuple(r) for r in A))
    return R, tuple(pivots), len(pivots)


def rank(M) -> int:
    if isinstance(M, ExactMatrix) and M.rows * M.cols <= 400:
        return rref(M)[2]
    cols = _as_columns(M)
    ech = SparseEchelon()
    for c in cols.columns:
        ech.insert(c)
    return len(ech)


def kernel_basis(M, sparse: bool = False, known: Sequence | None = None) -> list:
    """Exact basis of the null space.

    Dense input: one vector per free column of the RREF (canonical).
    Sparse input: row elimination, one vector per free column; ``known``
    kernel vectors allow a certified early exit (see ``_sparse_kernel``).
    """
    if isinstance(M, ExactMatrix):
        R, pivots, _ = rref(M)
        pset = set(pivots)
        basis = []
        for f in range(M.cols):
            if f in pset:
                continue
            v = [Fraction(0)] * M.cols
            v[f] = Fraction(1)
            for row, p in enumerate(pivots):
                v[p] = -R.entries[row][f]
            basis.append(v)
        return basis
    cols = _as_columns(M)
    kern = _sparse_kernel(cols.columns, known)
    if sparse:
        return kern
    return [_densify(k, cols.ncols) for k in kern]


def _sparse_kernel(columns: Sequence[dict], known: Sequence[dict] | None = None) -> list:
    """Kernel of the matrix with the given sparse columns, by row elimination.

    Rows are short (one entry per column at most) while columns can be very
    long, so eliminating rows keeps fill-in bounded by the column count.

    ``known`` may list vectors already known to lie in the kernel.  They are
    checked, and as soon as the row rank reaches ``ncols - rank(known)`` the
    kernel is certified to be their span and elimination stops early.
    """
    ncols = len(columns)
    rows: dict = {}
    for j, col in enumerate(columns):
        for i, x in col.items():
            rows.setdefault(i, {})[j] = x
    target = None
    if known:
        known = [_as_sparse_vector(k) for k in known]
        if all(not SparseColumns(0, list(columns)).apply(_densify(k, ncols)) for k in known):
            kech = SparseEchelon()
            for k in known:
                kech.insert(k)
            target = ncols - len(kech)
    ech = SparseEchelon()
    if target is not None and target == 0:
        return [dict(k) for k in known]
    for i in sorted(rows):
        ech.insert(rows[i])
        if target is not None and len(ech) == target:
            return [dict(k) for k in known]
    return _echelon_nullspace(ech, ncols)


def _echelon_nullspace(ech: SparseEchelon, ncols: int) -> list:
    """One kernel vector per free column, by back substitution over the pivots."""
    pivots = sorted(ech.pivots, reverse=True)
    kernel = []
    for f in range(ncols):
        if f in ech.pivots:
            continue
        x = {f: Fraction(1)}
        for p in pivots:
            if p > f:
                continue
            s = 0
            for k, a in ech.pivots[p].items():
                if k != p:
                    y = x.get(k)
                    if y:
                        s = s + a * y
            if s:
                x[p] = -s
        kernel.append(x)
    return kernel


def membership(v, S: Sequence):
    """Coefficients c with ``sum c_i S_i == v``, or None when v is not in span(S)."""
    vecs = [_as_sparse_vector(s) for s in S]
    n = len(v)
    if any(len(s) != n for s in S):
        raise ValueError("dimension mismatch between v and spanning vectors")
    target = _as_sparse_vector(v)
    ech = SparseEchelon(track=True)
    for j, s in enumerate(vecs):
        ech.insert(s, {j: Fraction(1)})
    combo: dict = {}
    r = ech.reduce(target, combo)
    if r:
        return None
    # reduce() subtracted the combination; negate to get v = sum c_j S_j
    return [-combo.get(j, Fraction(0)) for j in range(len(vecs))]


def constrained_preimage(M, S: Sequence, sparse: bool = False, known: Sequence | None = None) -> list:
    """Basis of ``{x : M x in span(S)}``.

    Equivalent to solving ``[M | -S] (x, c) = 0`` and projecting onto x: the
    span of S is put in echelon form, M's columns are reduced modulo it, and
    the kernel of the reduced columns is returned.  The kernel of M is always
    contained in the result.
    """
    cols = _as_columns(M)
    kern = _sparse_kernel(reduce_modulo(cols, S), known)
    if sparse:
        return kern
    return [_densify(k, cols.ncols) for k in kern]


def reduce_modulo(M, S: Sequence) -> list:
    """Columns of M reduced modulo span(S); the map is linear with kernel span(S)."""
    cols = _as_columns(M)
    if isinstance(S, SparseColumns):
        if S.nrows != cols.nrows:
            raise ValueError("dimension mismatch between M and S")
        S = S.columns
    ech = SparseEchelon()
    for s in S:
        if not isinstance(s, dict) and len(s) != cols.nrows:
            raise ValueError("dimension mismatch between M and S")
        s = _as_sparse_vector(s)
        if s and max(s) >= cols.nrows:
            raise ValueError("spanning vector longer than the row dimension of M")
        ech.insert(s)
    if not len(ech):
        return [dict(c) for c in cols.columns]
    return [ech.reduce(c) for c in cols.columns]


def canonical_basis(vectors: Sequence, n: int | None = None) -> list:
    """Nonzero rows of the RREF of the matrix whose rows are ``vectors``."""
    vecs = [list(v) if not isinstance(v, dict) else _densify(v, n) for v in vectors]
    if not vecs:
        return []
    R, _, r = rref(ExactMatrix.from_rows(vecs))
    return [list(row) for row in R.entries[:r]]


def same_span(A: Sequence, B: Sequence) -> bool:
    if not A or not B:
        return all(not any(v) for v in A) and all(not any(v) for v in B)
    return canonical_basis(A) == canonical_basis(B)


# ---------------------------------------------------------------------------
# realification


def realify(M: ExactMatrix) -> ExactMatrix:
    """Replace each complex entry a+bi with the block [[a, -b], [b, a]]."""
    out = []
    for r in M.entries:
        top, bot = [], []
        for x in r:
            if isinstance(x, GaussianRational):
                a, b = x.re, x.im
            else:
                a, b = Fraction(x), Fraction(0)
            top += [a, -b]
            bot += [b, a]
        out += [top, bot]
    return ExactMatrix(2 * M.rows, 2 * M.cols, tuple(tuple(r) for r in out))


def realify_vector(v: dict) -> dict:
    """Complex sparse vector -> real sparse vector, index i -> (2i: re, 2i+1: im)."""
    out = {}
    for k, x in v.items():
        if isinstance(x, GaussianRational):
            if x.re:
                out[2 * k] = x.re
            if x.im:
                out[2 * k + 1] = x.im
        elif x:
            out[2 * k] = Fraction(x)
    return out


# ---------------------------------------------------------------------------
# floating-point cross check


def _real_float(x) -> float:
    return float(x.re) if isinstance(x, GaussianRational) else float(x)


def _to_numpy(M) -> np.ndarray:
    if isinstance(M, ExactMatrix):
        cplx = M.is_complex()
        A = np.zeros((M.rows, M.cols), dtype=complex if cplx else float)
        for i, r in enumerate(M.entries):
            for j, x in enumerate(r):
                if x:
                    A[i, j] = complex(x) if cplx else _real_float(x)
        return A
    cols = _as_columns(M)
    rows = cols.support_rows()
    where = {r: i for i, r in enumerate(rows)}
    cplx = any(isinstance(x, GaussianRational) and x.im for c in cols.columns for x in c.values())
    A = np.zeros((len(rows), cols.ncols), dtype=complex if cplx else float)
    for j, c in enumerate(cols.columns):
        for i, x in c.items():
            A[where[i], j] = complex(x) if cplx else _real_float(x)
    return A


_DENSE_LIMIT = 4_000_000


def _to_scipy(M):
    cols = _as_columns(M)
    rows = cols.support_rows()
    where = {r: i for i, r in enumerate(rows)}
    cplx = any(isinstance(x, GaussianRational) and x.im for c in cols.columns for x in c.values())
    ri, ci, vals = [], [], []
    for j, c in enumerate(cols.columns):
        for i, x in c.items():
            ri.append(where[i])
            ci.append(j)
            vals.append(complex(x) if cplx else _real_float(x))
    return sp.csc_matrix((vals, (ri, ci)), shape=(len(rows), cols.ncols))


def float_rank_oracle(M, tol: float = 1e-9) -> int:
    """Rank from singular values, cutoff ``tol * s_max``.  Test-only cross check.

    Large sparse inputs go through the eigenvalues of the Gram matrix A^H A;
    squaring costs half the digits, so the cutoff there is at least 1e-6.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not isinstance(M, ExactMatrix):
        cols = _as_columns(M)
        nnz_rows = len(cols.support_rows())
        if nnz_rows * cols.ncols > _DENSE_LIMIT:
            A = _to_scipy(cols)
            gram = (A.conj().T @ A).toarray()
            ev = np.linalg.eigvalsh(gram)
            if ev.size == 0 or ev[-1] <= 0:
                return 0
            s = np.sqrt(np.clip(ev, 0, None))
            return int(np.sum(s > max(tol, 1e-6) * s[-1]))
    A = _to_numpy(M)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
