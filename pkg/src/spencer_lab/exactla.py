"""Exact rational linear algebra.

Matrices hold ``fractions.Fraction`` entries. Heavy lifting (row reduction)
is done on integer rows with fraction-free elimination and content removal,
then converted back to rationals in lowest terms.

Subspaces are stored by the reduced row-echelon form of a spanning set, so
two ``Subspace`` values are equal exactly when they span the same space.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rational = Fraction


class DimensionMismatch(ValueError):
    """Operands live in spaces of incompatible dimensions."""


def to_rational(x) -> Fraction:
    """Parse an int, Fraction or a ``"p/q"`` string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rational_str(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# integer row reduction


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in row:
        if x.denominator != 1:
            den = _lcm(den, x.denominator)
    return [int(x * den) for x in row]


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def _echelon(rows: list[list[int]], ncols: int, reduced: bool):
    """In-place fraction-free elimination. Returns (rows, pivots)."""
    rows = [r for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        best = None
        for i in range(r, nrows):
            v = rows[i][c]
            if v:
                # prefer small pivots to limit growth
                a = abs(v)
                if best is None or a < best:
                    piv, best = i, a
                    if a == 1:
                        break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        p = prow[c]
        start = 0 if reduced else r + 1
        for i in range(start, nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if not f:
                continue
            g = gcd(p, f)
            pp, ff = p // g, f // g
            rows[i] = _primitive([pp * x - ff * y for x, y in zip(row, prow)])
        pivots.append(c)
        r += 1
    return rows[:r], pivots


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    """Dense rational matrix, row-major."""

    nrows: int
    ncols: int
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch("entries do not match the declared shape")

    # construction -----------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], ncols: int | None = None) -> "Matrix":
        data = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        return cls(len(data), ncols, data)

    @classmethod
    def from_flat(cls, nrows: int, ncols: int, entries: Sequence) -> "Matrix":
        if len(entries) != nrows * ncols:
            raise DimensionMismatch(
                f"expected {nrows * ncols} entries for a {nrows}x{ncols} matrix, got {len(entries)}"
            )
        vals = [to_rational(x) for x in entries]
        return cls(nrows, ncols, tuple(tuple(vals[i * ncols:(i + 1) * ncols]) for i in range(nrows)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        z = Fraction(0)
        return cls(nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls.from_rows(zip(*cols), len(cols)) if cols else cls.zeros(nrows, 0)

    @classmethod
    def vstack(cls, blocks: Sequence["Matrix"], ncols: int | None = None) -> "Matrix":
        if ncols is None:
            ncols = blocks[0].ncols
        rows: list = []
        for b in blocks:
            if b.ncols != ncols:
                raise DimensionMismatch("vstack: column counts differ")
            rows.extend(b.rows)
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def hstack(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        nrows = blocks[0].nrows
        if any(b.nrows != nrows for b in blocks):
            raise DimensionMismatch("hstack: row counts differ")
        rows = tuple(sum((b.rows[i] for b in blocks), ()) for i in range(nrows))
        return cls(nrows, sum(b.ncols for b in blocks), rows)

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def flat(self) -> list[Fraction]:
        return [x for r in self.rows for x in r]

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    # algebra ----------------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, tuple(zip(*self.rows)) if self.nrows else
                      tuple(() for _ in range(self.ncols)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T.rows
        zero = Fraction(0)
        out = []
        for r in self.rows:
            nz = [(k, x) for k, x in enumerate(r) if x]
            out.append(tuple(sum((x * c[k] for k, x in nz), zero) for c in cols))
        return Matrix(self.nrows, other.ncols, tuple(out))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("cannot add matrices of different shapes")
        return Matrix(self.nrows, self.ncols,
                      tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = to_rational(c)
        return Matrix(self.nrows, self.ncols, tuple(tuple(c * x for x in r) for r in self.rows))

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for matrix with {self.ncols} columns")
        vv = [to_rational(x) for x in v]
        return tuple(sum((a * b for a, b in zip(r, vv) if a), Fraction(0)) for r in self.rows)

    def rank(self) -> int:
        return rank(self)

    def select_columns(self, cols: Sequence[int]) -> "Matrix":
        return Matrix(self.nrows, len(cols), tuple(tuple(r[c] for c in cols) for r in self.rows))


# ---------------------------------------------------------------------------
# core operations


def _to_int_rows(m: Matrix) -> list[list[int]]:
    return [_integer_row(r) for r in m.rows]


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form (zero rows dropped) and the pivot columns."""
    rows, pivots = _echelon(_to_int_rows(m), m.ncols, reduced=True)
    out = []
    for row, c in zip(rows, pivots):
        p = row[c]
        out.append(tuple(Fraction(x, p) for x in row))
    return Matrix(len(out), m.ncols, tuple(out)), pivots


def rank(m: Matrix) -> int:
    rows, _ = _echelon(_to_int_rows(m), m.ncols, reduced=False)
    return len(rows)


def kernel_basis(m: Matrix) -> list[tuple[Fraction, ...]]:
    r, pivots = rref(m)
    n = m.ncols
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, c in zip(r.rows, pivots):
            if row[f]:
                v[c] = -row[f]
        basis.append(tuple(v))
    return basis


def kernel(m: Matrix) -> "Subspace":
    """{v : m v = 0} as a canonical subspace of Q^cols."""
    return Subspace.span(kernel_basis(m), m.ncols)


def image(m: Matrix, s: "Subspace | None" = None) -> "Subspace":
    """m(s), or the column space of m when s is omitted."""
    if s is None:
        return Subspace.span(m.T.rows, m.nrows)
    if s.ambient_dim != m.ncols:
        raise DimensionMismatch("image: subspace does not live in the domain")
    if s.dim == 0:
        return Subspace.zero(m.nrows)
    return Subspace.span((m @ s.basis.T).T.rows, m.nrows)


def intersect(a: "Subspace", b: "Subspace") -> "Subspace":
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {a.ambient_dim} and {b.ambient_dim} differ")
    if a.dim == a.ambient_dim:
        return b
    if b.dim == b.ambient_dim:
        return a
    return kernel(Matrix.vstack([a.annihilator(), b.annihilator()], a.ambient_dim))


def preimage(m: Matrix, s: "Subspace") -> "Subspace":
    """{v : m v in s}."""
    if s.ambient_dim != m.nrows:
        raise DimensionMismatch(f"preimage: target has dim {s.ambient_dim}, matrix has {m.nrows} rows")
    ann = s.annihilator()
    if ann.nrows == 0:
        return Subspace.full(m.ncols)
    return kernel(ann @ m)


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of Q^ambient_dim stored as an RREF basis (one vector per row)."""

    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vecs = [tuple(to_rational(x) for x in v) for v in vectors]
        if any(len(v) != ambient_dim for v in vecs):
            raise DimensionMismatch("spanning vector has the wrong length")
        if not vecs:
            return cls.zero(ambient_dim)
        r, _ = rref(Matrix(len(vecs), ambient_dim, tuple(vecs)))
        return cls(ambient_dim, r)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.zeros(0, ambient_dim))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x) for r in self.basis.rows]

    def vectors(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.basis.rows

    def inclusion(self) -> Matrix:
        """ambient_dim x dim matrix whose columns are the basis vectors."""
        return self.basis.T if self.dim else Matrix.zeros(self.ambient_dim, 0)

    def annihilator(self) -> Matrix:
        """Rows spanning {w : w . v = 0 for all v in self}; self = kernel(annihilator)."""
        if self.dim == 0:
            return Matrix.identity(self.ambient_dim)
        rows = kernel_basis(self.basis)
        return Matrix(len(rows), self.ambient_dim, tuple(rows))

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        return self.coordinates(v) is not None

    def coordinates(self, v: Sequence):
        """Coefficients of v in the RREF basis, or None when v is not in the subspace."""
        v = [to_rational(x) for x in v]
        coeffs = [v[p] for p in self.pivots]
        recon = [Fraction(0)] * self.ambient_dim
        for c, row in zip(coeffs, self.basis.rows):
            if c:
                for j, x in enumerate(row):
                    if x:
                        recon[j] += c * x
        return tuple(coeffs) if recon == v else None

    def issubspace(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        if self.dim == 0:
            return True
        ann = other.annihilator()
        return ann.nrows == 0 or (ann @ self.basis.T).is_zero()

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return Subspace.span(self.basis.rows + other.basis.rows, self.ambient_dim)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"
