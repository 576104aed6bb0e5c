"""Monomial bases of Λ^j V* ⊗ S^k V* ⊗ W and the formal differential.

Coordinates
-----------
* S^k V* is identified with homogeneous polynomials of degree k in x_1..x_n;
  a multi-index α (|α| = k) labels the monomial x^α. Multi-indices of fixed
  degree are listed in descending lexicographic order, so for n=2, k=2 the
  order is x1², x1·x2, x2².
* Λ^j V* has basis dx_I for increasing index tuples I in lexicographic order.
* A basis element of Λ^j ⊗ S^k ⊗ W is (I, α, w), enumerated with I outermost
  and the W index innermost.

Contraction with e_i is the partial derivative ∂/∂x_i (multiplies the
coefficient of x^α by α_i). The formal differential sends ω ⊗ T to
(-1)^j ω ∧ Σ_i dx_i ⊗ ∂_i T.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .exactla import DimensionMismatch, Matrix


class DegreeError(ValueError):
    """Operation is undefined in the requested degree."""


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All α in N^n with |α| = k, descending lexicographic order."""
    if k < 0:
        return ()
    if n == 0:
        return ((),) if k == 0 else ()
    out = []
    for first in range(k, -1, -1):
        for rest in multi_indices(n - 1, k - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def multi_index_position(n: int, k: int) -> dict:
    return {a: i for i, a in enumerate(multi_indices(n, k))}


@lru_cache(maxsize=None)
def exterior_indices(n: int, j: int) -> tuple[tuple[int, ...], ...]:
    if j < 0 or j > n:
        return ()
    return tuple(combinations(range(n), j))


@lru_cache(maxsize=None)
def exterior_position(n: int, j: int) -> dict:
    return {I: i for i, I in enumerate(exterior_indices(n, j))}


def wedge_sign(I: tuple[int, ...], i: int):
    """Return (sign, J) with dx_I ∧ dx_i = sign · dx_J, or (0, None) if i in I."""
    if i in I:
        return 0, None
    # number of transpositions needed to move dx_i past the larger entries of I
    after = sum(1 for x in I if x > i)
    J = tuple(sorted(I + (i,)))
    return (-1) ** after, J


@dataclass(frozen=True)
class GradedSlot:
    """The space Λ^j V* ⊗ S^k V* ⊗ W with dim V = n, dim W = m."""

    n: int
    m: int
    j: int
    k: int

    @property
    def dim(self) -> int:
        return slot_dim(self)

    def index(self, I: tuple[int, ...], alpha: tuple[int, ...], w: int) -> int:
        ns = len(multi_indices(self.n, self.k))
        return (exterior_position(self.n, self.j)[I] * ns
                + multi_index_position(self.n, self.k)[alpha]) * self.m + w

    def enumerate(self):
        """Yield (I, α, w) in basis order."""
        for I in exterior_indices(self.n, self.j):
            for a in multi_indices(self.n, self.k):
                for w in range(self.m):
                    yield I, a, w


def slot_dim(s: GradedSlot) -> int:
    if s.k < 0 or s.j < 0 or s.j > s.n:
        return 0
    return comb(s.n, s.j) * comb(s.n + s.k - 1, s.k) * s.m


@lru_cache(maxsize=None)
def _contraction(n: int, m: int, k: int, i: int) -> Matrix:
    src = GradedSlot(n, m, 0, k)
    dst = GradedSlot(n, m, 0, k - 1)
    rows = [[Fraction(0)] * src.dim for _ in range(dst.dim)]
    for _, a, w in src.enumerate():
        if a[i]:
            b = a[:i] + (a[i] - 1,) + a[i + 1:]
            rows[dst.index((), b, w)][src.index((), a, w)] = Fraction(a[i])
    return Matrix(dst.dim, src.dim, tuple(tuple(r) for r in rows))


def contraction(s: GradedSlot, direction: int) -> Matrix:
    """Matrix of T ↦ T(e_direction, ·, …, ·) from S^k⊗W to S^{k-1}⊗W.

    ``direction`` is 1-based.
    """
    if s.j != 0:
        raise DegreeError("contraction acts on symmetric slots (j = 0)")
    if s.k < 1:
        raise DegreeError("contraction needs symmetric degree k >= 1")
    if not 1 <= direction <= s.n:
        raise ValueError(f"direction must lie in 1..{s.n}")
    return _contraction(s.n, s.m, s.k, direction - 1)


@lru_cache(maxsize=None)
def _partial(n: int, m: int, j: int, k: int) -> Matrix:
    src = GradedSlot(n, m, j, k)
    dst = GradedSlot(n, m, j + 1, k - 1)
    rows = [[Fraction(0)] * src.dim for _ in range(dst.dim)]
    sgn_j = (-1) ** j
    for I, a, w in src.enumerate():
        col = src.index(I, a, w)
        for i in range(n):
            if not a[i]:
                continue
            s, J = wedge_sign(I, i)
            if not s:
                continue
            b = a[:i] + (a[i] - 1,) + a[i + 1:]
            rows[dst.index(J, b, w)][col] += sgn_j * s * a[i]
    return Matrix(dst.dim, src.dim, tuple(tuple(r) for r in rows))


def partial_matrix(s: GradedSlot) -> Matrix:
    """Matrix of ∂ : Λ^j⊗S^k⊗W → Λ^{j+1}⊗S^{k-1}⊗W in the canonical bases."""
    if s.k < 1:
        raise DegreeError("∂ needs symmetric degree k >= 1")
    if not 0 <= s.j < s.n:
        raise DegreeError("∂ needs 0 <= j < n")
    return _partial(s.n, s.m, s.j, s.k)


def phi_partial_matrix(n: int, phi: Matrix, j: int) -> Matrix:
    """Matrix of ∂_φ : Λ^j V*⊗g → Λ^{j+1} V*⊗W, ω⊗t ↦ (-1)^j ω ∧ φ(t).

    ``phi`` has n·m rows (coordinates of V*⊗W, index i·m + w) and one column
    per basis vector of g.
    """
    if phi.nrows % n if n else phi.nrows:
        raise DimensionMismatch("φ must have n·m rows")
    m = phi.nrows // n if n else 0
    d = phi.ncols
    src_ext = exterior_indices(n, j)
    dst_ext = exterior_position(n, j + 1)
    ncols = len(src_ext) * d
    nrows = len(dst_ext) * m
    rows = [[Fraction(0)] * ncols for _ in range(nrows)]
    sgn_j = (-1) ** j
    for a, I in enumerate(src_ext):
        for t in range(d):
            col = a * d + t
            for i in range(n):
                s, J = wedge_sign(I, i)
                if not s:
                    continue
                base = dst_ext[J] * m
                for w in range(m):
                    v = phi.rows[i * m + w][t]
                    if v:
                        rows[base + w][col] += sgn_j * s * v
    return Matrix(nrows, ncols, tuple(tuple(r) for r in rows))


def exterior_tensor_embedding(n: int, j: int, inclusion: Matrix) -> Matrix:
    """Matrix of Λ^j V* ⊗ U → Λ^j V* ⊗ A induced by ``inclusion`` : U → A."""
    nI = len(exterior_indices(n, j))
    A, d = inclusion.shape
    rows = [[Fraction(0)] * (nI * d) for _ in range(nI * A)]
    for I in range(nI):
        for r in range(A):
            src = inclusion.rows[r]
            dst = rows[I * A + r]
            for t in range(d):
                if src[t]:
                    dst[I * d + t] = src[t]
    return Matrix(nI * A, nI * d, tuple(tuple(r) for r in rows))
