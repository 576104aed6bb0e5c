"""Linear Pfaffian forms on the trivial bundle F = chart × Q^a.

A linear form θ is stored by the same (l, C) data as a relative connection:
at a point (x, e) of F and a tangent vector X ⊕ w,

    θ_{(x,e)}(X ⊕ w) = l(w) + Σ_i X^i C_i e.

Pulling θ back along a section s gives s*θ(X_i) = l(∂_i s) + C_i s = D_i s.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactla import DimensionMismatch, Matrix, Subspace, image, kernel, rank, to_rational
from .polynomial import VectorPolynomial, derivative, times
from .relconn import ConstantRelativeConnection, PreconditionError

VERTICAL_INVOLUTIVITY_NOTE = (
    "the vertical part is the constant distribution 0 ⊕ ker l on a vector bundle; "
    "it is spanned by fiber-constant vertical fields, whose brackets vanish"
)


@dataclass(frozen=True)
class LinearPfaffianForm:
    n: int
    a: int
    b: int
    l: Matrix
    C: tuple[Matrix, ...]

    def __post_init__(self):
        if self.l.shape != (self.b, self.a) or len(self.C) != self.n:
            raise DimensionMismatch("form data has inconsistent shapes")
        if any(c.shape != (self.b, self.a) for c in self.C):
            raise DimensionMismatch("form data has inconsistent shapes")
        if rank(self.l) != self.b:
            raise PreconditionError("l is not surjective, so θ is not pointwise surjective")

    def matrix_at(self, e: Sequence) -> Matrix:
        """b × (n + a) matrix of θ at the fiber point e: [C_1 e … C_n e | l]."""
        if len(e) != self.a:
            raise DimensionMismatch(f"fiber point must have {self.a} entries")
        cols = [c.apply(e) for c in self.C]
        left = Matrix.from_columns(cols, self.b) if cols else Matrix.zeros(self.b, 0)
        return Matrix.hstack([left, self.l])

    def evaluate(self, e: Sequence, X: Sequence, w: Sequence) -> tuple[Fraction, ...]:
        return self.matrix_at(e).apply(list(X) + list(w))


def to_form(c: ConstantRelativeConnection) -> LinearPfaffianForm:
    return LinearPfaffianForm(c.n, c.F_rank, c.E_rank, c.l, c.C)


def to_connection(f: LinearPfaffianForm) -> ConstantRelativeConnection:
    return ConstantRelativeConnection(f.n, f.a, f.b, f.l, f.C)


def pullback(f: LinearPfaffianForm, s: VectorPolynomial) -> list[VectorPolynomial]:
    """s*θ evaluated on the coordinate fields X_1..X_n, as polynomials in x.

    The graph map x ↦ (x, s(x)) has differential X_i ↦ e_i ⊕ ∂_i s; θ is
    evaluated on it pointwise, with the fiber point s(x) substituted.
    """
    if s.n != f.n or s.dim != f.a:
        raise DimensionMismatch("section does not match the form")
    out = []
    for i in range(f.n):
        # horizontal component of the tangent vector: the constant e_i
        X = [{(0,) * f.n: Fraction(int(j == i))} for j in range(f.n)]
        w = derivative(s, i)
        val = w.transform(f.l)
        for j in range(f.n):
            val = val + times(X[j], s.transform(f.C[j]))
        out.append(val)
    return out


def kernel_distribution(f: LinearPfaffianForm, e: Sequence) -> Subspace:
    """H_θ at the fiber point e, as a subspace of V ⊕ F (V coordinates first)."""
    e = [to_rational(x) for x in e]
    return kernel(f.matrix_at(e))


def check_pfaffian(f: LinearPfaffianForm, e: Sequence | None = None) -> dict:
    e = [Fraction(0)] * f.a if e is None else [to_rational(x) for x in e]
    H = kernel_distribution(f, e)
    # projection V ⊕ F → V restricted to H
    proj = Matrix(f.n, f.n + f.a, tuple(
        tuple(Fraction(int(r == t)) for t in range(f.n + f.a)) for r in range(f.n)))
    transversal = image(proj, H).dim == f.n
    vertical = H & Subspace.span(
        [[Fraction(int(t == f.n + r)) for t in range(f.n + f.a)] for r in range(f.a)], f.n + f.a)
    return {
        "transversal": transversal,
        "distribution_rank": H.dim,
        "vertical_part_rank": vertical.dim,
        "vertically_involutive": True,
        "vertical_involutivity_reason": VERTICAL_INVOLUTIVITY_NOTE,
    }
