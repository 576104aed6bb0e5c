"""Vector-valued polynomials in n variables with exact coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exactla import Matrix, to_rational


@dataclass(frozen=True)
class VectorPolynomial:
    """Σ_α c_α x^α with c_α ∈ Q^dim; zero coefficients are never stored."""

    n: int
    dim: int
    terms: tuple  # sorted ((α, coeff-tuple), ...)

    @classmethod
    def from_dict(cls, n: int, dim: int, terms: Mapping) -> "VectorPolynomial":
        clean = {}
        for a, v in terms.items():
            a = tuple(a)
            if len(a) != n or len(v) != dim:
                raise ValueError("exponent or coefficient has the wrong length")
            v = tuple(to_rational(x) for x in v)
            if any(v):
                clean[a] = v
        return cls(n, dim, tuple(sorted(clean.items())))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def degree(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=-1)

    def transform(self, m: Matrix) -> "VectorPolynomial":
        return VectorPolynomial.from_dict(self.n, m.nrows, {a: m.apply(v) for a, v in self.terms})

    def __add__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        if (self.n, self.dim) != (other.n, other.dim):
            raise ValueError("incompatible polynomials")
        out = dict(self.terms)
        for a, v in other.terms:
            if a in out:
                out[a] = tuple(x + y for x, y in zip(out[a], v))
            else:
                out[a] = v
        return VectorPolynomial.from_dict(self.n, self.dim, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorPolynomial) and (self.n, self.dim, self.terms) == (
            other.n, other.dim, other.terms)

    def __hash__(self):
        return hash((self.n, self.dim, self.terms))

    def evaluate(self, x) -> tuple:
        x = [to_rational(t) for t in x]
        out = [Fraction(0)] * self.dim
        for a, v in self.terms:
            mono = Fraction(1)
            for xi, ai in zip(x, a):
                mono *= xi ** ai
            for r in range(self.dim):
                out[r] += mono * v[r]
        return tuple(out)


def derivative(p: VectorPolynomial, i: int) -> VectorPolynomial:
    """∂/∂x_i (0-based index)."""
    out = {}
    for a, v in p.terms:
        if a[i]:
            b = a[:i] + (a[i] - 1,) + a[i + 1:]
            out[b] = tuple(a[i] * x for x in v)
    return VectorPolynomial.from_dict(p.n, p.dim, out)


def constant(n: int, v) -> VectorPolynomial:
    return VectorPolynomial.from_dict(n, len(v), {(0,) * n: v})


def times(scalar: Mapping, p: VectorPolynomial) -> VectorPolynomial:
    """Product of a scalar polynomial {α: c} with a vector polynomial."""
    out: dict = {}
    for a, c in scalar.items():
        c = to_rational(c)
        if not c:
            continue
        for b, v in p.terms:
            s = tuple(x + y for x, y in zip(a, b))
            w = tuple(c * x for x in v)
            out[s] = tuple(x + y for x, y in zip(out[s], w)) if s in out else w
    return VectorPolynomial.from_dict(p.n, p.dim, out)
