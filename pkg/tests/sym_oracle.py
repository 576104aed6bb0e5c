"""Brute-force reference computations built on sympy polynomials.

Nothing here touches spencer_lab: tableaux are vectors of polynomials,
prolongations come from all higher partial derivatives at once, and the
Spencer differential is applied to explicit polynomial forms.
"""
from __future__ import annotations

from itertools import combinations, combinations_with_replacement

import sympy as sp


def variables(n):
    return sp.symbols(f"x1:{n + 1}")


def monomials(xs, k):
    return [sp.Mul(*c) for c in combinations_with_replacement(xs, k)]


def coeff_vector(polys, xs, k):
    """Coefficients of a W-vector of degree-k forms on the monomial basis."""
    mons = monomials(xs, k)
    out = []
    for p in polys:
        P = sp.Poly(sp.expand(p), *xs) if p != 0 else None
        for mono in mons:
            out.append(P.coeff_monomial(mono) if P is not None else 0)
    return out


def poly_basis(xs, m, k):
    return [[mono if w == r else 0 for r in range(m)] for mono in monomials(xs, k) for w in range(m)]


def prolongation_basis(gens, n, m, k, p):
    """Basis of {T ∈ S^{k+p} ⊗ W : every p-th partial of T lies in span(gens)}.

    ``gens`` are W-vectors of homogeneous degree-k sympy polynomials.
    """
    xs = variables(n)
    G = sp.Matrix([coeff_vector(g, xs, k) for g in gens]) if gens else sp.zeros(0, len(monomials(xs, k)) * m)
    ann = G.nullspace() if G.rows else [sp.eye(G.cols)[:, i] for i in range(G.cols)]
    basis = poly_basis(xs, m, k + p)
    cs = sp.symbols(f"c0:{len(basis)}")
    T = [sum(c * b[r] for c, b in zip(cs, basis)) for r in range(m)]
    eqs = []
    for beta in combinations_with_replacement(xs, p):
        D = [sp.diff(t, *beta) if beta else t for t in T]
        v = coeff_vector(D, xs, k)
        for a in ann:
            eqs.append(sum(ai * vi for ai, vi in zip(a, v)))
    if not eqs:
        return basis
    A = sp.Matrix([[sp.diff(e, c) for c in cs] for e in eqs])
    out = []
    for z in A.nullspace():
        out.append([sp.expand(sum(z[i] * basis[i][r] for i in range(len(basis)))) for r in range(m)])
    return out


def _d(form, xs):
    """d on a dict {I: W-vector of polys}, I an increasing tuple."""
    out = {}
    for I, vec in form.items():
        for i in range(len(xs)):
            if i in I:
                continue
            J = tuple(sorted(I + (i,)))
            sgn = (-1) ** sum(1 for t in I if t < i)
            cur = out.setdefault(J, [0] * len(vec))
            for r, p in enumerate(vec):
                cur[r] += sgn * sp.diff(p, xs[i])
    return out


def _flatten(form, xs, j, deg, m):
    out = []
    for I in combinations(range(len(xs)), j):
        out.extend(coeff_vector(form.get(I, [0] * m), xs, deg))
    return out


def cohomology_dims(gens, n, m, k, p_max):
    """{(k+q, j): dim H} at Λ^j ⊗ g^{(q)}, total degree q + j <= p_max."""
    xs = variables(n)
    levels = {q: prolongation_basis(gens, n, m, k, q) for q in range(p_max + 2)}

    def rank_out(q, j):
        if j >= n or not levels[q] or k + q < 1:
            return 0
        cols = []
        for I in combinations(range(n), j):
            for b in levels[q]:
                cols.append(_flatten(_d({I: b}, xs), xs, j + 1, k + q - 1, m))
        return sp.Matrix(cols).T.rank() if cols else 0

    out = {}
    for p in range(p_max + 1):
        for j in range(min(p, n) + 1):
            q = p - j
            dim = len(list(combinations(range(n), j))) * len(levels[q])
            ker = dim - rank_out(q, j)
            im = rank_out(q + 1, j - 1) if j >= 1 else 0
            out[(k + q, j)] = ker - im
    return out
