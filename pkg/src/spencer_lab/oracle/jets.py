"""Brute-force count of formal solutions by truncated polynomial ansatz.

Only the exact linear algebra layer is used here; nothing from the
prolongation machinery. The connection argument is read through its plain
data fields (n, F_rank, E_rank, l, C).

For a degree N the ansatz is a polynomial section s of total degree <= N+1.
The equations l(∂_i s) + C_i s = 0 are imposed on all coefficients of degree
<= N (the highest-degree coefficients only enter through derivatives). The
returned number is the dimension of the space of degree-<= N truncations of
such sections, i.e. of N-jets that extend one order further.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from ..exactla import Matrix, rank


def _monomials(n: int, max_deg: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(prefix, left, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, slots - 1)

    rec([], max_deg, n)
    out.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
    return out


def _system(c, N: int):
    n, a, b = c.n, c.F_rank, c.E_rank
    monos = _monomials(n, N + 1)
    pos = {m: i for i, m in enumerate(monos)}
    ncols = len(monos) * a
    rows = []
    for i in range(n):
        l_rows, c_rows = c.l.rows, c.C[i].rows
        for beta in monos:
            if sum(beta) > N:
                continue
            up = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
            mult = beta[i] + 1
            for e in range(b):
                row = [Fraction(0)] * ncols
                for f in range(a):
                    if l_rows[e][f]:
                        row[pos[up] * a + f] += mult * l_rows[e][f]
                    if c_rows[e][f]:
                        row[pos[beta] * a + f] += c_rows[e][f]
                if any(row):
                    rows.append(tuple(row))
    high = [j for m in monos if sum(m) == N + 1 for j in range(pos[m] * a, pos[m] * a + a)]
    return Matrix(len(rows), ncols, tuple(rows)), high


def truncated_solution_dim(c, N: int) -> int:
    """Dimension of N-jets of polynomial sections solving the system to order N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    M, high = _system(c, N)
    total = M.ncols - rank(M)
    # solutions whose degree <= N part vanishes
    top = M.select_columns(high)
    only_top = len(high) - rank(top)
    return total - only_top


def unknown_count(c, N: int) -> int:
    return c.F_rank * comb(c.n + N + 1, c.n)
