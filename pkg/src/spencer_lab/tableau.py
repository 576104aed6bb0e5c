"""Tableaux, their prolongations and Spencer cohomology.

Cohomology tables are keyed by (symmetric degree, exterior degree). For a
tableau g of order k the entry (k+q, j) is the cohomology at Λ^j ⊗ g^{(q)};
the complex of total degree p ends in the ambient slot Λ^{p+1} ⊗ S^{k-1} ⊗ W,
reported as a *terminal* entry (cokernel of the last map).

For a map φ : g → V*⊗W the prolongations g^{(q)}(φ) sit in S^q V* ⊗ g, so the
entry (q, j) is the cohomology at Λ^j ⊗ g^{(q)}, with q = 0 the space g and
q = -1 the terminal slot Λ^j ⊗ W.

Involutivity (vanishing of all H^{p,q}, p >= k) is not finitely checkable;
every verdict here is a statement about a finite window.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .exactla import DimensionMismatch, Matrix, Subspace, kernel, rank
from .multilinear import (
    GradedSlot,
    contraction,
    exterior_indices,
    exterior_tensor_embedding,
    partial_matrix,
    phi_partial_matrix,
    slot_dim,
)


class InvalidTower(ValueError):
    """A tower level is not contained in the prolongation of the previous one."""


@dataclass(frozen=True)
class Tableau:
    """A subspace of S^k V* ⊗ W with dim V = n, dim W = m."""

    n: int
    m: int
    k: int
    space: Subspace

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("a tableau has order k >= 1")
        expected = slot_dim(GradedSlot(self.n, self.m, 0, self.k))
        if self.space.ambient_dim != expected:
            raise DimensionMismatch(
                f"tableau space lives in dim {self.space.ambient_dim}, S^{self.k}V*⊗W has dim {expected}"
            )

    @classmethod
    def from_generators(cls, n: int, m: int, k: int, generators: Sequence[Sequence]) -> "Tableau":
        return cls(n, m, k, Subspace.span(generators, slot_dim(GradedSlot(n, m, 0, k))))

    @classmethod
    def full(cls, n: int, m: int, k: int) -> "Tableau":
        return cls(n, m, k, Subspace.full(slot_dim(GradedSlot(n, m, 0, k))))

    @classmethod
    def zero(cls, n: int, m: int, k: int) -> "Tableau":
        return cls(n, m, k, Subspace.zero(slot_dim(GradedSlot(n, m, 0, k))))

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class TableauMap:
    """A linear map φ : g → V*⊗W from an abstract space g of dimension d."""

    n: int
    m: int
    phi: Matrix  # (n·m) × d

    def __post_init__(self):
        if self.phi.nrows != self.n * self.m:
            raise DimensionMismatch("φ must have n·m rows")

    @property
    def d(self) -> int:
        return self.phi.ncols

    @classmethod
    def inclusion(cls, t: Tableau) -> "TableauMap":
        if t.k != 1:
            raise ValueError("only order-1 tableaux include into V*⊗W")
        return cls(t.n, t.m, t.space.inclusion())


def prolong(t: Tableau) -> Tableau:
    """First prolongation {T ∈ S^{k+1}⊗W : T(v, ·, …) ∈ g for all v}."""
    slot = GradedSlot(t.n, t.m, 0, t.k + 1)
    ann = t.space.annihilator()
    if ann.nrows == 0:
        return Tableau.full(t.n, t.m, t.k + 1)
    blocks = [ann @ contraction(slot, i) for i in range(1, t.n + 1)]
    return Tableau(t.n, t.m, t.k + 1, kernel(Matrix.vstack(blocks, slot.dim)))


def prolongations(t: Tableau, levels: int) -> list[Tableau]:
    """[g^{(1)}, …, g^{(levels)}]."""
    out = []
    cur = t
    for _ in range(levels):
        cur = prolong(cur)
        out.append(cur)
    return out


def prolong_phi(tm: TableauMap) -> Subspace:
    """g^{(1)}(φ) = {T : V → g | φ(Tu)v = φ(Tv)u}, inside V*⊗g (index i·d + t)."""
    n, m, d = tm.n, tm.m, tm.d
    rows = []
    for u in range(n):
        for v in range(u + 1, n):
            for w in range(m):
                row = [Fraction(0)] * (n * d)
                for t in range(d):
                    # φ(T e_u)(e_v) − φ(T e_v)(e_u)
                    row[u * d + t] += tm.phi.rows[v * m + w][t]
                    row[v * d + t] -= tm.phi.rows[u * m + w][t]
                rows.append(tuple(row))
    if not rows:
        return Subspace.full(n * d)
    return kernel(Matrix(len(rows), n * d, tuple(rows)))


def phi_prolongations(tm: TableauMap, levels: int) -> list[Subspace]:
    """[g, g^{(1)}(φ), …, g^{(levels)}(φ)]; g^{(q)} ⊂ S^q V*⊗g."""
    out = [Subspace.full(tm.d)]
    if levels >= 1:
        first = Tableau(tm.n, tm.d, 1, prolong_phi(tm))
        out.append(first.space)
        out.extend(t.space for t in prolongations(first, levels - 1))
    return out


# ---------------------------------------------------------------------------
# cohomology


@dataclass(frozen=True)
class CohomologyEntry:
    kernel: int
    image: int
    terminal: bool = False

    @property
    def dim(self) -> int:
        return self.kernel - self.image


@dataclass
class CohomologyTable:
    """(symmetric degree, exterior degree) → kernel / incoming image / H."""

    entries: dict = field(default_factory=dict)
    p_max: int = 0

    def __getitem__(self, key) -> CohomologyEntry:
        return self.entries[key]

    def dim(self, sym: int, ext: int) -> int:
        return self.entries[(sym, ext)].dim

    def interior(self) -> dict:
        return {k: e for k, e in self.entries.items() if not e.terminal}

    def interior_vanishes(self) -> bool:
        return all(e.dim == 0 for e in self.interior().values())

    def as_rows(self):
        for (s, j), e in sorted(self.entries.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][1])):
            yield s, j, e


class _Complex:
    """Spaces Λ^j ⊗ g^{(q)} with their inclusions and differentials, cached."""

    def __init__(self, n: int, levels: dict, order: int, m_total: int, last):
        # levels[q] : Subspace of S^{order+q} ⊗ U, q >= 0; U has dim m_total
        self.n = n
        self.levels = levels
        self.order = order
        self.m = m_total
        self.last = last  # callable j -> matrix out of Λ^j ⊗ g^{(0)}
        self._rank = {}

    def space_dim(self, q: int, j: int) -> int:
        return len(exterior_indices(self.n, j)) * self.levels[q].dim

    def out_rank(self, q: int, j: int) -> int:
        """Rank of the differential leaving Λ^j ⊗ g^{(q)}."""
        key = (q, j)
        if key not in self._rank:
            if self.space_dim(q, j) == 0 or j >= self.n:
                r = 0
            else:
                emb = exterior_tensor_embedding(self.n, j, self.levels[q].inclusion())
                if self.order + q >= 1:
                    d = partial_matrix(GradedSlot(self.n, self.m, j, self.order + q))
                else:
                    d = self.last(j)
                r = rank(d @ emb)
            self._rank[key] = r
        return self._rank[key]


def _table(cx: _Complex, n: int, p_max: int, terminal_dim, terminal_sym: int) -> CohomologyTable:
    table = CohomologyTable(p_max=p_max)
    for p in range(p_max + 1):
        for j in range(0, min(p, n) + 1):
            q = p - j
            dim = cx.space_dim(q, j)
            ker = dim - cx.out_rank(q, j)
            im = cx.out_rank(q + 1, j - 1) if j >= 1 else 0
            table.entries[(cx.order + q, j)] = CohomologyEntry(ker, im)
        j = p + 1
        if j <= n:
            table.entries[(terminal_sym, j)] = CohomologyEntry(
                terminal_dim(j), cx.out_rank(0, p), terminal=True)
    return table


def spencer_cohomology(t: Tableau, p_max: int) -> CohomologyTable:
    """H^{k+p-j, j} for 0 <= p <= p_max, plus the terminal cokernels."""
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    levels = {0: t.space}
    cur = t
    for q in range(1, p_max + 2):
        cur = prolong(cur)
        levels[q] = cur.space
    cx = _Complex(t.n, levels, t.k, t.m, last=None)
    amb = lambda j: slot_dim(GradedSlot(t.n, t.m, j, t.k - 1))
    return _table(cx, t.n, p_max, amb, t.k - 1)


def phi_spencer_cohomology(tm: TableauMap, p_max: int) -> CohomologyTable:
    """Cohomology of g^{(q)} → V*⊗g^{(q-1)} → … → Λ^q⊗g → Λ^{q+1}⊗W (∂_φ last)."""
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    subs = phi_prolongations(tm, p_max + 1)
    levels = {q: s for q, s in enumerate(subs)}
    cx = _Complex(tm.n, levels, 0, tm.d, last=lambda j: phi_partial_matrix(tm.n, tm.phi, j))
    amb = lambda j: len(exterior_indices(tm.n, j)) * tm.m
    return _table(cx, tm.n, p_max, amb, -1)


# ---------------------------------------------------------------------------
# acyclicity, involutivity windows, towers


def acyclicity_report(t: Tableau, r: int, p_max: int) -> dict:
    """Verdicts H^{k+p, j} == 0 for 0 <= p <= p_max, 0 <= j <= min(r, n)."""
    r = min(r, t.n)
    table = spencer_cohomology(t, p_max + r)
    verdicts = {}
    for p in range(p_max + 1):
        for j in range(r + 1):
            verdicts[(p, j)] = table.dim(t.k + p, j) == 0
    return {"r": r, "p_max": p_max, "verdicts": verdicts, "acyclic_in_window": all(verdicts.values())}


def is_involutive_window(t: Tableau, p_max: int) -> bool:
    return acyclicity_report(t, t.n, p_max)["acyclic_in_window"]


def stabilization_order(t: Tableau, bound: int, window: int = 2) -> Optional[int]:
    """Smallest p <= bound with g^{(p')} involutive (within ``window``) for p <= p' <= bound.

    Returns None when no such p exists within the bound.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    tabs = [t] + prolongations(t, bound)
    ok = [is_involutive_window(g, window) for g in tabs]
    p0 = None
    for p in range(bound, -1, -1):
        if not ok[p]:
            break
        p0 = p
    return p0


@dataclass(frozen=True)
class Tower:
    """Tableaux g^k, g^{k+1}, … with g^{p+1} ⊆ (g^p)^{(1)}."""

    levels: tuple[Tableau, ...]

    def __post_init__(self):
        if not self.levels:
            raise InvalidTower("a tower needs at least one level")
        for a, b in zip(self.levels, self.levels[1:]):
            if (a.n, a.m) != (b.n, b.m) or b.k != a.k + 1:
                raise InvalidTower("consecutive levels must share (V, W) and raise the order by one")
            if not b.space.issubspace(prolong(a).space):
                raise InvalidTower(f"level of order {b.k} is not inside the prolongation of order {a.k}")

    @cached_property
    def dims(self) -> list[int]:
        return [g.dim for g in self.levels]


def validate_tower(tw: Tower) -> dict:
    """Per-step flags g^{p+1} == (g^p)^{(1)} and the first level from which they all hold."""
    flags = [prolong(a).space == b.space for a, b in zip(tw.levels, tw.levels[1:])]
    first = None
    for i in range(len(flags), -1, -1):
        if i < len(flags) and not flags[i]:
            break
        first = i
    return {
        "orders": [g.k for g in tw.levels],
        "dims": tw.dims,
        "is_prolongation_equal": flags,
        "stable_from_order": tw.levels[first].k if first is not None else None,
    }
