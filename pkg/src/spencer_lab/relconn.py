"""Relative connections with constant coefficients on a single chart.

A connection is given by (n, F = Q^a, E = Q^b, l, C_1..C_n) and acts on
sections by D_i s = l(∂_i s) + C_i s. All bundle maps of the theory are then
pointwise linear maps with constant matrices, so every rank computed here is
the rank of the corresponding bundle map (constant-rank hypotheses hold
automatically).

Jet coordinates: a point of J^1F is (e, ψ_1, …, ψ_n) with e the value and ψ_i
the derivative in direction i, i.e. a vector of length a(1+n) with e first.

Curvature convention: κ(e, ψ)(X_i, X_j) = C_i ψ_j − C_j ψ_i for i < j. This
is the negative of the value obtained through the Spencer decomposition; the
kernel, and everything built from it, is unaffected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .exactla import DimensionMismatch, Matrix, Subspace, image, kernel, rank
from .polynomial import VectorPolynomial, derivative
from .tableau import (
    Tableau,
    TableauMap,
    phi_prolongations,
    phi_spencer_cohomology,
    prolong_phi,
)


class PreconditionError(ValueError):
    """Input violates a mathematical precondition (exit status 3 in the CLI)."""


class NotSmoothlyDefined(PreconditionError):
    """pr : P_D(F) → F is not surjective."""

    def __init__(self, cokernel_dim: int, level: int = 1):
        self.cokernel_dim = cokernel_dim
        self.level = level
        super().__init__(
            f"classical prolongation at level {level} is not smoothly defined: "
            f"pr has cokernel of dimension {cokernel_dim}"
        )


@dataclass(frozen=True)
class ConstantRelativeConnection:
    n: int
    F_rank: int
    E_rank: int
    l: Matrix
    C: tuple[Matrix, ...]

    def __post_init__(self):
        if self.l.shape != (self.E_rank, self.F_rank):
            raise DimensionMismatch(f"l must be {self.E_rank}x{self.F_rank}, got {self.l.shape}")
        if len(self.C) != self.n:
            raise DimensionMismatch(f"expected {self.n} matrices C_i, got {len(self.C)}")
        for i, c in enumerate(self.C):
            if c.shape != (self.E_rank, self.F_rank):
                raise DimensionMismatch(f"C[{i}] must be {self.E_rank}x{self.F_rank}, got {c.shape}")
        if rank(self.l) != self.E_rank:
            raise PreconditionError("l is not surjective")

    @classmethod
    def build(cls, n: int, l, C: Sequence) -> "ConstantRelativeConnection":
        lm = l if isinstance(l, Matrix) else Matrix.from_rows(l)
        Cs = tuple(c if isinstance(c, Matrix) else Matrix.from_rows(c, lm.ncols) for c in C)
        return cls(n, lm.ncols, lm.nrows, lm, Cs)

    @property
    def jet_dim(self) -> int:
        return self.F_rank * (1 + self.n)

    def apply(self, s: VectorPolynomial) -> list[VectorPolynomial]:
        """D_i s for i = 1..n on a polynomial section s."""
        out = []
        for i in range(self.n):
            ds = derivative(s, i)
            out.append(ds.transform(self.l) + s.transform(self.C[i]))
        return out


# ---------------------------------------------------------------------------
# symbol


def symbol(c: ConstantRelativeConnection) -> Subspace:
    return kernel(c.l)


def symbol_map(c: ConstantRelativeConnection) -> TableauMap:
    """∂_D : g → Hom(V, E), v ↦ (X_i ↦ C_i v), columns indexed by the RREF basis of g."""
    g = symbol(c)
    b = c.E_rank
    cols = []
    for v in g.vectors():
        col = []
        for i in range(c.n):
            col.extend(c.C[i].apply(v))
        cols.append(col)
    phi = Matrix.from_columns(cols, c.n * b) if cols else Matrix.zeros(c.n * b, 0)
    return TableauMap(c.n, b, phi)


def _block_row(c: ConstantRelativeConnection, blocks: dict, nrows: int) -> list[list[Fraction]]:
    """Rows of a matrix on jet coordinates given {block index: matrix}; block 0 is e."""
    a = c.F_rank
    out = [[Fraction(0)] * c.jet_dim for _ in range(nrows)]
    for blk, mat in blocks.items():
        for r in range(nrows):
            src = mat.rows[r]
            dst = out[r]
            off = blk * a
            for t in range(a):
                if src[t]:
                    dst[off + t] += src[t]
    return out


def a_map(c: ConstantRelativeConnection) -> Matrix:
    """(e, ψ) ↦ (l ψ_i + C_i e)_i ∈ V*⊗E; its kernel is J^1_D F."""
    rows = []
    for i in range(c.n):
        rows.extend(_block_row(c, {0: c.C[i], i + 1: c.l}, c.E_rank))
    return Matrix(len(rows), c.jet_dim, tuple(tuple(r) for r in rows))


def partial_prolongation(c: ConstantRelativeConnection) -> Subspace:
    return kernel(a_map(c))


def curvature_matrix(c: ConstantRelativeConnection) -> Matrix:
    """κ on all of J^1F, values in Λ²V*⊗E (pair (i<j) outer, E index inner)."""
    rows = []
    for i, j in combinations(range(c.n), 2):
        rows.extend(_block_row(c, {j + 1: c.C[i], i + 1: c.C[j].scale(-1)}, c.E_rank))
    return Matrix(len(rows), c.jet_dim, tuple(tuple(r) for r in rows))


def curvature(c: ConstantRelativeConnection) -> Matrix:
    """κ restricted to J^1_D F, in the RREF coordinates of J^1_D F."""
    return curvature_matrix(c) @ partial_prolongation(c).inclusion()


def curvature_at(c: ConstantRelativeConnection, jet: Sequence) -> tuple:
    if not partial_prolongation(c).contains(jet):
        raise PreconditionError("jet does not lie in J^1_D F")
    return curvature_matrix(c).apply(jet)


def prolongation_space(c: ConstantRelativeConnection) -> Subspace:
    """P_D(F) = J^1_D F ∩ ker κ."""
    km = curvature_matrix(c)
    if km.nrows == 0:
        return partial_prolongation(c)
    return kernel(Matrix.vstack([a_map(c), km], c.jet_dim))


def projection_matrix(c: ConstantRelativeConnection) -> Matrix:
    """pr : J^1F → F."""
    a = c.F_rank
    return Matrix(a, c.jet_dim, tuple(
        tuple(Fraction(int(r == t)) for t in range(c.jet_dim)) for r in range(a)))


def pr_cokernel(c: ConstantRelativeConnection, P: Optional[Subspace] = None) -> int:
    P = prolongation_space(c) if P is None else P
    return c.F_rank - image(projection_matrix(c), P).dim


def prolongation_connection(c: ConstantRelativeConnection, P: Subspace) -> ConstantRelativeConnection:
    """Connection on P relative to pr: l' = pr, C'_i(e, ψ) = −ψ_i, in RREF coordinates of P."""
    a = c.F_rank
    B = P.basis.rows
    lp = Matrix(a, P.dim, tuple(tuple(v[r] for v in B) for r in range(a)))
    Cs = tuple(
        Matrix(a, P.dim, tuple(tuple(-v[(i + 1) * a + r] for v in B) for r in range(a)))
        for i in range(c.n)
    )
    return ConstantRelativeConnection(c.n, P.dim, a, lp, Cs)


def classical_prolongation(c: ConstantRelativeConnection, level: int = 1):
    """(P_D(F), D^(1)); raises NotSmoothlyDefined if pr : P → F is not onto."""
    P = prolongation_space(c)
    cok = pr_cokernel(c, P)
    if cok:
        raise NotSmoothlyDefined(cok, level)
    return P, prolongation_connection(c, P)


def symbol_prolongation_in_jets(c: ConstantRelativeConnection, q: Subspace) -> Subspace:
    """Transport a subspace of V*⊗g (g-basis coordinates) into jet coordinates (0, ψ)."""
    g = symbol(c).vectors()
    d, a = len(g), c.F_rank
    vecs = []
    for v in q.vectors():
        jet = [Fraction(0)] * c.jet_dim
        for i in range(c.n):
            for t in range(d):
                x = v[i * d + t]
                if x:
                    for r in range(a):
                        jet[(i + 1) * a + r] += x * g[t][r]
        vecs.append(jet)
    return Subspace.span(vecs, c.jet_dim)


def pr_kernel(c: ConstantRelativeConnection, P: Optional[Subspace] = None) -> Subspace:
    """ker(pr : P_D(F) → F) as a subspace of jet coordinates."""
    P = prolongation_space(c) if P is None else P
    e_zero = kernel(projection_matrix(c))
    return P & e_zero


# ---------------------------------------------------------------------------
# reduced curvature


def reduced_curvature_dim(c: ConstantRelativeConnection) -> int:
    """dim of the image of the 1-reduced curvature F → Λ²V*⊗E / ∂_D(V*⊗g)."""
    if c.n < 2:
        return 0
    km = curvature_matrix(c)
    J = partial_prolongation(c)
    full = image(km, J)
    sym = symbol_prolongation_in_jets(c, Subspace.full(c.n * symbol(c).dim))
    return full.dim - image(km, sym).dim


def connection_at_level(c: ConstantRelativeConnection, k: int) -> ConstantRelativeConnection:
    cur = c
    for lvl in range(1, k + 1):
        _, cur = classical_prolongation(cur, lvl)
    return cur


def reduced_curvature(c: ConstantRelativeConnection, k: int) -> int:
    """dim of the span of κ_{k+1}-classes in H^{2,k-1}(g); needs levels <= k smoothly defined."""
    return reduced_curvature_dim(connection_at_level(c, k))


def curvature_image_closed(c: ConstantRelativeConnection, k: int) -> bool:
    """Check that κ of D^(k) (k >= 1) lands in ker(∂ : Λ²⊗g^{(k-1)} → Λ³⊗g^{(k-2)})."""
    from .multilinear import phi_partial_matrix, exterior_tensor_embedding

    if k < 1:
        raise ValueError("closedness is stated for k >= 1")
    lower = connection_at_level(c, k - 1)
    upper = connection_at_level(c, k)
    if c.n < 2:
        return True
    vals = image(curvature_matrix(upper), partial_prolongation(upper))
    g_lower = symbol(lower)
    # values must lie in Λ² ⊗ g_lower
    emb = exterior_tensor_embedding(c.n, 2, g_lower.inclusion())
    target = image(emb)
    if not vals.issubspace(target):
        return False
    if c.n < 3 or vals.dim == 0:
        return True
    phi = symbol_map(lower).phi
    d = phi_partial_matrix(c.n, phi, 2)
    coords = []
    for v in vals.vectors():
        coords.append(_coordinates_in(target, emb, v))
    return all(not x for v in coords for x in d.apply(v))


def _coordinates_in(target: Subspace, emb: Matrix, v) -> list:
    # emb is injective; solve emb · x = v
    sol = kernel(Matrix.hstack([emb, Matrix.from_columns([[-x for x in v]], emb.nrows)]))
    for w in sol.vectors():
        if w[-1]:
            return [x / w[-1] for x in w[:-1]]
    raise AssertionError("vector is not in the image of the embedding")


# ---------------------------------------------------------------------------
# towers


@dataclass
class TowerLevel:
    k: int
    rank_P: int
    rank_g: int
    rank_g_tableau: int
    surjective: bool
    obstruction: int


@dataclass
class TowerReport:
    levels: list[TowerLevel] = field(default_factory=list)
    failed_at: Optional[int] = None
    cokernel_dim: int = 0

    @property
    def ranks(self) -> list[int]:
        return [lv.rank_P for lv in self.levels]


def prolong_tower(c: ConstantRelativeConnection, N: int, strict: bool = True) -> TowerReport:
    """Levels k = 0..N of the classical resolution.

    Level 0 is F itself. For k >= 1, rank_P is rank P^k, rank_g is
    dim ker(pr : P^k → P^{k-1}) and rank_g_tableau is dim g^{(k)}(∂_D) computed
    from the symbol map by tableau prolongation. ``surjective`` and
    ``obstruction`` describe pr : P^{k+1} → P^k. With ``strict`` a failing
    level raises NotSmoothlyDefined; otherwise the report stops there.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    gs = [s.dim for s in phi_prolongations(symbol_map(c), N)]
    report = TowerReport()
    cur = c
    for k in range(0, N + 1):
        P = prolongation_space(cur)
        cok = pr_cokernel(cur, P)
        obstruction = reduced_curvature_dim(cur)
        rank_g = symbol(cur).dim
        report.levels.append(TowerLevel(k, cur.F_rank, rank_g, gs[k], cok == 0, obstruction))
        if k == N:
            break
        if cok:
            report.failed_at = k + 1
            report.cokernel_dim = cok
            if strict:
                raise NotSmoothlyDefined(cok, k + 1)
            break
        cur = prolongation_connection(cur, P)
    return report


def tower_connections(c: ConstantRelativeConnection, N: int) -> list[ConstantRelativeConnection]:
    """[D, D^(1), …, D^(N)] while smoothly defined."""
    out = [c]
    for lvl in range(1, N + 1):
        _, nxt = classical_prolongation(out[-1], lvl)
        out.append(nxt)
    return out


# ---------------------------------------------------------------------------
# integrability and finite type


def formal_integrability_report(c: ConstantRelativeConnection, window: int) -> dict:
    """Check the integrability criterion on a finite window of H^{2,k}(g), 0 <= k <= window."""
    P = prolongation_space(c)
    cok = pr_cokernel(c, P)
    tm = symbol_map(c)
    h2 = {}
    if c.n >= 2:
        table = phi_spencer_cohomology(tm, window + 2)
        for k in range(window + 1):
            h2[k] = table.dim(k, 2)
    else:
        h2 = {k: 0 for k in range(window + 1)}
    surjective = cok == 0
    certified = surjective and all(v == 0 for v in h2.values())
    return {
        "pr_surjective": surjective,
        "pr_cokernel": cok,
        "g1_smooth": True,
        "g1_rank": prolong_phi(tm).dim,
        "H2": h2,
        "window": window,
        "verdict": "certified within window" if certified else (
            "fails: pr not surjective" if not surjective else "inconclusive: H^2 nonzero in window"),
        "certified": certified,
    }


def finite_type_analysis(c: ConstantRelativeConnection, bound: int) -> dict:
    """Order of D (smallest k <= bound with g^{(k)} = 0, g^{(0)} = g) and r = rank F + Σ_{i<k} rank g^{(i)}."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    gs = [s.dim for s in phi_prolongations(symbol_map(c), bound)]
    order = next((k for k, d in enumerate(gs) if d == 0), None)
    out = {"bound": bound, "symbol_dims": gs, "order": order, "r": None}
    if order is not None:
        out["r"] = c.F_rank + sum(gs[1:order])
        # hypotheses: P^order smoothly defined and pr : P^{order+1} → P^order onto
        rep = prolong_tower(c, max(order, 0) + 1, strict=False)
        out["hypotheses_hold"] = rep.failed_at is None
    return out


# ---------------------------------------------------------------------------
# compatibility


def jet_map(upper: ConstantRelativeConnection) -> Matrix:
    """j_{D~} : K → J^1F, k ↦ (l~ k, −C~_1 k, …, −C~_n k) in jet coordinates."""
    blocks = [upper.l] + [m.scale(-1) for m in upper.C]
    return Matrix.vstack(blocks, upper.F_rank)


def validate_compatible(upper: ConstantRelativeConnection, lower: ConstantRelativeConnection) -> dict:
    if upper.E_rank != lower.F_rank or upper.n != lower.n:
        raise DimensionMismatch("upper must map onto the bundle on which lower is defined")
    n = lower.n
    compat1 = all(lower.C[i] @ upper.l == lower.l @ upper.C[i] for i in range(n))
    compat2 = all(lower.C[i] @ upper.C[j] == lower.C[j] @ upper.C[i]
                  for i in range(n) for j in range(i + 1, n))
    P = prolongation_space(lower)
    img = image(jet_map(upper))
    embeds = img.issubspace(P)
    return {
        "compat1": compat1,
        "compat2": compat2,
        "embeds_in_P": embeds,
        "image_equals_P": img == P,
        "injective": rank(jet_map(upper)) == upper.F_rank,
    }
