"""Cross-check of the prolongation tower against the truncated-jet oracle."""
from __future__ import annotations

from ..relconn import prolong_tower, symbol_map
from ..tableau import phi_prolongations
from .jets import truncated_solution_dim


def compare_with_tower(c, N: int) -> dict:
    """Per level k = 1..N: oracle dimension, tower rank P^k and the rank-law prediction.

    The prediction rank F + Σ_{i<=k} dim g^{(i)} is what the tower asserts when
    every projection up to level k is onto. A level agrees when it is smoothly
    defined and all three numbers coincide; on an obstructed system the level
    where the tower breaks is recorded as a disagreement.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    rep = prolong_tower(c, N, strict=False)
    by_level = {lv.k: lv for lv in rep.levels}
    gs = [s.dim for s in phi_prolongations(symbol_map(c), N)]
    rows = []
    for k in range(1, N + 1):
        oracle = truncated_solution_dim(c, k)
        smooth = rep.failed_at is None or k < rep.failed_at
        rank_P = by_level[k].rank_P if k in by_level else None
        predicted = c.F_rank + sum(gs[1:k + 1])
        rows.append({
            "k": k,
            "oracle": oracle,
            "rank_P": rank_P,
            "predicted_rank": predicted,
            "smoothly_defined": smooth,
            "agree": smooth and rank_P == oracle == predicted,
        })
    return {
        "N": N,
        "levels": rows,
        "failed_at": rep.failed_at,
        "obstruction": rep.levels[-1].obstruction if rep.failed_at is not None else 0,
        "disagreements": [r["k"] for r in rows if not r["agree"]],
    }
