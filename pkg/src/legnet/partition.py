"""Agreement scores between two node partitions.

Partitions are label sequences aligned by position; labels may be any
hashable values. All scores are label-permutation invariant and
symmetric in their arguments.
"""

from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import DataError


def contingency(a: Sequence[Hashable], b: Sequence[Hashable]) -> np.ndarray:
    """Cross-tabulation of two label sequences."""
    if len(a) != len(b):
        raise DataError(f"partitions cover {len(a)} and {len(b)} nodes")
    if len(a) == 0:
        raise DataError("empty partitions")
    _, ca = np.unique(np.asarray(a, dtype=object), return_inverse=True)
    _, cb = np.unique(np.asarray(b, dtype=object), return_inverse=True)
    table = np.zeros((ca.max() + 1, cb.max() + 1), dtype=np.int64)
    np.add.at(table, (ca, cb), 1)
    return table


def _comb2(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def rand_index(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Fraction of node pairs on which the partitions agree."""
    table = contingency(a, b)
    n = int(table.sum())
    if n < 2:
        raise DataError("rand index needs at least 2 nodes")
    total = _comb2(np.asarray(n))
    s11 = _comb2(table).sum()
    sa = _comb2(table.sum(axis=1)).sum()
    sb = _comb2(table.sum(axis=0)).sum()
    return float((total + 2.0 * s11 - sa - sb) / total)


def adjusted_rand(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Hubert-Arabie chance-corrected Rand index.

    When both partitions are single-class (or otherwise leave no room
    for chance), the score is 1 by convention.
    """
    table = contingency(a, b)
    n = int(table.sum())
    if n < 2:
        raise DataError("adjusted Rand needs at least 2 nodes")
    total = _comb2(np.asarray(n))
    s11 = _comb2(table).sum()
    sa = _comb2(table.sum(axis=1)).sum()
    sb = _comb2(table.sum(axis=0)).sum()
    expected = sa * sb / total
    denom = 0.5 * (sa + sb) - expected
    if denom == 0.0:
        return 1.0
    return float((s11 - expected) / denom)


def nmi(a: Sequence[Hashable], b: Sequence[Hashable],
        normalization: str = "arithmetic") -> float:
    """Normalized mutual information between two partitions.

    normalization picks the denominator: "arithmetic" (mean of the two
    entropies, the default), "min", or "max". Conventions: 1.0 when
    both partitions are single-class, 0.0 when exactly one is.
    """
    if normalization not in ("arithmetic", "min", "max"):
        raise DataError(f"unknown NMI normalization {normalization!r}")
    table = contingency(a, b).astype(np.float64)
    n = table.sum()
    p = table / n
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    ha = float(-xlogy(pa, pa).sum())
    hb = float(-xlogy(pb, pb).sum())
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    outer = pa[:, None] * pb[None, :]
    mi = float((xlogy(p, p) - xlogy(p, outer)).sum())
    if normalization == "arithmetic":
        norm = 0.5 * (ha + hb)
    elif normalization == "min":
        norm = min(ha, hb)
    else:
        norm = max(ha, hb)
    return float(min(max(mi / norm, 0.0), 1.0))
