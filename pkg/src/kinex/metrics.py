"""Evaluation indexes for asset vectors.

gini measures disparity, total_exchange the time-averaged flow of a run,
kendall_tau the rank persistence between two snapshots (the inverse of
turnover). histogram and gamma_fit characterize the distribution shape.
All functions are pure and thread-safe.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError


@dataclass(frozen=True)
class GammaFit:
    """Method-of-moments gamma parameters; shape * scale == sample mean."""

    shape: float
    scale: float


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray  # ascending, length bins + 1
    counts: np.ndarray     # non-negative ints, length bins


def gini(assets) -> float:
    """Gini index of a vector of non-negative assets.

    Sorts ascending into r and returns
    ``2 * sum(i * r_i) / (n * sum(r)) - (n + 1) / n`` with 1-based i.
    0 for perfect equality, (n-1)/n when one agent holds everything.
    """
    a = np.asarray(assets, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValueError(f"gini needs a 1-d vector of length >= 2, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise ValueError("gini requires finite, non-negative assets")
    r = np.sort(a)
    total = float(r.sum())  # summed after sorting: permutation-invariant bit for bit
    if total <= 0.0:
        raise DegenerateDataError("gini is undefined for an all-zero vector")
    n = a.size
    ranks = np.arange(1, n + 1, dtype=float)
    return float(2.0 * (ranks * r).sum() / (n * total) - (n + 1) / n)


def total_exchange(cumulative_pool: float, t_max: int) -> float:
    """Time-averaged flow: the accumulated pool divided by ``2 * t_max``."""
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    if cumulative_pool < 0:
        raise ValueError(f"cumulative_pool must be non-negative, got {cumulative_pool}")
    return cumulative_pool / (2.0 * t_max)


def _merge_count(seq: list) -> tuple[list, int]:
    # Merge sort that counts strict inversions (i < j with seq[i] > seq[j]).
    n = len(seq)
    if n <= 1:
        return seq, 0
    mid = n // 2
    left, inv_l = _merge_count(seq[:mid])
    right, inv_r = _merge_count(seq[mid:])
    merged = []
    inv = inv_l + inv_r
    i = j = 0
    len_l, len_r = len(left), len(right)
    while i < len_l and j < len_r:
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            j += 1
            inv += len_l - i
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def _tied_pairs(values: list) -> int:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def kendall_tau(assets_t1, assets_t2) -> float:
    """Kendall rank correlation between two snapshots of the same agents.

    (K - L) / (n * (n - 1) / 2) where K counts agent pairs whose order
    agrees between the snapshots and L pairs that disagree. Pairs tied in
    either snapshot contribute to neither (the denominator stays the full
    pair count). Two all-equal snapshots have no comparable pair; that
    degenerate tau is defined as 0 and warned about.

    Runs in O(n log n) via inversion counting on the second snapshot after
    sorting by the first.
    """
    x = np.asarray(assets_t1, dtype=float)
    y = np.asarray(assets_t2, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"snapshot length mismatch: {x.shape} vs {y.shape}")
    if x.ndim != 1 or x.size < 2:
        raise ValueError("kendall_tau needs 1-d vectors of length >= 2")
    n = x.size
    n_pairs = n * (n - 1) // 2

    pairs = sorted(zip(x.tolist(), y.tolist()))
    y_in_x_order = [p[1] for p in pairs]
    _, discordant = _merge_count(y_in_x_order)

    ties_x = _tied_pairs([p[0] for p in pairs])
    ties_y = _tied_pairs(y_in_x_order)
    ties_both = _tied_pairs(pairs)
    comparable = n_pairs - ties_x - ties_y + ties_both
    if comparable == 0:
        warnings.warn("all agent pairs are tied; tau defined as 0", stacklevel=2)
        return 0.0
    concordant = comparable - discordant
    return (concordant - discordant) / n_pairs


def histogram(assets, bins: int = 50, value_range: tuple[float, float] | None = None) -> Histogram:
    """Linear-bin histogram of an asset vector; the top edge is inclusive.

    When ``value_range`` is omitted it defaults to [0, max(assets)]
    (widened to [0, 1] if all assets are zero, to keep edges ascending).
    """
    a = np.asarray(assets, dtype=float)
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if a.ndim != 1 or a.size == 0:
        raise ValueError("histogram needs a non-empty 1-d vector")
    if value_range is None:
        hi = float(a.max())
        value_range = (0.0, hi if hi > 0.0 else 1.0)
    lo, hi = value_range
    if not hi > lo:
        raise ValueError(f"range upper bound must exceed lower bound, got {value_range}")
    counts, edges = np.histogram(a, bins=bins, range=(lo, hi))
    return Histogram(bin_edges=edges, counts=counts)


def gamma_fit(assets) -> GammaFit:
    """Method-of-moments gamma fit: shape = mean^2/var, scale = var/mean.

    Variance uses the 1/n (population) normalization. Entries must be
    strictly positive; callers exclude zeros beforehand.
    """
    a = np.asarray(assets, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("gamma_fit needs a 1-d vector of length >= 2")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("gamma_fit requires strictly positive, finite entries")
    mean = float(a.mean())
    var = float(a.var())
    if var <= 0.0:
        raise DegenerateDataError("gamma_fit is undefined for a zero-variance sample")
    return GammaFit(shape=mean * mean / var, scale=var / mean)
