"""Trend clustering: DTW alignment, Ward hierarchy and DTW k-group clustering.

DTW is the classic dynamic program over steps {(i-1,j), (i,j-1), (i-1,j-1)}
with either absolute or squared local cost; distances are raw cumulative costs
without path-length normalization.  The hierarchical side is Ward's
minimum-variance linkage via the Lance-Williams update on squared Euclidean
distances.  The k-group clustering refines a Ward seed by alternating DTW
barycenter averaging of cluster centers and nearest-center reassignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BandTooNarrow,
    EmptyCluster,
    EmptySequence,
    LengthMismatch,
    UnlabeledEntity,
)
from .panel import PanelDataset

__all__ = [
    "WarpingResult",
    "Dendrogram",
    "ClusterReport",
    "FeatureSummary",
    "dtw",
    "ward_cluster",
    "cut_dendrogram",
    "dtw_kcluster",
    "cluster_feature_summary",
]

LOCAL_COSTS = ("absolute", "squared")
DBA_MAX_ITER = 30
REFINE_MAX_ROUNDS = 50


@dataclass(frozen=True)
class WarpingResult:
    distance: float
    path: tuple[tuple[int, int], ...]
    cost_matrix: np.ndarray


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history; leaves are 0..n-1, merges create n, n+1, ..."""

    merges: tuple[tuple[int, int, float, int], ...]  # (a, b, height, new_size)
    leaf_labels: tuple[str, ...]


@dataclass(frozen=True)
class FeatureSummary:
    cluster: int
    feature: str
    mean: float
    median: float
    std_dev: float
    annual_growth_rate_pct: float
    excluded_entities: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClusterReport:
    k: int
    labels: dict[str, int]
    centers: np.ndarray  # (k, length)
    center_distances: np.ndarray  # (k, k) DTW distances
    member_alignments: dict[str, WarpingResult]
    objective_history: tuple[float, ...] = ()
    feature_summaries: tuple[FeatureSummary, ...] = ()
    rounds: int = 0


# ---------------------------------------------------------------------------
# dynamic time warping


def _local_cost_fn(local_cost: str):
    if local_cost == "absolute":
        return lambda u, v: abs(u - v)
    if local_cost == "squared":
        return lambda u, v: (u - v) * (u - v)
    raise ValueError(f"local_cost must be one of {LOCAL_COSTS}, got {local_cost!r}")


def dtw(a: Sequence[float], b: Sequence[float], local_cost: str = "squared",
        band: int | None = None) -> WarpingResult:
    """Dynamic time warping distance, path and accumulated-cost grid.

    Backtracking ties prefer the diagonal step, then the i-decrement.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    n, m = a.size, b.size
    if n == 0 or m == 0:
        raise EmptySequence("dtw inputs must be non-empty")
    if band is not None and band < abs(n - m):
        raise BandTooNarrow(f"band {band} < length difference {abs(n - m)}")
    cost = _local_cost_fn(local_cost)

    inf = np.inf
    acc = np.full((n, m), inf)
    for i in range(n):
        lo = 0 if band is None else max(0, i - band)
        hi = m if band is None else min(m, i + band + 1)
        for j in range(lo, hi):
            c = cost(a[i], b[j])
            if i == 0 and j == 0:
                acc[i, j] = c
                continue
            best = inf
            if i > 0 and j > 0 and acc[i - 1, j - 1] < best:
                best = acc[i - 1, j - 1]
            if i > 0 and acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if j > 0 and acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = c + best

    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        if i == 0:
            nxt = (i, j - 1)
        elif j == 0:
            nxt = (i - 1, j)
        else:
            # tie preference: diagonal, then the i-decrement
            candidates = ((i - 1, j - 1), (i - 1, j), (i, j - 1))
            nxt = min(candidates, key=lambda ij: acc[ij])
        i, j = nxt
        path.append(nxt)
    path.reverse()

    acc.setflags(write=False)
    return WarpingResult(distance=float(acc[n - 1, m - 1]), path=tuple(path), cost_matrix=acc)


# ---------------------------------------------------------------------------
# Ward hierarchical clustering


def ward_cluster(series: Sequence[Sequence[float]], labels: Sequence[str]) -> Dendrogram:
    """Ward minimum-variance linkage on equal-length vectors.

    Works on squared Euclidean distances with the Lance-Williams update;
    reported merge heights are the square roots, so they match the usual
    dendrogram convention and are non-decreasing.  Ties break on the smallest
    (a, b) cluster-index pair.
    """
    X = [np.asarray(s, dtype=float).reshape(-1) for s in series]
    n = len(X)
    if n < 2:
        raise ValueError("ward_cluster needs at least 2 series")
    L = X[0].size
    if any(x.size != L for x in X):
        raise LengthMismatch("all series must share one length")
    labels = tuple(str(l) for l in labels)
    if len(labels) != n:
        raise LengthMismatch(f"{len(labels)} labels for {n} series")

    # active cluster id -> (size,), pairwise squared distances in a dict
    d2: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            diff = X[i] - X[j]
            d2[(i, j)] = float(diff @ diff)
    size = {i: 1 for i in range(n)}
    active = set(range(n))
    merges = []
    next_id = n

    def key(i, j):
        return (i, j) if i < j else (j, i)

    while len(active) > 1:
        best = min(((v, k) for k, v in d2.items()), key=lambda t: (t[0], t[1]))
        dist2, (a, b) = best
        new = next_id
        next_id += 1
        sa, sb = size[a], size[b]
        merges.append((a, b, float(np.sqrt(max(dist2, 0.0))), sa + sb))
        active.discard(a)
        active.discard(b)
        for c in list(active):
            sc = size[c]
            dca = d2.pop(key(c, a))
            dcb = d2.pop(key(c, b))
            upd = ((sa + sc) * dca + (sb + sc) * dcb - sc * dist2) / (sa + sb + sc)
            d2[key(c, new)] = upd
        del d2[(a, b)]
        size[new] = sa + sb
        active.add(new)

    return Dendrogram(merges=tuple(merges), leaf_labels=labels)


def cut_dendrogram(dendrogram: Dendrogram, k: int) -> dict[str, int]:
    """Flat k-cluster assignment by undoing the last k-1 merges.

    Cluster ids are 0..k-1 in first-leaf order.
    """
    n = len(dendrogram.leaf_labels)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    next_id = n
    for a, b, _, _ in dendrogram.merges[: n - k]:
        members[next_id] = members.pop(a) + members.pop(b)
        next_id += 1
    groups = sorted(members.values(), key=min)
    out: dict[str, int] = {}
    for cid, group in enumerate(groups):
        for leaf in group:
            out[dendrogram.leaf_labels[leaf]] = cid
    return out


# ---------------------------------------------------------------------------
# DTW k-group clustering


def _dba_center(members: list[np.ndarray], init: np.ndarray, local_cost: str,
                max_iter: int = DBA_MAX_ITER) -> np.ndarray:
    """DTW barycenter averaging: iterated alignment-and-average."""
    center = init.copy()
    for _ in range(max_iter):
        sums = np.zeros_like(center)
        counts = np.zeros(center.size)
        for x in members:
            res = dtw(x, center, local_cost=local_cost)
            for i, j in res.path:
                sums[j] += x[i]
                counts[j] += 1.0
        counts[counts == 0] = 1.0
        new_center = sums / counts
        if float(np.max(np.abs(new_center - center))) < 1e-10:
            center = new_center
            break
        center = new_center
    return center


def dtw_kcluster(series: Sequence[Sequence[float]], k: int,
                 seed_labels: Sequence[int] | None = None,
                 local_cost: str = "squared",
                 ids: Sequence[str] | None = None) -> ClusterReport:
    """Iterative DTW clustering around barycenter-averaged centers.

    Starts from ``seed_labels`` (default: Ward cut at k), alternates center
    updates and nearest-center reassignment until assignments stop changing or
    the round cap is reached.  A cluster that loses all members is restarted
    once at the series farthest from its own center; a second occurrence
    raises ``EmptyCluster``.
    """
    X = [np.asarray(s, dtype=float).reshape(-1) for s in series]
    n = len(X)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if any(x.size != X[0].size for x in X):
        raise LengthMismatch("all series must share one length")
    ids = tuple(str(i) for i in (ids if ids is not None else range(n)))
    if len(ids) != n:
        raise LengthMismatch(f"{len(ids)} ids for {n} series")

    if seed_labels is not None:
        assign = np.asarray(list(seed_labels), dtype=int)
        if assign.size != n or assign.min() < 0 or assign.max() >= k:
            raise ValueError("seed_labels must assign each series a cluster in [0, k)")
    elif k == 1:
        assign = np.zeros(n, dtype=int)
    else:
        dendro = ward_cluster(X, ids)
        flat = cut_dendrogram(dendro, k)
        assign = np.array([flat[i] for i in ids], dtype=int)

    restarted = set()
    centers = np.zeros((k, X[0].size))
    objective = []
    rounds = 0
    for rounds in range(1, REFINE_MAX_ROUNDS + 1):
        for c in range(k):
            members = [X[i] for i in range(n) if assign[i] == c]
            if not members:
                continue
            init = np.mean(members, axis=0)
            centers[c] = _dba_center(members, init, local_cost)

        dists = np.empty((n, k))
        for i in range(n):
            for c in range(k):
                dists[i, c] = dtw(X[i], centers[c], local_cost=local_cost).distance
        new_assign = dists.argmin(axis=1)

        for c in range(k):
            if (new_assign == c).any():
                continue
            if c in restarted:
                raise EmptyCluster(f"cluster {c} lost all members twice")
            restarted.add(c)
            own = dists[np.arange(n), new_assign]
            farthest = int(np.argmax(own))
            new_assign[farthest] = c

        objective.append(float(dists[np.arange(n), new_assign].sum()))
        if (new_assign == assign).all():
            assign = new_assign
            break
        assign = new_assign

    center_distances = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            dist = dtw(centers[a], centers[b], local_cost=local_cost).distance
            center_distances[a, b] = center_distances[b, a] = dist

    member_alignments = {
        ids[i]: dtw(X[i], centers[assign[i]], local_cost=local_cost) for i in range(n)
    }
    labels = {ids[i]: int(assign[i]) for i in range(n)}
    return ClusterReport(
        k=k,
        labels=labels,
        centers=centers,
        center_distances=center_distances,
        member_alignments=member_alignments,
        objective_history=tuple(objective),
        rounds=rounds,
    )


# ---------------------------------------------------------------------------
# per-cluster feature analytics


def cluster_feature_summary(panel: PanelDataset, labels: dict[str, int],
                            features: Sequence[str]) -> tuple[FeatureSummary, ...]:
    """Pooled mean/median/std and mean per-entity CAGR per cluster and feature.

    Entities whose first value is not positive are excluded from the growth
    average and flagged on the summary row.
    """
    for entity in panel.entities:
        if entity not in labels:
            raise UnlabeledEntity(f"entity {entity!r} has no cluster label")

    clusters = sorted(set(labels[e] for e in panel.entities))
    n_t = panel.n_periods
    out = []
    for feature in features:
        mat = panel.variable_matrix(feature)
        for c in clusters:
            rows = [i for i, e in enumerate(panel.entities) if labels[e] == c]
            pooled = mat[rows, :].reshape(-1)
            growth_rates = []
            excluded = []
            for i in rows:
                first, last = mat[i, 0], mat[i, -1]
                if first <= 0:
                    excluded.append(panel.entities[i])
                    continue
                growth_rates.append(100.0 * ((last / first) ** (1.0 / (n_t - 1)) - 1.0))
            growth = float(np.mean(growth_rates)) if growth_rates else float("nan")
            out.append(FeatureSummary(
                cluster=int(c),
                feature=feature,
                mean=float(pooled.mean()),
                median=float(np.median(pooled)),
                std_dev=float(pooled.std(ddof=1)) if pooled.size > 1 else 0.0,
                annual_growth_rate_pct=growth,
                excluded_entities=tuple(excluded),
            ))
    return tuple(out)
