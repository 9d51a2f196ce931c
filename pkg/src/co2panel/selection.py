"""Significant-predictor selection with greedy collinearity pruning."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoSignificantFeatures
from .estimators import FitResult, ModelSpec
from .panel import PanelDataset, correlation_matrix

__all__ = ["SelectionReport", "select_features"]


@dataclass(frozen=True)
class SelectionReport:
    source_model: ModelSpec
    alpha: float
    significant: tuple[tuple[str, float], ...]  # (code, p_value)
    dropped_collinear: tuple[tuple[str, str, float], ...]  # (kept, dropped, correlation)
    selected: tuple[str, ...]


def select_features(fit: FitResult, panel: PanelDataset,
                    alpha: float = 0.05, corr_threshold: float = 0.80) -> SelectionReport:
    """Keep predictors with p < alpha, then prune highly correlated pairs.

    Pairs of surviving predictors are scanned in descending absolute pooled
    Pearson correlation; whenever a pair reaches the threshold, the member
    with the larger p-value is dropped (ties go against the later one in spec
    order) and never revisited.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < corr_threshold <= 1.0:
        raise ValueError(f"corr_threshold must lie in (0, 1], got {corr_threshold}")

    pvals = fit.p_values()
    significant = [(c, pvals[c]) for c in fit.spec.predictors if pvals[c] < alpha]
    if not significant:
        raise NoSignificantFeatures(
            f"no predictor of model {fit.spec.kind!r} is significant at alpha={alpha}"
        )

    codes = [c for c, _ in significant]
    p_by_code = dict(significant)
    corr = correlation_matrix(panel, codes)

    # pairs in descending |corr|, deterministic tie-break by spec-order indices
    pairs = sorted(
        ((i, j) for i in range(len(codes)) for j in range(i + 1, len(codes))),
        key=lambda ij: (-abs(corr[ij[0], ij[1]]), ij[0], ij[1]),
    )

    dropped: set[str] = set()
    dropped_log: list[tuple[str, str, float]] = []
    for i, j in pairs:
        a, b = codes[i], codes[j]
        if a in dropped or b in dropped:
            continue
        rho = float(corr[i, j])
        if abs(rho) < corr_threshold:
            break
        # keep the smaller p-value; on a tie, keep the earlier one in spec order
        victim, keeper = (a, b) if p_by_code[a] > p_by_code[b] else (b, a)
        dropped.add(victim)
        dropped_log.append((keeper, victim, rho))

    selected = tuple(c for c in codes if c not in dropped)
    return SelectionReport(
        source_model=fit.spec,
        alpha=alpha,
        significant=tuple(significant),
        dropped_collinear=tuple(dropped_log),
        selected=selected,
    )
