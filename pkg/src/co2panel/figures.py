"""SVG figure output for the report bundle.

All figures are rendered with a pinned hash salt and without timestamp
metadata so repeated runs write identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .clustering import Dendrogram, WarpingResult  # noqa: E402

__all__ = [
    "write_all_figures",
    "dendrogram_svg",
    "nrmse_bars_svg",
    "forecast_lines_svg",
    "dtw_heatmap_svg",
]

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def _new_figure(width=8.0, height=5.0):
    plt.rcParams["svg.hashsalt"] = "co2panel"
    return plt.subplots(figsize=(width, height))


def dendrogram_svg(dendrogram: Dendrogram, path: Path) -> None:
    """u-link dendrogram of the Ward merge history."""
    n = len(dendrogram.leaf_labels)
    children: dict[int, tuple[int, int]] = {}
    heights: dict[int, float] = {i: 0.0 for i in range(n)}
    for idx, (a, b, h, _) in enumerate(dendrogram.merges):
        node = n + idx
        children[node] = (a, b)
        heights[node] = h

    order: list[int] = []

    def visit(node: int) -> None:
        if node < n:
            order.append(node)
            return
        a, b = children[node]
        visit(a)
        visit(b)

    root = n + len(dendrogram.merges) - 1 if dendrogram.merges else 0
    visit(root)
    xpos = {leaf: float(i) for i, leaf in enumerate(order)}

    fig, ax = _new_figure(max(6.0, 0.45 * n), 4.5)
    for idx, (a, b, h, _) in enumerate(dendrogram.merges):
        node = n + idx
        xa, xb = xpos[a], xpos[b]
        ya, yb = heights[a], heights[b]
        ax.plot([xa, xa, xb, xb], [ya, h, h, yb], color="tab:blue", lw=1.0)
        xpos[node] = 0.5 * (xa + xb)
    ax.set_xticks(range(n))
    ax.set_xticklabels([dendrogram.leaf_labels[i] for i in order], rotation=90, fontsize=7)
    ax.set_ylabel("merge height")
    ax.set_title("Ward clustering of standardized emission trends")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def nrmse_bars_svg(entities, nrmse_all, nrmse_selected, path: Path) -> None:
    fig, ax = _new_figure(max(7.0, 0.5 * len(entities)), 4.5)
    x = range(len(entities))
    width = 0.4
    ax.bar([i - width / 2 for i in x], nrmse_all, width, label="all features")
    ax.bar([i + width / 2 for i in x], nrmse_selected, width, label="selected features")
    ax.set_xticks(list(x))
    ax.set_xticklabels(entities, rotation=90, fontsize=7)
    ax.set_ylabel("NRMSE")
    ax.set_title("Forecast NRMSE by feature set")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def forecast_lines_svg(entity, years, actual, test_years, fc_all, fc_selected, path: Path,
                       ylabel: str = "emission") -> None:
    fig, ax = _new_figure(7.0, 4.0)
    ax.plot(years, actual, color="black", lw=1.2, label="actual")
    ax.plot(test_years, fc_all, color="tab:orange", marker="o", lw=1.0, label="all features")
    ax.plot(test_years, fc_selected, color="tab:green", marker="s", lw=1.0, label="selected features")
    ax.set_xlabel("year")
    ax.set_ylabel(ylabel)
    ax.set_title(f"{entity}: forecast vs actual")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def dtw_heatmap_svg(result: WarpingResult, title: str, path: Path) -> None:
    fig, ax = _new_figure(5.0, 4.2)
    im = ax.imshow(result.cost_matrix, origin="lower", aspect="auto", cmap="viridis")
    ax.plot([j for _, j in result.path], [i for i, _ in result.path], color="red", lw=1.5)
    fig.colorbar(im, ax=ax, label="accumulated cost")
    ax.set_xlabel("center index")
    ax.set_ylabel("series index")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def write_all_figures(report, out_dir: Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p2 = report.phase2

    dendrogram_svg(p2.dendrogram, out / "dendrogram.svg")

    if p2.scenario_pairs:
        entities = [p.entity for p in p2.scenario_pairs]
        nrmse_bars_svg(
            entities,
            [p.all_features.nrmse for p in p2.scenario_pairs],
            [p.selected_features.nrmse for p in p2.scenario_pairs],
            out / "nrmse_comparison.svg",
        )
        dependent = ""
        if report.phase1 is not None and report.phase1.fits:
            dependent = next(iter(report.phase1.fits.values())).spec.dependent
        for pair in p2.scenario_pairs:
            h = pair.all_features.horizon
            test_years = [p2.split_year + i + 1 for i in range(h)]
            forecast_lines_svg(
                pair.entity, test_years, pair.all_features.actuals, test_years,
                pair.all_features.point_forecasts, pair.selected_features.point_forecasts,
                out / f"forecast_{pair.entity.replace(' ', '_').lower()}.svg",
                ylabel=dependent or "dependent variable",
            )

    cl = p2.clusters
    from .clustering import dtw
    for a in range(cl.k):
        for b in range(a + 1, cl.k):
            res = dtw(cl.centers[a], cl.centers[b])
            dtw_heatmap_svg(res, f"cluster {a} vs cluster {b} centers",
                            out / f"dtw_centers_{a}_{b}.svg")
    for entity in sorted(cl.member_alignments):
        res = cl.member_alignments[entity]
        dtw_heatmap_svg(
            res,
            f"{entity} vs cluster {cl.labels[entity]} center (DTW {res.distance:.3f})",
            out / f"dtw_member_{entity.replace(' ', '_').lower()}.svg",
        )
