"""End-to-end orchestration of the two analysis phases plus report output.

Phase 1 follows the decision flow: pooled OLS, Breusch-Pagan LM (stop at the
pooled model if it fails to reject), the two random-effects fits with a Wald
test on the period dummies, a Hausman test against the carried random-effects
model, and, on rejection, the two fixed-effects fits compared by BIC.  Feature
selection runs on whichever model the flow lands on.  Phase 2 forecasts every
entity under the all-features and selected-features scenarios and clusters the
standardized dependent-variable trends.

The report is one JSON document plus per-table CSV files and SVG figures, all
written deterministically so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from . import __version__
from .clustering import (
    ClusterReport,
    Dendrogram,
    cluster_feature_summary,
    dtw_kcluster,
    ward_cluster,
)
from .datasets import DEFAULT_VARIABLES, snapshot_path
from .errors import CO2PanelError, ConfigError
from .estimators import (
    ComparisonEntry,
    FitResult,
    ModelSpec,
    compare_models,
    fit_fixed_effects,
    fit_pooled_ols,
    fit_random_effects,
    significance_stars,
)
from .panel import PanelDataset, VariableSpec, impute_missing, load_panel, standardize_series, correlation_matrix
from .sarimax import ScenarioPair, run_two_scenarios
from .selection import SelectionReport, select_features
from .spectests import TestResult, breusch_pagan_panel, hausman, wald_time_effects

__all__ = [
    "PipelineConfig",
    "Phase1Result",
    "Phase2Result",
    "PipelineReport",
    "load_config_panel",
    "run_phase1",
    "run_phase2",
    "run_pipeline",
    "write_report",
]

MODEL_LABELS = {
    "A": "pooled_ols",
    "B": "random_effects",
    "C": "random_effects_time",
    "D": "fixed_effects_within",
    "E": "fixed_effects_glm",
}


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str = ""
    entity_column: str = "country"
    period_column: str = "year"
    variables: tuple[VariableSpec, ...] = DEFAULT_VARIABLES
    missing_policy: str = "linear_interpolate"
    alpha: float = 0.05
    corr_threshold: float = 0.80
    forecast_horizon: int = 3
    split_year: int | None = None
    k_clusters: int = 3
    p_range: tuple[int, ...] = (0, 1, 2)
    d_range: tuple[int, ...] = (0, 1, 2)
    q_range: tuple[int, ...] = (0, 1, 2)
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.corr_threshold <= 1.0:
            raise ConfigError(f"corr_threshold must lie in (0, 1], got {self.corr_threshold}")
        if self.forecast_horizon < 1:
            raise ConfigError(f"forecast_horizon must be >= 1, got {self.forecast_horizon}")
        if self.k_clusters < 1:
            raise ConfigError(f"k_clusters must be >= 1, got {self.k_clusters}")
        if self.missing_policy not in ("forward_fill", "linear_interpolate", "drop_period"):
            raise ConfigError(f"unknown missing policy {self.missing_policy!r}")

    @property
    def dependent(self) -> str:
        for v in self.variables:
            if v.role == "dependent":
                return v.code
        raise ConfigError("no variable has role 'dependent'")

    @property
    def predictors(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.variables if v.role == "candidate_predictor")

    @staticmethod
    def from_toml(path: str | Path, **overrides) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "rb") as fh:
                raw = _toml.load(fh)
        except _toml.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
        return _config_from_dict(raw, overrides)


_SECTION_KEYS = {
    "data": {"input", "entity_column", "period_column", "missing_policy", "variables"},
    "phase1": {"alpha", "corr_threshold"},
    "phase2": {"horizon", "split_year", "k_clusters", "p_range", "d_range", "q_range"},
    "output": {"directory", "seed"},
}


def _config_from_dict(raw: dict, overrides: dict) -> PipelineConfig:
    kwargs: dict[str, Any] = {}
    for section, content in raw.items():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(content, dict):
            raise ConfigError(f"config section [{section}] must be a table")
        for key in content:
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    data = raw.get("data", {})
    if "input" in data:
        kwargs["input_path"] = str(data["input"])
    kwargs["entity_column"] = data.get("entity_column", "country")
    kwargs["period_column"] = data.get("period_column", "year")
    kwargs["missing_policy"] = data.get("missing_policy", "linear_interpolate")
    if "variables" in data:
        specs = []
        for code, desc in data["variables"].items():
            if not isinstance(desc, dict) or "column" not in desc:
                raise ConfigError(f"variable {code!r} needs a 'column' entry")
            specs.append(VariableSpec(code, str(desc["column"]),
                                      str(desc.get("role", "candidate_predictor"))))
        kwargs["variables"] = tuple(specs)

    p1 = raw.get("phase1", {})
    if "alpha" in p1:
        kwargs["alpha"] = float(p1["alpha"])
    if "corr_threshold" in p1:
        kwargs["corr_threshold"] = float(p1["corr_threshold"])

    p2 = raw.get("phase2", {})
    if "horizon" in p2:
        kwargs["forecast_horizon"] = int(p2["horizon"])
    if "split_year" in p2:
        kwargs["split_year"] = int(p2["split_year"])
    if "k_clusters" in p2:
        kwargs["k_clusters"] = int(p2["k_clusters"])
    for rng in ("p_range", "d_range", "q_range"):
        if rng in p2:
            kwargs[rng] = tuple(int(v) for v in p2[rng])

    out = raw.get("output", {})
    if "directory" in out:
        kwargs["output_dir"] = str(out["directory"])
    if "seed" in out:
        kwargs["seed"] = int(out["seed"])

    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**kwargs)


def load_config_panel(config: PipelineConfig) -> PanelDataset:
    """Load and impute the panel named by the config (bundled snapshot by default)."""
    path = Path(config.input_path) if config.input_path else snapshot_path()
    panel = load_panel(path, config.variables, config.entity_column, config.period_column)
    if not panel.is_complete:
        panel = impute_missing(panel, config.missing_policy)
    return panel


# ---------------------------------------------------------------------------
# phase 1


@dataclass(frozen=True)
class DecisionStep:
    step: str
    test_name: str
    statistic: float
    p_value: float
    decision: str
    branch: str


@dataclass(frozen=True)
class Phase1Result:
    fits: dict[str, FitResult]
    tests: dict[str, TestResult]
    comparison: tuple[ComparisonEntry, ...] | None
    selection: SelectionReport | None
    decision_trace: tuple[DecisionStep, ...]
    selected_model: str


def _spec(config: PipelineConfig, kind: str) -> ModelSpec:
    return ModelSpec(kind=kind, dependent=config.dependent, predictors=config.predictors)


def run_phase1(panel: PanelDataset, config: PipelineConfig) -> Phase1Result:
    fits: dict[str, FitResult] = {}
    tests: dict[str, TestResult] = {}
    trace: list[DecisionStep] = []
    alpha = config.alpha

    fits["A"] = fit_pooled_ols(panel, _spec(config, "pooled_ols"))
    bp = breusch_pagan_panel(fits["A"], panel, alpha)
    tests["breusch_pagan"] = bp
    if not bp.reject:
        trace.append(DecisionStep("breusch_pagan", bp.test_name, bp.statistic, bp.p_value,
                                  bp.decision, "no entity effects: stay with pooled OLS"))
        selection = select_features(fits["A"], panel, alpha, config.corr_threshold)
        return Phase1Result(fits, tests, None, selection, tuple(trace), "A")
    trace.append(DecisionStep("breusch_pagan", bp.test_name, bp.statistic, bp.p_value,
                              bp.decision, "entity effects present: fit random effects"))

    fits["B"] = fit_random_effects(panel, _spec(config, "random_effects"), time_trend=False)
    fits["C"] = fit_random_effects(panel, _spec(config, "random_effects_time"), time_trend=True)
    wald = wald_time_effects(fits["B"], fits["C"], alpha)
    tests["wald"] = wald
    carried = "C" if wald.reject else "B"
    trace.append(DecisionStep("wald_time_effects", wald.test_name, wald.statistic, wald.p_value,
                              wald.decision, f"carry model {carried}"))

    fits["D"] = fit_fixed_effects(panel, _spec(config, "fixed_effects_within"))
    hm = hausman(fits["D"], fits[carried], alpha)
    tests["hausman"] = hm
    if not hm.reject:
        trace.append(DecisionStep("hausman", hm.test_name, hm.statistic, hm.p_value,
                                  hm.decision, f"random effects consistent: select from model {carried}"))
        selection = select_features(fits[carried], panel, alpha, config.corr_threshold)
        return Phase1Result(fits, tests, None, selection, tuple(trace), carried)
    trace.append(DecisionStep("hausman", hm.test_name, hm.statistic, hm.p_value,
                              hm.decision, "fixed effects required: compare models D and E"))

    fits["E"] = fit_fixed_effects(panel, _spec(config, "fixed_effects_glm"))
    comparison = compare_models([fits["D"], fits["E"]])
    winner_kind = comparison[0].fit.spec.kind
    winner = "E" if winner_kind == "fixed_effects_glm" else "D"
    trace.append(DecisionStep("model_comparison", "bic_ranking",
                              comparison[0].fit.fit.bic, float("nan"),
                              f"model {winner} wins", f"select features from model {winner}"))
    selection = select_features(fits[winner], panel, alpha, config.corr_threshold)
    return Phase1Result(fits, tests, comparison, selection, tuple(trace), winner)


# ---------------------------------------------------------------------------
# phase 2


@dataclass(frozen=True)
class Phase2Result:
    scenario_pairs: tuple[ScenarioPair, ...]
    forecast_failures: tuple[tuple[str, str], ...]  # (entity, message)
    order_log: dict[str, Any]
    standardized: dict[str, np.ndarray]
    dendrogram: Dendrogram
    clusters: ClusterReport
    split_year: int
    notes: tuple[str, ...] = ()


def run_phase2(panel: PanelDataset, selection: SelectionReport,
               config: PipelineConfig) -> Phase2Result:
    if not selection.selected:
        raise ConfigError("phase 2 needs a non-empty feature selection")
    notes: list[str] = []
    horizon = config.forecast_horizon
    split_year = config.split_year if config.split_year is not None \
        else panel.periods[-1] - horizon

    order_log: dict[str, Any] = {}
    pairs: list[ScenarioPair] = []
    failures: list[tuple[str, str]] = []
    for entity in panel.entities:
        sub = panel.subset_entities([entity])
        try:
            pairs.extend(run_two_scenarios(
                sub, selection.selected, config.predictors,
                split_year, horizon,
                dependent=config.dependent,
                p_range=config.p_range, d_range=config.d_range, q_range=config.q_range,
                log=order_log,
            ))
        except CO2PanelError as exc:
            failures.append((entity, str(exc)))

    standardized = {
        e: standardize_series(panel.series(e, config.dependent).values)
        for e in panel.entities
    }
    series = [standardized[e] for e in panel.entities]

    k = config.k_clusters
    if k > panel.n_entities:
        notes.append(f"k_clusters reduced from {k} to {panel.n_entities} (panel size)")
        warnings.warn(notes[-1], UserWarning)
        k = panel.n_entities

    if panel.n_entities >= 2:
        dendrogram = ward_cluster(series, panel.entities)
    else:
        dendrogram = Dendrogram(merges=(), leaf_labels=panel.entities)
    clusters = dtw_kcluster(series, k, ids=panel.entities)
    summaries = cluster_feature_summary(panel, clusters.labels, selection.selected)
    clusters = dataclasses.replace(clusters, feature_summaries=summaries)

    return Phase2Result(
        scenario_pairs=tuple(pairs),
        forecast_failures=tuple(failures),
        order_log=order_log,
        standardized=standardized,
        dendrogram=dendrogram,
        clusters=clusters,
        split_year=split_year,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# full run and report writing


@dataclass(frozen=True)
class PipelineReport:
    phase1: Phase1Result | None
    phase2: Phase2Result | None
    provenance: dict[str, Any]
    incomplete: str | None = None


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def run_pipeline(config: PipelineConfig, partial_on_error: bool = True) -> PipelineReport:
    """Run both phases; on an analysis error, return a partial report
    flagged incomplete (unless ``partial_on_error`` is false)."""
    panel = load_config_panel(config)
    input_file = Path(config.input_path) if config.input_path else snapshot_path()
    provenance = {
        "tool_version": __version__,
        "config": _jsonify(dataclasses.asdict(config)),
        "input_checksum_sha256": _sha256(input_file),
        "seed": config.seed,
    }
    phase1 = phase2 = None
    incomplete = None
    try:
        phase1 = run_phase1(panel, config)
        phase2 = run_phase2(panel, phase1.selection, config)
    except CO2PanelError as exc:
        if not partial_on_error:
            raise
        incomplete = f"{exc.prefix}: {exc}"
    return PipelineReport(phase1=phase1, phase2=phase2, provenance=provenance,
                          incomplete=incomplete)


def _jsonify(obj: Any) -> Any:
    """Deterministic JSON-ready structure; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify(dataclasses.asdict(obj))
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def report_to_dict(report: PipelineReport) -> dict[str, Any]:
    p1 = report.phase1
    p2 = report.phase2
    doc: dict[str, Any] = {
        "provenance": _jsonify(report.provenance),
        "incomplete": report.incomplete,
        "phase1": None,
        "phase2": None,
    }
    if p1 is None:
        return doc
    phase1 = {
        "fits": {label: _fit_dict(f) for label, f in sorted(p1.fits.items())},
        "tests": {name: _jsonify(t) for name, t in sorted(p1.tests.items())},
        "comparison": None if p1.comparison is None else [
            {
                "kind": e.fit.spec.kind,
                "aic": e.fit.fit.aic,
                "bic": e.fit.fit.bic,
                "log_likelihood": e.fit.fit.log_likelihood,
                "delta_aic": e.delta_aic,
                "delta_bic": e.delta_bic,
                "delta_loglik": e.delta_loglik,
            }
            for e in p1.comparison
        ],
        "selection": _jsonify(p1.selection),
        "decision_trace": _jsonify(p1.decision_trace),
        "selected_model": p1.selected_model,
    }
    doc["phase1"] = phase1
    if p2 is None:
        return doc
    phase2 = {
        "split_year": p2.split_year,
        "forecasts": [
            {
                "entity": pair.entity,
                "order_all": pair.order_all.label(),
                "order_selected": pair.order_selected.label(),
                "all_features": _forecast_dict(pair.all_features),
                "selected_features": _forecast_dict(pair.selected_features),
            }
            for pair in p2.scenario_pairs
        ],
        "forecast_failures": _jsonify(p2.forecast_failures),
        "order_log": _jsonify(p2.order_log),
        "clusters": {
            "k": p2.clusters.k,
            "labels": {e: p2.clusters.labels[e] for e in sorted(p2.clusters.labels)},
            "centers": _jsonify(p2.clusters.centers),
            "center_distances": _jsonify(p2.clusters.center_distances),
            "member_distances": {
                e: p2.clusters.member_alignments[e].distance
                for e in sorted(p2.clusters.member_alignments)
            },
            "objective_history": _jsonify(p2.clusters.objective_history),
            "feature_summaries": _jsonify(p2.clusters.feature_summaries),
            "rounds": p2.clusters.rounds,
        },
        "dendrogram": _jsonify(p2.dendrogram),
        "notes": _jsonify(p2.notes),
    }
    doc["phase2"] = phase2
    return doc


def _fit_dict(fit: FitResult) -> dict[str, Any]:
    return {
        "kind": fit.spec.kind,
        "dependent": fit.spec.dependent,
        "predictors": list(fit.spec.predictors),
        "coefficients": _jsonify(fit.coefficients),
        "stats": _jsonify(fit.fit),
        "variance_components": _jsonify(fit.variance_components),
        "entity_effects": _jsonify(fit.entity_effects),
        "reference": fit.reference.label() if fit.reference is not None else None,
        "design_df": fit.design_df,
        "notes": list(fit.notes),
    }


def _forecast_dict(rep) -> dict[str, Any]:
    return {
        "horizon": rep.horizon,
        "point_forecasts": _jsonify(rep.point_forecasts),
        "actuals": _jsonify(rep.actuals),
        "mae": rep.mae,
        "rmse": rep.rmse,
        "nrmse": _jsonify(rep.nrmse),
        "scenario": rep.scenario,
    }


# ---------------------------------------------------------------------------
# CSV table output


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if (isinstance(v, float) and not math.isfinite(v)) else v
                             for v in row])


def _coef_table_rows(fit: FitResult):
    for row in fit.coefficients:
        yield [row.term, repr(row.estimate), repr(row.std_error), repr(row.statistic),
               repr(row.p_value), significance_stars(row.p_value)]


def write_report(report: PipelineReport, out_dir: str | Path,
                 panel: PanelDataset | None = None, figures: bool = True) -> Path:
    """Write report.json plus the tables/ and figures/ bundle; returns the JSON path."""
    out = Path(out_dir)
    tables = out / "tables"
    tables.mkdir(parents=True, exist_ok=True)

    doc = report_to_dict(report)
    json_path = out / "report.json"
    json_path.write_text(
        json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )

    p1, p2 = report.phase1, report.phase2
    model_files = {
        "A": "model_a_pooled_ols",
        "B": "model_b_random_effects",
        "C": "model_c_random_effects_time",
        "D": "model_d_fixed_effects",
        "E": "model_e_fixed_effects_glm",
    }
    header = ["term", "estimate", "std_error", "statistic", "p_value", "significance"]
    for label, fit in sorted(p1.fits.items()) if p1 else ():
        _write_csv(tables / f"{model_files[label]}_coefficients.csv", header, _coef_table_rows(fit))

    if p1 is not None:
        _write_csv(
            tables / "specification_tests.csv",
            ["test", "statistic", "distribution", "p_value", "alpha", "decision", "null_hypothesis"],
            ([t.test_name, repr(t.statistic), t.distribution.label(), repr(t.p_value),
              repr(t.alpha), t.decision, t.null_description]
             for _, t in sorted(p1.tests.items())),
        )

    if p1 is not None and p1.comparison is not None:
        _write_csv(
            tables / "model_comparison.csv",
            ["kind", "log_likelihood", "aic", "bic", "delta_aic", "delta_bic", "n_params"],
            ([e.fit.spec.kind, repr(e.fit.fit.log_likelihood), repr(e.fit.fit.aic),
              repr(e.fit.fit.bic), repr(e.delta_aic), repr(e.delta_bic), e.fit.fit.n_params]
             for e in p1.comparison),
        )

    if p1 is not None and p1.selection is not None:
        sel = p1.selection
        _write_csv(
            tables / "feature_selection.csv",
            ["code", "p_value", "status"],
            ([c, repr(p), "selected" if c in sel.selected else "dropped_collinear"]
             for c, p in sel.significant),
        )

    if panel is not None:
        codes = list(panel.variables)
        corr = correlation_matrix(panel, codes)
        _write_csv(
            tables / "correlation_matrix.csv",
            ["variable", *codes],
            ([codes[i], *[repr(float(v)) for v in corr[i]]] for i in range(len(codes))),
        )
        _write_csv(
            tables / "summary_statistics.csv",
            ["variable", "mean", "median", "std_dev", "min", "max"],
            ([c,
              repr(float(np.mean(panel.variable_matrix(c)))),
              repr(float(np.median(panel.variable_matrix(c)))),
              repr(float(np.std(panel.variable_matrix(c), ddof=1))),
              repr(float(np.min(panel.variable_matrix(c)))),
              repr(float(np.max(panel.variable_matrix(c))))]
             for c in codes),
        )

    if p2 is None:
        return json_path

    _write_csv(
        tables / "forecast_metrics.csv",
        ["country", "scenario", "rmse", "mae"],
        ([pair.entity, scen.scenario, repr(scen.rmse), repr(scen.mae)]
         for pair in p2.scenario_pairs
         for scen in (pair.all_features, pair.selected_features)),
    )
    _write_csv(
        tables / "nrmse_comparison.csv",
        ["country", "nrmse_all_features", "nrmse_selected_features"],
        ([pair.entity, repr(pair.all_features.nrmse), repr(pair.selected_features.nrmse)]
         for pair in p2.scenario_pairs),
    )
    _write_csv(
        tables / "forecast_paths.csv",
        ["country", "year", "actual", "forecast_all_features", "forecast_selected_features"],
        ([pair.entity, p2.split_year + i + 1,
          repr(float(pair.all_features.actuals[i])),
          repr(float(pair.all_features.point_forecasts[i])),
          repr(float(pair.selected_features.point_forecasts[i]))]
         for pair in p2.scenario_pairs
         for i in range(pair.all_features.horizon)),
    )

    cl = p2.clusters
    _write_csv(tables / "cluster_labels.csv", ["country", "cluster"],
               ([e, cl.labels[e]] for e in sorted(cl.labels)))
    _write_csv(
        tables / "cluster_centers.csv",
        ["cluster", "step", "value"],
        ([c, t, repr(float(cl.centers[c, t]))]
         for c in range(cl.k) for t in range(cl.centers.shape[1])),
    )
    _write_csv(
        tables / "cluster_center_distances.csv",
        ["cluster_a", "cluster_b", "dtw_distance"],
        ([a, b, repr(float(cl.center_distances[a, b]))]
         for a in range(cl.k) for b in range(cl.k)),
    )
    _write_csv(
        tables / "member_warping_paths.csv",
        ["country", "step", "series_index", "center_index"],
        ([e, s, i, j]
         for e in sorted(cl.member_alignments)
         for s, (i, j) in enumerate(cl.member_alignments[e].path)),
    )
    _write_csv(
        tables / "member_cost_grids.csv",
        ["country", "series_index", "center_index", "accumulated_cost"],
        ([e, i, j, repr(float(cl.member_alignments[e].cost_matrix[i, j]))]
         for e in sorted(cl.member_alignments)
         for i in range(cl.member_alignments[e].cost_matrix.shape[0])
         for j in range(cl.member_alignments[e].cost_matrix.shape[1])),
    )
    _write_csv(
        tables / "cluster_feature_summary.csv",
        ["feature", "cluster", "mean", "median", "std_dev", "annual_growth_rate_pct",
         "growth_excluded_entities"],
        ([s.feature, s.cluster, repr(s.mean), repr(s.median), repr(s.std_dev),
          repr(s.annual_growth_rate_pct), ";".join(s.excluded_entities)]
         for s in cl.feature_summaries),
    )
    _write_csv(
        tables / "dendrogram_merges.csv",
        ["cluster_a", "cluster_b", "height", "new_size"],
        ([a, b, repr(h), s] for a, b, h, s in p2.dendrogram.merges),
    )

    if figures:
        from . import figures as fig
        fig.write_all_figures(report, out / "figures")

    return json_path
