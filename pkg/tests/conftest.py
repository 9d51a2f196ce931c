"""Shared fixtures: synthetic panels and cached snapshot results.

The bundled-snapshot fits and the two-scenario forecast run are expensive, so
they are computed once per session and shared across test modules.
"""

from __future__ import annotations

import numpy as np
import pytest

from co2panel.datasets import PREDICTOR_CODES, load_snapshot
from co2panel.estimators import ModelSpec, fit_fixed_effects, fit_pooled_ols, fit_random_effects
from co2panel.panel import PanelDataset


def make_panel(entities, periods, variables, values) -> PanelDataset:
    return PanelDataset(entities, periods, variables, np.asarray(values, dtype=float))


def random_panel(rng, n_entities=4, n_periods=6, beta=(2.0, -1.0), entity_sd=3.0,
                 noise_sd=0.5, entity_corr=0.0, x_between_sd=0.0):
    """Simple linear panel y = a_i + X b + e with optional effect-regressor correlation."""
    k = len(beta)
    X = rng.normal(0.0, 1.0, (n_entities, n_periods, k))
    if x_between_sd:
        X = X + rng.normal(0.0, x_between_sd, (n_entities, 1, k))
    alpha = rng.normal(0.0, entity_sd, n_entities)
    if entity_corr:
        alpha = alpha + entity_corr * X[:, :, 0].mean(axis=1)
    y = (X @ np.asarray(beta)) + alpha[:, None] + rng.normal(0.0, noise_sd, (n_entities, n_periods))
    values = np.concatenate([y[:, :, None], X], axis=2)
    names = ["y"] + [f"x{i + 1}" for i in range(k)]
    entities = [f"e{i}" for i in range(n_entities)]
    periods = list(range(2000, 2000 + n_periods))
    return make_panel(entities, periods, names, values)


def spec_for(panel: PanelDataset, kind: str) -> ModelSpec:
    return ModelSpec(kind, panel.variables[0], tuple(panel.variables[1:]))


@pytest.fixture(scope="session")
def snapshot():
    return load_snapshot()


@pytest.fixture(scope="session")
def snapshot_spec():
    return ModelSpec("pooled_ols", "Co", PREDICTOR_CODES)


@pytest.fixture(scope="session")
def snapshot_fits(snapshot):
    """All five model fits on the bundled snapshot."""
    preds = PREDICTOR_CODES
    return {
        "A": fit_pooled_ols(snapshot, ModelSpec("pooled_ols", "Co", preds)),
        "B": fit_random_effects(snapshot, ModelSpec("random_effects", "Co", preds)),
        "C": fit_random_effects(snapshot, ModelSpec("random_effects_time", "Co", preds),
                                time_trend=True),
        "D": fit_fixed_effects(snapshot, ModelSpec("fixed_effects_within", "Co", preds)),
        "E": fit_fixed_effects(snapshot, ModelSpec("fixed_effects_glm", "Co", preds)),
    }


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """One full pipeline run on the bundled snapshot, report bundle written.

    The config keeps its default (relative) output_dir so the provenance echo
    is reproducible; the bundle is written into a session tmp dir.
    """
    from co2panel.pipeline import PipelineConfig, load_config_panel, run_pipeline, write_report

    out = tmp_path_factory.mktemp("pipeline_run")
    config = PipelineConfig()
    report = run_pipeline(config)
    panel = load_config_panel(config)
    json_path = write_report(report, out / "out", panel=panel, figures=True)
    return config, report, json_path


@pytest.fixture(scope="session")
def scenario_pairs(pipeline_run):
    """Selection and the two-scenario forecasts, shared from the pipeline run."""
    _, report, _ = pipeline_run
    return report.phase1.selection, list(report.phase2.scenario_pairs)
