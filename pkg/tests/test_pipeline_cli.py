"""Pipeline orchestration, config handling and the command-line surface."""

import json
import numpy as np
import pytest

from co2panel.cli import main
from co2panel.errors import ConfigError
from co2panel.panel import PanelDataset, VariableSpec, write_long_csv
from co2panel.pipeline import (
    PipelineConfig,
    load_config_panel,
    run_phase1,
    run_phase2,
    run_pipeline,
    write_report,
)

from conftest import make_panel


def tiny_dataset(tmp_path, seed=1, entity_sd=4.0, entity_corr=3.0, time_shock=0.0):
    rng = np.random.default_rng(seed)
    E, T = 4, 14
    mu = rng.normal(0, 1.5, (E, 1, 2))
    X = mu + rng.normal(0, 1, (E, T, 2))
    alpha = rng.normal(0, entity_sd, E) + entity_corr * mu[:, 0, 0]
    y = X @ np.array([2.0, -1.5]) + alpha[:, None] + rng.normal(0, 0.4, (E, T))
    if time_shock:
        y += time_shock * rng.normal(0, 1, (1, T))
    vals = np.concatenate([y[:, :, None], X], axis=2)
    panel = PanelDataset([f"c{i}" for i in range(E)], range(2001, 2001 + T),
                         ["y", "x1", "x2"], vals)
    path = tmp_path / "tiny.csv"
    write_long_csv(panel, path, "country", "year")
    return panel, path


TINY_VARS = (VariableSpec("y", "y", "dependent"), VariableSpec("x1", "x1"),
             VariableSpec("x2", "x2"))


def tiny_config(path, **overrides):
    defaults = dict(
        input_path=str(path), variables=TINY_VARS, k_clusters=2,
        p_range=(0, 1), d_range=(0, 1), q_range=(0, 1), output_dir="out",
    )
    defaults.update(overrides)
    return PipelineConfig(**defaults)


class TestConfig:
    def test_from_toml(self, tmp_path):
        cfg_path = tmp_path / "cfg.toml"
        cfg_path.write_text(
            '[data]\ninput = "panel.csv"\nmissing_policy = "forward_fill"\n'
            '[data.variables]\ny = { column = "dep", role = "dependent" }\n'
            'x = { column = "expl" }\n'
            "[phase1]\nalpha = 0.01\ncorr_threshold = 0.9\n"
            "[phase2]\nhorizon = 2\nk_clusters = 4\np_range = [0, 1]\n"
            '[output]\ndirectory = "results"\nseed = 7\n'
        )
        cfg = PipelineConfig.from_toml(cfg_path)
        assert cfg.input_path == "panel.csv"
        assert cfg.alpha == 0.01 and cfg.corr_threshold == 0.9
        assert cfg.forecast_horizon == 2 and cfg.k_clusters == 4
        assert cfg.p_range == (0, 1)
        assert cfg.output_dir == "results" and cfg.seed == 7
        assert cfg.dependent == "y" and cfg.predictors == ("x",)

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            PipelineConfig.from_toml("missing.toml")

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text("[phase1]\nalhpa = 0.05\n")
        with pytest.raises(ConfigError):
            PipelineConfig.from_toml(p)

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            PipelineConfig(alpha=1.5)
        with pytest.raises(ConfigError):
            PipelineConfig(k_clusters=0)
        with pytest.raises(ConfigError):
            PipelineConfig(forecast_horizon=0)


class TestPhase1Branches:
    def test_snapshot_trace(self, snapshot):
        config = PipelineConfig()
        result = run_phase1(snapshot, config)
        steps = [(s.step, s.decision) for s in result.decision_trace]
        assert steps[0] == ("breusch_pagan", "reject_null")
        assert steps[1] == ("wald_time_effects", "fail_to_reject")
        assert steps[2] == ("hausman", "reject_null")
        assert result.selected_model == "E"
        assert set(result.selection.selected) == {"RE", "G", "TG", "F"}
        assert result.comparison[0].fit.spec.kind == "fixed_effects_glm"

    def test_no_entity_effects_stops_at_pooled(self, tmp_path):
        # iid noise, no entity structure: the entity-effects test has its
        # nominal 5% size, so pick a seed on the fail-to-reject side
        rng = np.random.default_rng(20)
        E, T = 6, 12
        X = rng.normal(0, 1, (E, T, 2))
        y = X @ np.array([2.0, -1.5]) + rng.normal(0, 0.5, (E, T))
        panel = make_panel([f"c{i}" for i in range(E)], range(2000, 2000 + T),
                           ["y", "x1", "x2"], np.concatenate([y[:, :, None], X], axis=2))
        config = tiny_config("unused")
        result = run_phase1(panel, config)
        assert result.decision_trace[0].decision == "fail_to_reject"
        assert result.selected_model == "A"
        assert "B" not in result.fits
        assert result.selection.selected == ("x1", "x2")

    def test_uncorrelated_effects_end_at_random_effects(self, tmp_path):
        panel, _ = tiny_dataset(tmp_path, seed=6, entity_sd=5.0, entity_corr=0.0)
        result = run_phase1(panel, tiny_config("unused"))
        steps = {s.step: s.decision for s in result.decision_trace}
        assert steps["breusch_pagan"] == "reject_null"
        assert steps["hausman"] == "fail_to_reject"
        assert result.selected_model in ("B", "C")
        assert "E" not in result.fits

    def test_trace_consistent_with_tests(self, snapshot):
        result = run_phase1(snapshot, PipelineConfig())
        by_name = {s.step: s for s in result.decision_trace}
        assert by_name["breusch_pagan"].decision == result.tests["breusch_pagan"].decision
        assert by_name["wald_time_effects"].decision == result.tests["wald"].decision
        assert by_name["hausman"].decision == result.tests["hausman"].decision


class TestPhase2:
    def test_single_entity_degenerates_with_warning(self, tmp_path):
        panel, path = tiny_dataset(tmp_path)
        single = panel.subset_entities(["c0"])
        config = tiny_config(path, k_clusters=3)
        result = run_phase1(panel, config)
        with pytest.warns(UserWarning):
            phase2 = run_phase2(single, result.selection, config)
        assert phase2.clusters.k == 1
        assert len(phase2.scenario_pairs) == 1

    def test_identical_series_cluster_together(self, tmp_path):
        panel, path = tiny_dataset(tmp_path)
        base = panel.values[0]
        vals = np.stack([base, base], axis=0)
        twins = PanelDataset(["a", "b"], panel.periods, panel.variables, vals)
        config = tiny_config(path, k_clusters=1)
        selection = run_phase1(panel, config).selection
        phase2 = run_phase2(twins, selection, config)
        assert phase2.clusters.labels == {"a": 0, "b": 0}
        pair_a, pair_b = phase2.scenario_pairs
        assert np.allclose(pair_a.selected_features.point_forecasts,
                           pair_b.selected_features.point_forecasts)


class TestPartialReport:
    def test_phase1_failure_flags_incomplete(self, tmp_path):
        # duplicated predictor column: rank-deficient design aborts phase 1
        rng = np.random.default_rng(2)
        E, T = 3, 10
        x = rng.normal(0, 1, (E, T))
        y = 2 * x + rng.normal(0, 1, (E, T))
        panel = PanelDataset([f"c{i}" for i in range(E)], range(2000, 2000 + T),
                             ["y", "x1", "x2"], np.stack([y, x, x], axis=-1))
        path = tmp_path / "dup.csv"
        write_long_csv(panel, path, "country", "year")
        config = PipelineConfig(input_path=str(path), variables=TINY_VARS)
        report = run_pipeline(config)
        assert report.incomplete and report.incomplete.startswith("E_NUMERIC")
        assert report.phase1 is None and report.phase2 is None
        out = write_report(report, tmp_path / "out", panel=panel, figures=False)
        doc = json.loads(out.read_text())
        assert doc["incomplete"].startswith("E_NUMERIC")

    def test_cli_run_exit_code_on_partial(self, tmp_path, capsys, monkeypatch):
        rng = np.random.default_rng(2)
        x = rng.normal(0, 1, (3, 10))
        panel = PanelDataset(["a", "b", "c"], range(2000, 2010),
                             ["y", "x1", "x2"],
                             np.stack([2 * x, x, x], axis=-1))
        path = tmp_path / "dup.csv"
        write_long_csv(panel, path, "country", "year")
        cfg = tmp_path / "cfg.toml"
        cfg.write_text(
            f'[data]\ninput = "{path}"\n[data.variables]\n'
            'y = { column = "y", role = "dependent" }\n'
            'x1 = { column = "x1" }\nx2 = { column = "x2" }\n'
        )
        monkeypatch.chdir(tmp_path)
        code = main(["run", "--config", str(cfg), "--no-figures"])
        assert code == 3
        err = capsys.readouterr().err
        assert "E_NUMERIC" in err and "partial report" in err
        assert (tmp_path / "out" / "report.json").exists()


class TestReportBundle:
    def test_files_and_json(self, tmp_path):
        panel, path = tiny_dataset(tmp_path)
        config = tiny_config(path)
        report = run_pipeline(config)
        out = write_report(report, tmp_path / "out", panel=load_config_panel(config))
        doc = json.loads(out.read_text())
        assert set(doc) == {"phase1", "phase2", "provenance", "incomplete"}
        assert doc["incomplete"] is None
        assert doc["provenance"]["input_checksum_sha256"]
        tables = {p.name for p in (tmp_path / "out" / "tables").glob("*.csv")}
        for expected in ("model_a_pooled_ols_coefficients.csv", "specification_tests.csv",
                         "feature_selection.csv", "forecast_metrics.csv",
                         "nrmse_comparison.csv", "forecast_paths.csv", "cluster_labels.csv",
                         "cluster_centers.csv", "cluster_center_distances.csv",
                         "member_warping_paths.csv", "member_cost_grids.csv",
                         "cluster_feature_summary.csv", "dendrogram_merges.csv",
                         "correlation_matrix.csv", "summary_statistics.csv"):
            assert expected in tables, expected
        figures = list((tmp_path / "out" / "figures").glob("*.svg"))
        assert any(f.name == "dendrogram.svg" for f in figures)
        assert any(f.name.startswith("nrmse") for f in figures)
        assert any(f.name.startswith("forecast_") for f in figures)
        assert any(f.name.startswith("dtw_") for f in figures)


class TestCLI:
    def test_missing_config_exit_1(self, capsys):
        code = main(["run", "--config", "missing.toml"])
        assert code == 1
        assert "E_CONFIG" in capsys.readouterr().err

    def test_usage_error_exit_1(self, capsys):
        code = main(["fit"])  # --model required
        assert code == 1
        assert "E_CONFIG" in capsys.readouterr().err

    def test_data_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("country,year,co2_kt\nA,1990,oops\n")
        code = main(["validate-data", "--input", str(bad)])
        assert code == 2
        assert "E_DATA" in capsys.readouterr().err

    def test_validate_data_snapshot(self, capsys):
        code = main(["validate-data"])
        assert code == 0
        out = capsys.readouterr().out
        assert "20 entities x 25 periods x 9 variables" in out

    def test_fit_model_a(self, capsys):
        code = main(["fit", "--model", "A"])
        assert code == 0
        out = capsys.readouterr().out
        assert "pooled_ols" in out and "TG" in out

    def test_test_subcommand_bp(self, capsys):
        code = main(["test", "bp"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["decision"] == "reject_null"

    def test_cluster_subcommand(self, capsys):
        code = main(["cluster", "--k", "3"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("cluster ") == 3

    def _write_tiny_config(self, tmp_path, data_path):
        cfg = tmp_path / "tiny.toml"
        cfg.write_text(
            f'[data]\ninput = "{data_path}"\n'
            "[data.variables]\n"
            'y = { column = "y", role = "dependent" }\n'
            'x1 = { column = "x1" }\nx2 = { column = "x2" }\n'
            "[phase2]\nk_clusters = 2\np_range = [0, 1]\nd_range = [0, 1]\nq_range = [0, 1]\n"
            '[output]\ndirectory = "out"\n'
        )
        return cfg

    def test_run_and_rerun_byte_identical(self, tmp_path, capsys, monkeypatch):
        _, data_path = tiny_dataset(tmp_path)
        cfg = self._write_tiny_config(tmp_path, data_path)
        for sub in ("run1", "run2"):
            workdir = tmp_path / sub
            workdir.mkdir()
            monkeypatch.chdir(workdir)
            assert main(["run", "--config", str(cfg), "--no-figures"]) == 0
        a = (tmp_path / "run1" / "out" / "report.json").read_bytes()
        b = (tmp_path / "run2" / "out" / "report.json").read_bytes()
        assert a == b

    def test_phase1_subcommand(self, tmp_path, capsys, monkeypatch):
        _, data_path = tiny_dataset(tmp_path)
        cfg = self._write_tiny_config(tmp_path, data_path)
        workdir = tmp_path / "p1"
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        assert main(["phase1", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "selected features:" in out
        doc = json.loads((workdir / "out" / "phase1.json").read_text())
        assert doc["selection"]["selected"]

    def test_phase2_subcommand_with_selection_file(self, tmp_path, capsys, monkeypatch):
        _, data_path = tiny_dataset(tmp_path)
        cfg = self._write_tiny_config(tmp_path, data_path)
        sel = tmp_path / "selection.json"
        sel.write_text('["x1", "x2"]')
        monkeypatch.chdir(tmp_path)
        assert main(["phase2", "--config", str(cfg), "--selection", str(sel)]) == 0
        assert "forecasted 4 countries" in capsys.readouterr().out

    def test_forecast_subcommand(self, tmp_path, capsys, monkeypatch):
        _, data_path = tiny_dataset(tmp_path)
        cfg = self._write_tiny_config(tmp_path, data_path)
        monkeypatch.chdir(tmp_path)
        assert main(["forecast", "--config", str(cfg), "--country", "c1"]) == 0
        out = capsys.readouterr().out
        assert "all_features" in out and "selected_features" in out
