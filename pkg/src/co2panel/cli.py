"""Batch command-line interface.

Subcommands: run, phase1, phase2, fit, test, forecast, cluster, validate-data.
Errors print a stable machine-parseable prefix (E_CONFIG, E_DATA, E_NUMERIC)
to stderr and map onto exit codes 1, 2 and 3 respectively; success returns 0.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .datasets import snapshot_path
from .errors import CO2PanelError, ConfigError
from .estimators import fit_fixed_effects, fit_pooled_ols, fit_random_effects, significance_stars
from .pipeline import (
    MODEL_LABELS,
    PipelineConfig,
    load_config_panel,
    run_phase1,
    run_phase2,
    run_pipeline,
    report_to_dict,
    write_report,
    _jsonify,
    _spec,
)
from .spectests import breusch_pagan_panel, hausman, wald_time_effects

__all__ = ["main", "entry_point"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="co2panel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--input", help="input CSV (overrides config)")
        p.add_argument("--output", help="output directory (overrides config)")
        p.add_argument("--alpha", type=float, help="significance level")
        p.add_argument("--seed", type=int, help="random seed recorded in the report")
        p.add_argument("--no-figures", action="store_true", help="skip SVG figure output")

    p_run = sub.add_parser("run", help="full two-phase pipeline")
    add_common(p_run)

    p_p1 = sub.add_parser("phase1", help="model fits, tests and feature selection only")
    add_common(p_p1)

    p_p2 = sub.add_parser("phase2", help="forecasting and clustering from a saved selection")
    add_common(p_p2)
    p_p2.add_argument("--selection", required=True,
                      help="JSON file with the selected feature codes")

    p_fit = sub.add_parser("fit", help="fit a single model (A..E)")
    add_common(p_fit)
    p_fit.add_argument("--model", required=True, choices=sorted(MODEL_LABELS))

    p_test = sub.add_parser("test", help="run one specification test")
    add_common(p_test)
    p_test.add_argument("which", choices=["bp", "wald", "hausman"])

    p_fc = sub.add_parser("forecast", help="two-scenario forecast for one country")
    add_common(p_fc)
    p_fc.add_argument("--country", required=True)

    p_cl = sub.add_parser("cluster", help="DTW clustering of emission trends")
    add_common(p_cl)
    p_cl.add_argument("--k", type=int, default=None, help="number of clusters")

    p_val = sub.add_parser("validate-data", help="load and validate the input panel")
    add_common(p_val)
    return parser


def _load_config(args) -> PipelineConfig:
    overrides = {
        "input_path": args.input,
        "output_dir": args.output,
        "alpha": args.alpha,
        "seed": args.seed,
    }
    if args.config:
        return PipelineConfig.from_toml(args.config, **overrides)
    return PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})


def _print_fit(fit) -> None:
    print(f"model kind: {fit.spec.kind}")
    print(f"{'term':<14}{'estimate':>16}{'std error':>16}{'statistic':>12}{'p-value':>12}  sig")
    for row in fit.coefficients:
        print(f"{row.term:<14}{row.estimate:>16.6g}{row.std_error:>16.6g}"
              f"{row.statistic:>12.4f}{row.p_value:>12.4g}  {significance_stars(row.p_value)}")
    s = fit.fit
    print(f"n={s.n_obs}  R2={s.r_squared:.6f}  adjR2={s.adj_r_squared:.6f}  "
          f"F={s.f_statistic:.4f} (p={s.f_pvalue:.4g})")
    print(f"logLik={s.log_likelihood:.4f}  AIC={s.aic:.4f}  BIC={s.bic:.4f}  "
          f"TSS={s.total_ss:.6g}  RSS={s.residual_ss:.6g}")


_PREFIX_CODES = {"E_CONFIG": 1, "E_DATA": 2, "E_NUMERIC": 3}


def _cmd_run(args) -> int:
    config = _load_config(args)
    report = run_pipeline(config)
    panel = load_config_panel(config)
    path = write_report(report, config.output_dir, panel=panel, figures=not args.no_figures)
    if report.incomplete:
        print(report.incomplete, file=sys.stderr)
        print(f"partial report written to {path}", file=sys.stderr)
        prefix = report.incomplete.split(":", 1)[0]
        return _PREFIX_CODES.get(prefix, 3)
    print(f"report written to {path}")
    return 0


def _cmd_phase1(args) -> int:
    config = _load_config(args)
    panel = load_config_panel(config)
    result = run_phase1(panel, config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "selected_model": result.selected_model,
        "selection": _jsonify(result.selection),
        "decision_trace": _jsonify(result.decision_trace),
        "tests": {k: _jsonify(v) for k, v in sorted(result.tests.items())},
    }
    (out / "phase1.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    for step in result.decision_trace:
        print(f"{step.step}: statistic={step.statistic:.4f} p={step.p_value:.4g} "
              f"{step.decision} -> {step.branch}")
    print(f"selected features: {', '.join(result.selection.selected)}")
    print(f"phase-1 summary written to {out / 'phase1.json'}")
    return 0


def _cmd_phase2(args) -> int:
    config = _load_config(args)
    panel = load_config_panel(config)
    sel_path = Path(args.selection)
    if not sel_path.exists():
        raise ConfigError(f"selection file not found: {sel_path}")
    raw = json.loads(sel_path.read_text())
    if isinstance(raw, dict):
        codes = raw.get("selected") or raw.get("selection", {}).get("selected")
    else:
        codes = raw
    if not isinstance(codes, list) or not codes:
        raise ConfigError("selection file must hold a non-empty list of codes")
    from .selection import SelectionReport
    selection = SelectionReport(
        source_model=None, alpha=config.alpha,
        significant=tuple((c, 0.0) for c in codes),
        dropped_collinear=(), selected=tuple(codes),
    )
    result = run_phase2(panel, selection, config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_better = sum(
        1 for p in result.scenario_pairs
        if p.selected_features.rmse < p.all_features.rmse
    )
    print(f"forecasted {len(result.scenario_pairs)} countries; selected features "
          f"improved RMSE for {n_better}")
    print(f"clusters: {result.clusters.labels}")
    return 0


def _cmd_fit(args) -> int:
    config = _load_config(args)
    panel = load_config_panel(config)
    kind = MODEL_LABELS[args.model]
    spec = _spec(config, kind)
    if kind == "pooled_ols":
        fit = fit_pooled_ols(panel, spec)
    elif kind.startswith("random_effects"):
        fit = fit_random_effects(panel, spec, time_trend=(kind == "random_effects_time"))
    else:
        fit = fit_fixed_effects(panel, spec)
    _print_fit(fit)
    return 0


def _cmd_test(args) -> int:
    config = _load_config(args)
    panel = load_config_panel(config)
    if args.which == "bp":
        fit = fit_pooled_ols(panel, _spec(config, "pooled_ols"))
        result = breusch_pagan_panel(fit, panel, config.alpha)
    elif args.which == "wald":
        base = fit_random_effects(panel, _spec(config, "random_effects"), time_trend=False)
        time = fit_random_effects(panel, _spec(config, "random_effects_time"), time_trend=True)
        result = wald_time_effects(base, time, config.alpha)
    else:
        fe = fit_fixed_effects(panel, _spec(config, "fixed_effects_within"))
        re = fit_random_effects(panel, _spec(config, "random_effects"), time_trend=False)
        result = hausman(fe, re, config.alpha)
    print(json.dumps(_jsonify(dataclasses.asdict(result)), indent=2, sort_keys=True))
    return 0


def _cmd_forecast(args) -> int:
    config = _load_config(args)
    panel = load_config_panel(config)
    if args.country not in panel.entities:
        raise ConfigError(f"unknown country {args.country!r}")
    from .sarimax import run_two_scenarios
    sub = panel.subset_entities([args.country])
    phase1 = run_phase1(panel, config)
    pairs = run_two_scenarios(
        sub, phase1.selection.selected, config.predictors,
        config.split_year, config.forecast_horizon,
        dependent=config.dependent,
        p_range=config.p_range, d_range=config.d_range, q_range=config.q_range,
    )
    pair = pairs[0]
    for rep, order in ((pair.all_features, pair.order_all),
                       (pair.selected_features, pair.order_selected)):
        print(f"{rep.scenario}: order {order.label()}  RMSE={rep.rmse:.4f}  "
              f"MAE={rep.mae:.4f}  NRMSE={rep.nrmse:.4f}")
        print(f"  forecasts: {[round(float(v), 2) for v in rep.point_forecasts]}")
        print(f"  actuals:   {[round(float(v), 2) for v in rep.actuals]}")
    return 0


def _cmd_cluster(args) -> int:
    config = _load_config(args)
    if args.k is not None:
        config = dataclasses.replace(config, k_clusters=args.k)
    panel = load_config_panel(config)
    from .clustering import dtw_kcluster
    from .panel import standardize_series
    series = [standardize_series(panel.series(e, config.dependent).values)
              for e in panel.entities]
    report = dtw_kcluster(series, min(config.k_clusters, panel.n_entities),
                          ids=panel.entities)
    for c in range(report.k):
        members = sorted(e for e, lab in report.labels.items() if lab == c)
        print(f"cluster {c}: {', '.join(members)}")
    return 0


def _cmd_validate(args) -> int:
    config = _load_config(args)
    panel = load_config_panel(config)
    panel.require_complete()
    src = config.input_path or str(snapshot_path())
    print(f"{src}: OK")
    print(f"{panel.n_entities} entities x {panel.n_periods} periods x "
          f"{len(panel.variables)} variables")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "phase1": _cmd_phase1,
    "phase2": _cmd_phase2,
    "fit": _cmd_fit,
    "test": _cmd_test,
    "forecast": _cmd_forecast,
    "cluster": _cmd_cluster,
    "validate-data": _cmd_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CO2PanelError as exc:
        print(f"{exc.prefix}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"E_DATA: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry_point()
