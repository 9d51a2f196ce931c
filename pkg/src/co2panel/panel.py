"""Entity x period x variable panel: loading, validation and basic transforms.

The loader accepts the two shapes that World Development Indicators exports
come in: long form (one row per entity-period, one column per indicator) and
wide form (one row per entity-indicator, one column per year).  The shape is
detected from the header: a header containing the declared period column is
long form, a header containing four-digit year columns is wide form.

After loading, the panel is balanced by restricting every entity to the
longest consecutive run of periods available for all of them.  Individual
cells may still be missing (NaN) until ``impute_missing`` is applied.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllMissingSeries,
    DataError,
    DegenerateSeries,
    EmptyIntersection,
    MissingColumn,
    UnfillableGap,
    UnparseableCell,
)

__all__ = [
    "VariableSpec",
    "PanelDataset",
    "SeriesView",
    "load_panel",
    "impute_missing",
    "standardize_series",
    "correlation_matrix",
    "write_long_csv",
]

_YEAR_RE = re.compile(r"^\s*(\d{4})\s*$")

ROLES = ("dependent", "candidate_predictor", "passthrough")


@dataclass(frozen=True)
class VariableSpec:
    """Maps a short variable code onto an input-file column and a model role."""

    code: str
    source_column: str
    role: str = "candidate_predictor"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")


def validate_variable_specs(specs: Sequence[VariableSpec]) -> None:
    codes = [s.code for s in specs]
    if len(set(codes)) != len(codes):
        raise ValueError("variable codes must be unique")
    n_dep = sum(1 for s in specs if s.role == "dependent")
    if n_dep != 1:
        raise ValueError(f"exactly one variable must have role 'dependent', found {n_dep}")


@dataclass(frozen=True)
class SeriesView:
    """One entity-variable series aligned to the panel periods."""

    entity: str
    variable: str
    values: np.ndarray


class PanelDataset:
    """Immutable dense panel indexed (entity, period, variable)."""

    def __init__(self, entities: Sequence[str], periods: Sequence[int],
                 variables: Sequence[str], values: np.ndarray):
        entities = tuple(str(e) for e in entities)
        periods = tuple(int(p) for p in periods)
        variables = tuple(str(v) for v in variables)
        if len(set(entities)) != len(entities):
            raise DataError("duplicate entities")
        if len(set(periods)) != len(periods):
            raise DataError("duplicate periods")
        if len(set(variables)) != len(variables):
            raise DataError("duplicate variables")
        if any(b - a != 1 for a, b in zip(periods, periods[1:])):
            raise DataError("periods must be strictly increasing consecutive integers")
        values = np.array(values, dtype=float)
        if values.shape != (len(entities), len(periods), len(variables)):
            raise DataError(
                f"values shape {values.shape} does not match "
                f"({len(entities)}, {len(periods)}, {len(variables)})"
            )
        values.setflags(write=False)
        self.entities = entities
        self.periods = periods
        self.variables = variables
        self.values = values
        self._eidx = {e: i for i, e in enumerate(entities)}
        self._vidx = {v: i for i, v in enumerate(variables)}

    # -- shape and lookups -----------------------------------------------

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    @property
    def is_complete(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def require_complete(self) -> None:
        if not self.is_complete:
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise DataError(
                "panel has missing values, e.g. "
                f"({self.entities[bad[0]]}, {self.periods[bad[1]]}, {self.variables[bad[2]]}); "
                "apply impute_missing first"
            )

    def entity_index(self, entity: str) -> int:
        try:
            return self._eidx[entity]
        except KeyError:
            raise DataError(f"unknown entity {entity!r}") from None

    def variable_index(self, code: str) -> int:
        try:
            return self._vidx[code]
        except KeyError:
            raise DataError(f"unknown variable {code!r}") from None

    def series(self, entity: str, variable: str) -> SeriesView:
        vals = self.values[self.entity_index(entity), :, self.variable_index(variable)]
        return SeriesView(entity=entity, variable=variable, values=vals.copy())

    def variable_matrix(self, code: str) -> np.ndarray:
        """(entities x periods) matrix of one variable."""
        return self.values[:, :, self.variable_index(code)].copy()

    def subset_variables(self, codes: Sequence[str]) -> "PanelDataset":
        idx = [self.variable_index(c) for c in codes]
        return PanelDataset(self.entities, self.periods, list(codes), self.values[:, :, idx])

    def subset_entities(self, entities: Sequence[str]) -> "PanelDataset":
        idx = [self.entity_index(e) for e in entities]
        return PanelDataset(list(entities), self.periods, self.variables, self.values[idx, :, :])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PanelDataset):
            return NotImplemented
        return (
            self.entities == other.entities
            and self.periods == other.periods
            and self.variables == other.variables
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


# ---------------------------------------------------------------------------
# loading


def _parse_cell(raw: str, row: int, column: str) -> float:
    raw = raw.strip()
    if raw == "" or raw == "..":
        return float("nan")
    try:
        return float(raw)
    except ValueError:
        raise UnparseableCell(row, column, raw) from None


def _finalize(entity_order: list[str], period_rows: dict[str, dict[int, dict[str, float]]],
              specs: Sequence[VariableSpec]) -> PanelDataset:
    shared: set[int] | None = None
    for entity in entity_order:
        periods = set(period_rows[entity])
        shared = periods if shared is None else shared & periods
    if not shared:
        raise EmptyIntersection("no period is available for every entity")
    periods = _longest_consecutive_run(sorted(shared))

    codes = [s.code for s in specs]
    values = np.full((len(entity_order), len(periods), len(codes)), np.nan)
    for i, entity in enumerate(entity_order):
        for j, period in enumerate(periods):
            row = period_rows[entity].get(period, {})
            for k, code in enumerate(codes):
                values[i, j, k] = row.get(code, float("nan"))
    return PanelDataset(entity_order, periods, codes, values)


def _longest_consecutive_run(sorted_periods: list[int]) -> list[int]:
    best_start, best_len, start = 0, 1, 0
    for i in range(1, len(sorted_periods)):
        if sorted_periods[i] != sorted_periods[i - 1] + 1:
            start = i
        if i - start + 1 > best_len:
            best_start, best_len = start, i - start + 1
    return sorted_periods[best_start: best_start + best_len]


def load_panel(path: str | Path, spec: Sequence[VariableSpec],
               entity_column: str = "country", period_column: str = "year") -> PanelDataset:
    """Load a delimited panel file in long or wide format.

    Returns a balanced panel restricted to the longest consecutive run of
    periods shared by all entities.  Variables follow ``spec`` order; entities
    follow file order of first appearance.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    validate_variable_specs(spec)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        rows = list(reader)

    if entity_column not in header:
        raise MissingColumn(f"entity column {entity_column!r} not in header {header}")

    if period_column in header:
        return _load_long(header, rows, spec, entity_column, period_column)
    year_cols = [h for h in header if _YEAR_RE.match(h)]
    if year_cols:
        return _load_wide(header, rows, spec, entity_column)
    raise MissingColumn(
        f"neither period column {period_column!r} nor four-digit year columns found in header"
    )


def _load_long(header, rows, specs, entity_column, period_column) -> PanelDataset:
    col_idx = {h: i for i, h in enumerate(header)}
    for s in specs:
        if s.source_column not in col_idx:
            raise MissingColumn(f"source column {s.source_column!r} not in file header")
    e_i, p_i = col_idx[entity_column], col_idx[period_column]

    entity_order: list[str] = []
    period_rows: dict[str, dict[int, dict[str, float]]] = {}
    for r, row in enumerate(rows, start=2):
        if not any(cell.strip() for cell in row):
            continue
        entity = row[e_i].strip()
        period = int(_parse_cell(row[p_i], r, period_column))
        if entity not in period_rows:
            entity_order.append(entity)
            period_rows[entity] = {}
        cells = {}
        for s in specs:
            cells[s.code] = _parse_cell(row[col_idx[s.source_column]], r, s.source_column)
        period_rows[entity][period] = cells
    if not entity_order:
        raise DataError("no data rows in file")
    return _finalize(entity_order, period_rows, specs)


def _load_wide(header, rows, specs, entity_column) -> PanelDataset:
    col_idx = {h: i for i, h in enumerate(header)}
    year_cols = [(int(_YEAR_RE.match(h).group(1)), i) for h, i in col_idx.items() if _YEAR_RE.match(h)]
    non_year = [h for h in header if not _YEAR_RE.match(h) and h != entity_column]
    if not non_year:
        raise MissingColumn("wide format needs an indicator column besides entity and years")
    indicator_col = col_idx[non_year[0]]
    e_i = col_idx[entity_column]

    by_source = {s.source_column: s for s in specs}
    seen_sources: set[str] = set()
    entity_order: list[str] = []
    period_rows: dict[str, dict[int, dict[str, float]]] = {}
    for r, row in enumerate(rows, start=2):
        if not any(cell.strip() for cell in row):
            continue
        entity = row[e_i].strip()
        source = row[indicator_col].strip()
        s = by_source.get(source)
        if s is None:
            continue
        seen_sources.add(source)
        if entity not in period_rows:
            entity_order.append(entity)
            period_rows[entity] = {}
        for year, i in year_cols:
            cell = _parse_cell(row[i], r, header[i])
            period_rows[entity].setdefault(year, {})[s.code] = cell
    missing = [s.source_column for s in specs if s.source_column not in seen_sources]
    if missing:
        raise MissingColumn(f"indicator rows not found for source columns: {missing}")
    if not entity_order:
        raise DataError("no data rows in file")
    return _finalize(entity_order, period_rows, specs)


# ---------------------------------------------------------------------------
# writing


def write_long_csv(panel: PanelDataset, path: str | Path,
                   entity_column: str = "country", period_column: str = "year") -> None:
    """Canonical long-format writer with deterministic (entity, period) row order.

    Floats are written with ``repr`` so a write/load round trip is exact.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([entity_column, period_column, *panel.variables])
        for i, entity in enumerate(panel.entities):
            for j, period in enumerate(panel.periods):
                cells = [
                    "" if not np.isfinite(v) else repr(float(v))
                    for v in panel.values[i, j, :]
                ]
                writer.writerow([entity, period, *cells])


# ---------------------------------------------------------------------------
# transforms

POLICIES = ("forward_fill", "linear_interpolate", "drop_period")


def impute_missing(panel: PanelDataset, policy: str = "linear_interpolate") -> PanelDataset:
    """Fill missing cells per (entity, variable) series.

    ``linear_interpolate`` draws straight lines between observed neighbours and
    extends edges with the nearest observation; ``forward_fill`` extends the
    first observation backwards then carries values forward; ``drop_period``
    keeps the longest consecutive run of fully observed periods.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    if panel.is_complete and policy != "drop_period":
        return panel

    values = panel.values.copy()
    n_e, n_t, n_v = values.shape

    if policy == "drop_period":
        ok = np.isfinite(values).all(axis=(0, 2))
        keep = [j for j in range(n_t) if ok[j]]
        if not keep:
            raise UnfillableGap("every period has at least one missing cell")
        run = _longest_consecutive_run([panel.periods[j] for j in keep])
        idx = [panel.periods.index(p) for p in run]
        return PanelDataset(panel.entities, run, panel.variables, values[:, idx, :])

    t = np.arange(n_t, dtype=float)
    for i in range(n_e):
        for k in range(n_v):
            series = values[i, :, k]
            obs = np.isfinite(series)
            if not obs.any():
                raise AllMissingSeries(
                    f"series ({panel.entities[i]}, {panel.variables[k]}) has no observations"
                )
            if obs.all():
                continue
            if policy == "linear_interpolate":
                # np.interp extends edges with the nearest observed value.
                values[i, :, k] = np.interp(t, t[obs], series[obs])
            else:
                first = np.argmax(obs)
                series[:first] = series[first]
                for j in range(1, n_t):
                    if not np.isfinite(series[j]):
                        series[j] = series[j - 1]
    return PanelDataset(panel.entities, panel.periods, panel.variables, values)


def standardize_series(values: Iterable[float]) -> np.ndarray:
    """z-score with the sample (n-1) standard deviation."""
    x = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DegenerateSeries("standardize_series needs a 1-d series of length >= 2")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise DegenerateSeries("constant series cannot be standardized")
    return (x - float(np.mean(x))) / sd


def correlation_matrix(panel: PanelDataset, variables: Sequence[str] | None = None) -> np.ndarray:
    """Pearson correlations pooled over all entity-period rows."""
    codes = list(variables) if variables is not None else list(panel.variables)
    idx = [panel.variable_index(c) for c in codes]
    pooled = panel.values[:, :, idx].reshape(-1, len(idx))
    if not np.isfinite(pooled).all():
        raise DataError("correlation_matrix requires a complete panel")
    sd = pooled.std(axis=0, ddof=1)
    for c, s in zip(codes, sd):
        if not s > 0:
            raise DegenerateSeries(f"variable {c!r} has zero pooled variance")
    corr = np.corrcoef(pooled, rowvar=False)
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr
