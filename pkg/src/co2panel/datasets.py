"""Bundled data snapshot and the default variable mapping.

The package ships a frozen extract of national indicators for 20 high-HDI
countries over 1990-2014 (see ``tools/build_snapshot.py`` in the repository
for how the file is produced).  The default variable spec maps the nine
modeled indicators; the per-capita CO2 column is present in the file and can
be loaded by adding a passthrough spec for ``co2_t_pc``.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .panel import PanelDataset, VariableSpec, load_panel

__all__ = ["DEFAULT_VARIABLES", "DEPENDENT_CODE", "snapshot_path", "load_snapshot"]

DEPENDENT_CODE = "Co"

DEFAULT_VARIABLES = (
    VariableSpec("Co", "co2_kt", "dependent"),
    VariableSpec("EU", "energy_use_kg_pc"),
    VariableSpec("RE", "renewables_pct"),
    VariableSpec("EP", "fossil_electricity_pct"),
    VariableSpec("F", "forest_km2"),
    VariableSpec("Fa", "forest_pct"),
    VariableSpec("EPC", "power_use_kwh_pc"),
    VariableSpec("G", "gdp_per_energy"),
    VariableSpec("TG", "ghg_kt"),
)

PREDICTOR_CODES = tuple(s.code for s in DEFAULT_VARIABLES if s.role == "candidate_predictor")


def snapshot_path() -> Path:
    """Filesystem path of the bundled snapshot CSV."""
    with resources.as_file(resources.files("co2panel.data") / "wdi_snapshot.csv") as p:
        return Path(p)


def load_snapshot() -> PanelDataset:
    """Load the bundled snapshot with the default variable mapping."""
    return load_panel(snapshot_path(), DEFAULT_VARIABLES,
                      entity_column="country", period_column="year")
