"""Exception hierarchy shared by every module.

Errors are grouped into three families that map onto the CLI exit codes and
stderr prefixes: configuration/usage problems (``E_CONFIG``, exit 1), data
problems (``E_DATA``, exit 2) and numerical/analysis failures (``E_NUMERIC``,
exit 3).
"""

from __future__ import annotations


class CO2PanelError(Exception):
    """Base class for all package errors."""

    prefix = "E_NUMERIC"
    exit_code = 3


class ConfigError(CO2PanelError):
    """Invalid configuration or command usage."""

    prefix = "E_CONFIG"
    exit_code = 1


class DataError(CO2PanelError):
    """Malformed, inconsistent or insufficient input data."""

    prefix = "E_DATA"
    exit_code = 2


class NumericError(CO2PanelError):
    """A computation could not be carried out or gave a degenerate result."""

    prefix = "E_NUMERIC"
    exit_code = 3


# --- data ingestion and panel handling ---------------------------------------

class MissingColumn(DataError):
    """A declared source column is absent from the input file."""


class UnparseableCell(DataError):
    """A value cell could not be parsed as a number."""

    def __init__(self, row: int, column: str, raw: str):
        super().__init__(f"row {row}, column {column!r}: cannot parse {raw!r} as a number")
        self.row = row
        self.column = column
        self.raw = raw


class EmptyIntersection(DataError):
    """No period is shared by all entities."""


class AllMissingSeries(DataError):
    """An entity-variable series has no observed values at all."""


class UnfillableGap(DataError):
    """The drop_period policy removed every period."""


class DegenerateSeries(DataError):
    """A series with zero variance where variation is required."""


class UnbalancedPanel(DataError):
    """An operation that requires a balanced panel received an unbalanced one."""


class UnlabeledEntity(DataError):
    """A panel entity has no cluster label."""


class LengthMismatch(DataError):
    """Sequences that must share a length do not."""


class EmptySequence(DataError):
    """An empty sequence where at least one observation is required."""


class HorizonExogMismatch(DataError):
    """Future exogenous rows do not match the forecast horizon or the fit."""


# --- numerics and estimation --------------------------------------------------

class RankDeficient(NumericError):
    """The design matrix does not have full column rank."""

    def __init__(self, rank: int, column: int):
        super().__init__(f"design matrix is rank deficient (rank {rank}, first dependent column {column})")
        self.rank = rank
        self.column = column


class InsufficientObservations(NumericError):
    """Fewer observations than parameters."""


class NonPositiveVariance(NumericError):
    """A variance that must be strictly positive is not."""


class DegenerateVariance(NumericError):
    """A variance component estimate collapsed to a non-positive value."""


class InvalidDegreesOfFreedom(NumericError):
    """Degrees of freedom must be positive and finite."""


class NotNested(NumericError):
    """The restricted model is not nested in the extended one."""


class IncompatibleFits(NumericError):
    """Two fits do not share the coefficients being contrasted."""


class IncomparableFits(NumericError):
    """Fits with different dependent variables or observation counts."""


class NoSignificantFeatures(NumericError):
    """No predictor survived the significance screen."""


# --- time series --------------------------------------------------------------

class SeriesTooShort(NumericError):
    """Not enough observations left after differencing."""


class OptimizerFailure(NumericError):
    """The likelihood optimizer failed to produce a usable solution."""


class BandTooNarrow(NumericError):
    """A warping band narrower than the length difference of the inputs."""


class EmptyCluster(NumericError):
    """A cluster lost all members twice during refinement."""
