"""co2panel: panel econometrics, SARIMAX forecasting and DTW trend clustering
for national CO2 emission indicators."""

__version__ = "0.1.0"
