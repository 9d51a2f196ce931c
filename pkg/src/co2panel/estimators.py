"""The five panel regression models and their comparison.

Model A  pooled OLS on all stacked entity-period rows
Model B  random effects (Swamy-Arora feasible GLS)
Model C  random effects plus period dummies (time trend)
Model D  linear regression with entity fixed effects (within / LSDV)
Model E  Gaussian GLM with entity fixed effects (identical coefficients to D)

Likelihood accounting, which drives the AIC/BIC model comparison: every model
counts its variance parameters in ``n_params`` (one sigma^2 for A/D/E, two
components for B/C).  Models A and D evaluate the Gaussian likelihood at the
dof-corrected variance RSS/(n - p) that also underlies their standard errors;
Model E, as a GLM, evaluates it at the maximum-likelihood variance RSS/n.
The two fixed-effects models therefore share coefficients and differ only in
this bookkeeping, with E attaining the strictly larger likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateVariance,
    IncomparableFits,
    InsufficientObservations,
)
from .numerics import (
    Distribution,
    f_dist,
    gaussian_loglik,
    solve_least_squares,
    standard_normal,
    student_t,
    tail_probability,
)
from .panel import PanelDataset

__all__ = [
    "ModelSpec",
    "CoefficientRow",
    "FitStats",
    "FitResult",
    "fit_pooled_ols",
    "fit_random_effects",
    "fit_fixed_effects",
    "fit_model",
    "compare_models",
    "ComparisonEntry",
    "significance_stars",
]

MODEL_KINDS = (
    "pooled_ols",
    "random_effects",
    "random_effects_time",
    "fixed_effects_within",
    "fixed_effects_glm",
)


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    dependent: str
    predictors: tuple[str, ...]
    include_intercept: bool = True

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"kind must be one of {MODEL_KINDS}, got {self.kind!r}")
        preds = tuple(self.predictors)
        object.__setattr__(self, "predictors", preds)
        if not preds:
            raise ValueError("predictors must be non-empty")
        if len(set(preds)) != len(preds):
            raise ValueError("predictors must be distinct")
        if self.dependent in preds:
            raise ValueError("dependent variable cannot be a predictor")


@dataclass(frozen=True)
class CoefficientRow:
    term: str
    estimate: float
    std_error: float
    statistic: float
    p_value: float


@dataclass(frozen=True)
class FitStats:
    r_squared: float
    adj_r_squared: float
    f_statistic: float
    f_pvalue: float
    total_ss: float
    residual_ss: float
    log_likelihood: float
    aic: float
    bic: float
    n_obs: int
    n_params: int


@dataclass(frozen=True)
class FitResult:
    spec: ModelSpec
    coefficients: tuple[CoefficientRow, ...]
    fit: FitStats
    entity_effects: dict[str, float] | None = None
    variance_components: tuple[float, float] | None = None
    # slope covariance over spec.predictors (needed by the Hausman contrast)
    slope_covariance: np.ndarray | None = None
    # error-variance estimate behind the reported standard errors
    sigma2_hat: float = 0.0
    # reference distribution family used for per-coefficient p-values
    reference: Distribution | None = None
    residuals: np.ndarray | None = None
    n_entities: int = 0
    n_periods: int = 0
    design_df: int = 0  # mean parameters in the design
    notes: tuple[str, ...] = ()

    def coefficient(self, term: str) -> CoefficientRow:
        for row in self.coefficients:
            if row.term == term:
                return row
        raise KeyError(f"no coefficient for term {term!r}")

    def slope_estimates(self) -> np.ndarray:
        return np.array([self.coefficient(c).estimate for c in self.spec.predictors])

    def p_values(self) -> dict[str, float]:
        return {row.term: row.p_value for row in self.coefficients}


def significance_stars(p_value: float) -> str:
    """Stars at the 0.05 / 0.01 / 0.001 levels."""
    if p_value < 0.001:
        return "***"
    if p_value < 0.01:
        return "**"
    if p_value < 0.05:
        return "*"
    return ""


# ---------------------------------------------------------------------------
# design-matrix helpers


def _stacked(panel: PanelDataset, spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Entity-major stacked (y, X) without intercept."""
    panel.require_complete()
    y = panel.variable_matrix(spec.dependent).reshape(-1)
    cols = [panel.variable_matrix(c).reshape(-1) for c in spec.predictors]
    X = np.column_stack(cols)
    return y, X


def _period_dummies(panel: PanelDataset) -> tuple[np.ndarray, list[str]]:
    """T-1 period indicators, first period absorbed."""
    n_e, n_t = panel.n_entities, panel.n_periods
    base = np.zeros((n_t, n_t - 1))
    for j in range(1, n_t):
        base[j, j - 1] = 1.0
    D = np.tile(base, (n_e, 1))
    names = [f"period:{p}" for p in panel.periods[1:]]
    return D, names


def _aic_bic(ll: float, n_params: int, n_obs: int) -> tuple[float, float]:
    return 2.0 * n_params - 2.0 * ll, n_params * math.log(n_obs) - 2.0 * ll


def _coef_rows(names, beta, se, ref: Distribution) -> tuple[CoefficientRow, ...]:
    rows = []
    for name, b, s in zip(names, beta, se):
        stat = b / s if s > 0 else math.inf
        p = tail_probability(stat, ref, sides="two")
        rows.append(CoefficientRow(name, float(b), float(s), float(stat), float(p)))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Model A: pooled OLS


def fit_pooled_ols(panel: PanelDataset, spec: ModelSpec) -> FitResult:
    """Stack all entity-period rows into a single classical OLS regression."""
    if spec.kind != "pooled_ols":
        raise ValueError(f"spec.kind must be 'pooled_ols', got {spec.kind!r}")
    y, X_vars = _stacked(panel, spec)
    names = list(spec.predictors)
    if spec.include_intercept:
        X = np.column_stack([np.ones(len(y)), X_vars])
        names = ["(Intercept)", *names]
    else:
        X = X_vars
    n, p = X.shape
    if n <= p:
        raise InsufficientObservations(f"{n} observations for {p} parameters")

    sol = solve_least_squares(X, y)
    dof = n - p
    sigma2 = sol.residual_sum_squares / dof
    se = np.sqrt(sigma2 * np.diag(sol.covariance_unscaled))
    ref = student_t(dof)
    rows = _coef_rows(names, sol.coefficients, se, ref)

    tss = float(np.sum((y - y.mean()) ** 2)) if spec.include_intercept else float(y @ y)
    rss = sol.residual_sum_squares
    k_slopes = len(spec.predictors)
    r2 = 1.0 - rss / tss
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    fstat = ((tss - rss) / k_slopes) / (rss / dof)
    fpval = tail_probability(fstat, f_dist(k_slopes, dof))

    ll = gaussian_loglik(sol.residuals, sigma2)
    n_params = p + 1
    aic, bic = _aic_bic(ll, n_params, n)

    offset = 1 if spec.include_intercept else 0
    slope_cov = sigma2 * sol.covariance_unscaled[offset:, offset:]

    return FitResult(
        spec=spec,
        coefficients=rows,
        fit=FitStats(r2, adj, fstat, fpval, tss, rss, ll, aic, bic, n, n_params),
        slope_covariance=slope_cov,
        sigma2_hat=float(sigma2),
        reference=ref,
        residuals=sol.residuals,
        n_entities=panel.n_entities,
        n_periods=panel.n_periods,
        design_df=p,
    )


# ---------------------------------------------------------------------------
# Models B and C: Swamy-Arora random effects


def fit_random_effects(panel: PanelDataset, spec: ModelSpec, time_trend: bool = False) -> FitResult:
    """Two-step feasible GLS with Swamy-Arora variance components.

    sigma^2_eps comes from the within residuals, sigma^2_u from the between
    regression (clamped at zero when negative); the data are quasi-demeaned by
    theta = 1 - sqrt(sigma^2_eps / (T sigma^2_u + sigma^2_eps)) and fitted by
    OLS.  Inference uses the normal reference distribution (z-values).
    """
    expected = "random_effects_time" if time_trend else "random_effects"
    if spec.kind != expected:
        raise ValueError(f"spec.kind must be {expected!r} for time_trend={time_trend}")
    if panel.n_periods < 2:
        raise InsufficientObservations("random effects needs at least 2 periods per entity")

    y, X_vars = _stacked(panel, spec)
    n_e, n_t = panel.n_entities, panel.n_periods
    n = len(y)
    k = X_vars.shape[1]
    names = list(spec.predictors)

    dummies = None
    if time_trend:
        dummies, dnames = _period_dummies(panel)
        names = names + dnames

    # within step for sigma^2_eps
    def ent_mean(a):
        return a.reshape(n_e, n_t, -1).mean(axis=1)

    Xw_parts = [X_vars] if dummies is None else [X_vars, dummies]
    Xw = np.column_stack(Xw_parts)
    Xw_dem = Xw - np.repeat(ent_mean(Xw), n_t, axis=0)
    y_dem = y - np.repeat(ent_mean(y).reshape(-1), n_t)
    within = solve_least_squares(Xw_dem, y_dem)
    k_within = Xw.shape[1]
    dof_within = n - n_e - k_within
    if dof_within <= 0:
        raise InsufficientObservations("not enough observations for the within step")
    sigma2_eps = within.residual_sum_squares / dof_within
    if not sigma2_eps > 0:
        raise DegenerateVariance("within residual variance is not positive")

    # between step for sigma^2_u (period dummies have equal entity means, so
    # they are collinear with the intercept and stay out of this regression)
    Xb = np.column_stack([np.ones(n_e), ent_mean(X_vars)])
    yb = ent_mean(y).reshape(-1)
    if n_e <= k + 1:
        raise InsufficientObservations("too few entities for the between step")
    between = solve_least_squares(Xb, yb)
    sigma2_between = between.residual_sum_squares / (n_e - k - 1)
    sigma2_u = sigma2_between - sigma2_eps / n_t
    notes = []
    if sigma2_u < 0:
        notes.append("swamy-arora sigma2_u estimate was negative and was clamped to zero")
        sigma2_u = 0.0

    theta = 1.0 - math.sqrt(sigma2_eps / (n_t * sigma2_u + sigma2_eps))

    # quasi-demeaned regression
    X_full = np.column_stack([np.ones(n), X_vars] if dummies is None
                             else [np.ones(n), X_vars, dummies])
    full_names = ["(Intercept)", *names]
    Xs = X_full - theta * np.repeat(ent_mean(X_full), n_t, axis=0)
    ys = y - theta * np.repeat(ent_mean(y).reshape(-1), n_t)

    sol = solve_least_squares(Xs, ys)
    p = Xs.shape[1]
    dof = n - p
    sigma2_hat = sol.residual_sum_squares / dof
    se = np.sqrt(sigma2_hat * np.diag(sol.covariance_unscaled))
    rows = _coef_rows(full_names, sol.coefficients, se, standard_normal)

    tss = float(np.sum((ys - ys.mean()) ** 2))
    rss = sol.residual_sum_squares
    r2 = 1.0 - rss / tss
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    fstat = ((tss - rss) / (p - 1)) / (rss / dof)
    fpval = tail_probability(fstat, f_dist(p - 1, dof))

    # exact GLS Gaussian likelihood under Omega_i = sigma2_eps I + sigma2_u J
    raw_resid = y - X_full @ sol.coefficients
    ll = _re_loglik(raw_resid, n_e, n_t, sigma2_u, sigma2_eps)
    n_params = p + 2
    aic, bic = _aic_bic(ll, n_params, n)

    slope_cov = sigma2_hat * sol.covariance_unscaled[1:1 + k, 1:1 + k]

    return FitResult(
        spec=spec,
        coefficients=rows,
        fit=FitStats(r2, adj, fstat, fpval, tss, rss, ll, aic, bic, n, n_params),
        variance_components=(float(sigma2_u), float(sigma2_eps)),
        slope_covariance=slope_cov,
        sigma2_hat=float(sigma2_hat),
        reference=standard_normal,
        residuals=raw_resid,
        n_entities=n_e,
        n_periods=n_t,
        design_df=p,
        notes=tuple(notes + [f"theta={theta:.6f}"]),
    )


def _re_loglik(resid: np.ndarray, n_e: int, n_t: int, sigma2_u: float, sigma2_eps: float) -> float:
    """Gaussian log-likelihood under the random-effects block covariance."""
    r = resid.reshape(n_e, n_t)
    lam = sigma2_eps + n_t * sigma2_u
    logdet_block = (n_t - 1) * math.log(sigma2_eps) + math.log(lam)
    row_sums = r.sum(axis=1)
    quad = float((r * r).sum()) / sigma2_eps - (sigma2_u / (sigma2_eps * lam)) * float(row_sums @ row_sums)
    n = n_e * n_t
    return -0.5 * (n * math.log(2.0 * math.pi) + n_e * logdet_block + quad)


# ---------------------------------------------------------------------------
# Models D and E: entity fixed effects


def fit_fixed_effects(panel: PanelDataset, spec: ModelSpec, method: str | None = None) -> FitResult:
    """Entity fixed effects via the within transform or explicit dummies.

    Both methods give the same slopes (checked in tests to 1e-6); the within
    path is the default for Model D, the dummy-variable (LSDV) path for
    Model E.  Model E differs from D only in its likelihood accounting, see
    the module docstring.
    """
    if spec.kind not in ("fixed_effects_within", "fixed_effects_glm"):
        raise ValueError(f"spec.kind must be a fixed-effects kind, got {spec.kind!r}")
    if method is None:
        method = "within" if spec.kind == "fixed_effects_within" else "dummy_variable"
    if method not in ("within", "dummy_variable"):
        raise ValueError(f"method must be 'within' or 'dummy_variable', got {method!r}")
    if panel.n_periods < 2:
        raise InsufficientObservations("fixed effects needs at least 2 periods per entity")

    y, X_vars = _stacked(panel, spec)
    n_e, n_t = panel.n_entities, panel.n_periods
    n = len(y)
    k = X_vars.shape[1]
    p_mean = k + n_e  # slopes + (E-1) dummies + intercept
    dof = n - p_mean
    if dof <= 0:
        raise InsufficientObservations(f"{n} observations for {p_mean} mean parameters")

    ent_means_X = X_vars.reshape(n_e, n_t, k).mean(axis=1)
    ent_means_y = y.reshape(n_e, n_t).mean(axis=1)

    if method == "within":
        X_dem = X_vars - np.repeat(ent_means_X, n_t, axis=0)
        y_dem = y - np.repeat(ent_means_y, n_t)
        sol = solve_least_squares(X_dem, y_dem)
        beta = sol.coefficients
        cov_unscaled = sol.covariance_unscaled
        residuals = sol.residuals
    else:
        ones = np.ones((n, 1))
        D = np.zeros((n, n_e - 1))
        for i in range(1, n_e):
            D[i * n_t:(i + 1) * n_t, i - 1] = 1.0
        X = np.column_stack([ones, D, X_vars])
        sol = solve_least_squares(X, y)
        beta = sol.coefficients[n_e:]
        cov_unscaled = sol.covariance_unscaled[n_e:, n_e:]
        residuals = sol.residuals

    rss = float(residuals @ residuals)
    sigma2 = rss / dof
    se = np.sqrt(sigma2 * np.diag(cov_unscaled))
    ref = student_t(dof)
    rows = _coef_rows(list(spec.predictors), beta, se, ref)

    alpha = ent_means_y - ent_means_X @ beta
    entity_effects = {e: float(a) for e, a in zip(panel.entities, alpha)}

    y_dem_full = y - np.repeat(ent_means_y, n_t)
    tss_within = float(y_dem_full @ y_dem_full)
    if spec.kind == "fixed_effects_within":
        tss = tss_within
        ll = gaussian_loglik(residuals, sigma2)
        note = "likelihood at dof-corrected variance rss/(n-p)"
    else:
        tss = float(np.sum((y - y.mean()) ** 2))
        ll = gaussian_loglik(residuals, rss / n)
        note = "likelihood at maximum-likelihood variance rss/n (gaussian glm accounting)"

    r2 = 1.0 - rss / tss
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    # joint slope significance against the entity-effects-only null
    fstat = ((tss_within - rss) / k) / (rss / dof)
    fpval = tail_probability(fstat, f_dist(k, dof))

    n_params = p_mean + 1
    aic, bic = _aic_bic(ll, n_params, n)

    return FitResult(
        spec=spec,
        coefficients=rows,
        fit=FitStats(r2, adj, fstat, fpval, tss, rss, ll, aic, bic, n, n_params),
        entity_effects=entity_effects,
        slope_covariance=sigma2 * cov_unscaled,
        sigma2_hat=float(sigma2),
        reference=ref,
        residuals=residuals,
        n_entities=n_e,
        n_periods=n_t,
        design_df=p_mean,
        notes=(note,),
    )


def fit_model(panel: PanelDataset, spec: ModelSpec) -> FitResult:
    """Dispatch on spec.kind."""
    if spec.kind == "pooled_ols":
        return fit_pooled_ols(panel, spec)
    if spec.kind == "random_effects":
        return fit_random_effects(panel, spec, time_trend=False)
    if spec.kind == "random_effects_time":
        return fit_random_effects(panel, spec, time_trend=True)
    return fit_fixed_effects(panel, spec)


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class ComparisonEntry:
    fit: FitResult
    delta_aic: float
    delta_bic: float
    delta_loglik: float


def compare_models(fits: Sequence[FitResult]) -> tuple[ComparisonEntry, ...]:
    """Rank fits by BIC ascending; ties by AIC, then fewer parameters.

    All fits must share the dependent variable and observation count.
    """
    fits = list(fits)
    if not fits:
        raise ValueError("compare_models needs at least one fit")
    dep = fits[0].spec.dependent
    n = fits[0].fit.n_obs
    for f in fits[1:]:
        if f.spec.dependent != dep:
            raise IncomparableFits(f"dependent variables differ: {dep!r} vs {f.spec.dependent!r}")
        if f.fit.n_obs != n:
            raise IncomparableFits(f"observation counts differ: {n} vs {f.fit.n_obs}")

    order = sorted(range(len(fits)),
                   key=lambda i: (fits[i].fit.bic, fits[i].fit.aic, fits[i].fit.n_params, i))
    best = fits[order[0]]
    return tuple(
        ComparisonEntry(
            fit=fits[i],
            delta_aic=fits[i].fit.aic - best.fit.aic,
            delta_bic=fits[i].fit.bic - best.fit.bic,
            delta_loglik=fits[i].fit.log_likelihood - best.fit.log_likelihood,
        )
        for i in order
    )
