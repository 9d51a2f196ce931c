"""Specification tests driving the model-selection flow.

Three decisions: pooled OLS versus random effects (Breusch-Pagan Lagrange
multiplier for entity effects), whether period dummies add anything (Wald F on
the nested random-effects pair), and random versus fixed effects (Hausman).

The test published under the Breusch-Pagan name in this pipeline is the LM
test of zero entity-effect variance; the classical heteroskedasticity
regression of squared residuals on the regressors is also provided as a
diagnostic (``breusch_pagan_hetero``), but the pipeline branches on the
entity-effects version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleFits, NotNested, UnbalancedPanel
from .estimators import FitResult
from .numerics import Distribution, chi_square, f_dist, solve_least_squares, tail_probability
from .panel import PanelDataset

__all__ = [
    "TestResult",
    "breusch_pagan_panel",
    "breusch_pagan_hetero",
    "wald_time_effects",
    "hausman",
]

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class TestResult:
    test_name: str
    statistic: float
    distribution: Distribution
    p_value: float
    alpha: float
    decision: str  # "reject_null" | "fail_to_reject"
    null_description: str
    pseudo_inverse_used: bool = False

    @property
    def reject(self) -> bool:
        return self.decision == "reject_null"


def _decide(p_value: float, alpha: float) -> str:
    return "reject_null" if p_value < alpha else "fail_to_reject"


def _result(name: str, stat: float, dist: Distribution, alpha: float,
            null: str, pseudo: bool = False) -> TestResult:
    p = tail_probability(stat, dist, sides="one")
    return TestResult(
        test_name=name,
        statistic=float(stat),
        distribution=dist,
        p_value=p,
        alpha=alpha,
        decision=_decide(p, alpha),
        null_description=null,
        pseudo_inverse_used=pseudo,
    )


def breusch_pagan_panel(pooled_fit: FitResult, panel: PanelDataset,
                        alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Breusch-Pagan LM test for entity random effects on pooled residuals.

    LM = NT / (2(T-1)) * [ sum_i (sum_t e_it)^2 / sum_it e_it^2 - 1 ]^2,
    referred to chi-square(1).
    """
    if pooled_fit.spec.kind != "pooled_ols":
        raise ValueError("breusch_pagan_panel needs a pooled OLS fit")
    n_e, n_t = panel.n_entities, panel.n_periods
    e = pooled_fit.residuals
    if e is None or e.size != n_e * n_t:
        raise UnbalancedPanel(
            f"pooled fit has {0 if e is None else e.size} residuals, panel implies {n_e * n_t}"
        )
    r = e.reshape(n_e, n_t)
    row_sums = r.sum(axis=1)
    ratio = float(row_sums @ row_sums) / float((r * r).sum())
    lm = (n_e * n_t) / (2.0 * (n_t - 1)) * (ratio - 1.0) ** 2
    return _result(
        "breusch_pagan_lm",
        lm,
        chi_square(1),
        alpha,
        "no entity-level variance component: variances across entities are equal",
    )


def breusch_pagan_hetero(pooled_fit: FitResult, panel: PanelDataset,
                         alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Classical heteroskedasticity LM: squared residuals on the regressors."""
    if pooled_fit.spec.kind != "pooled_ols":
        raise ValueError("breusch_pagan_hetero needs a pooled OLS fit")
    e = pooled_fit.residuals
    cols = [panel.variable_matrix(c).reshape(-1) for c in pooled_fit.spec.predictors]
    X = np.column_stack([np.ones(e.size), *cols])
    u = e * e
    sol = solve_least_squares(X, u)
    tss = float(np.sum((u - u.mean()) ** 2))
    r2 = 1.0 - sol.residual_sum_squares / tss
    lm = e.size * r2
    return _result(
        "breusch_pagan_hetero",
        lm,
        chi_square(X.shape[1] - 1),
        alpha,
        "residual variance is unrelated to the regressors (homoskedasticity)",
    )


def wald_time_effects(fit_base: FitResult, fit_time: FitResult,
                      alpha: float = DEFAULT_ALPHA) -> TestResult:
    """RSS-based F test that the period-dummy coefficients are jointly zero."""
    if fit_base.fit.n_obs != fit_time.fit.n_obs:
        raise NotNested("fits cover different observation counts")
    if fit_base.spec.predictors != fit_time.spec.predictors:
        raise NotNested("fits have different predictor sets")
    q = fit_time.design_df - fit_base.design_df
    if q <= 0:
        raise NotNested("extended fit does not add period terms")
    n = fit_time.fit.n_obs
    rss_base = fit_base.fit.residual_ss
    rss_time = fit_time.fit.residual_ss
    df2 = n - fit_time.design_df
    fstat = max(0.0, (rss_base - rss_time) / q) / (rss_time / df2)
    return _result(
        "wald_time_effects",
        fstat,
        f_dist(q, df2),
        alpha,
        "the coefficients of the time-specific effects are jointly zero",
    )


def hausman(fe_fit: FitResult, re_fit: FitResult, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Hausman contrast of the common slope coefficients of FE and RE fits.

    H = d' (V_FE - V_RE)^{-1} d over the shared time-varying slopes, with the
    intercept and entity terms excluded.  Both covariances are evaluated at the
    fixed-effects error-variance scale, which makes the difference positive
    semidefinite by construction; if it is still rank deficient numerically,
    its positive-part pseudo-inverse is used and the effective rank becomes the
    degrees of freedom (flagged in the result).
    """
    if fe_fit.spec.predictors != re_fit.spec.predictors:
        raise IncompatibleFits("fits do not share the same slope coefficients")
    d = fe_fit.slope_estimates() - re_fit.slope_estimates()
    v_re = re_fit.slope_covariance
    if re_fit.sigma2_hat > 0 and fe_fit.sigma2_hat > 0:
        v_re = v_re * (fe_fit.sigma2_hat / re_fit.sigma2_hat)
    V = fe_fit.slope_covariance - v_re
    V = 0.5 * (V + V.T)
    k = d.size

    eigvals, eigvecs = np.linalg.eigh(V)
    tol = max(abs(eigvals.max()), 1.0e-300) * k * np.finfo(float).eps
    pos = eigvals > tol
    pseudo = bool((~pos).any())
    if not pos.any():
        stat, df = 0.0, k
    else:
        inv_vals = np.where(pos, 1.0 / np.where(pos, eigvals, 1.0), 0.0)
        z = eigvecs.T @ d
        stat = float(z @ (inv_vals * z))
        df = int(pos.sum()) if pseudo else k
    return _result(
        "hausman",
        stat,
        chi_square(df),
        alpha,
        "the random effects estimator is consistent and efficient",
        pseudo=pseudo,
    )
