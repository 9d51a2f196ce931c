"""SARIMAX forecasting through an exact state-space Gaussian likelihood.

The ARMA part (with the seasonal polynomials expanded into it) is cast into
the Harvey companion form and evaluated by a Kalman filter with the exact
stationary initialization.  The innovation variance and the exogenous
coefficients are concentrated out of the likelihood: the filter is run jointly
over the differenced response and every differenced exogenous column, and a
GLS step on the innovations profiles beta, so the simplex search only ranges
over the ARMA parameters, mapped through the partial-autocorrelation transform
to keep them stationary/invertible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .errors import (
    DataError,
    HorizonExogMismatch,
    OptimizerFailure,
    SeriesTooShort,
)
from .panel import PanelDataset

__all__ = [
    "SarimaxOrder",
    "SarimaxFit",
    "ForecastReport",
    "ScenarioPair",
    "NonStationaryStartWarning",
    "fit_sarimax",
    "select_order",
    "forecast",
    "evaluate_forecast",
    "run_two_scenarios",
]

MAX_ITER = 500
LOGLIK_TOL = 1e-8


class NonStationaryStartWarning(UserWarning):
    """The differenced series still looks like a unit-root process."""


@dataclass(frozen=True)
class SarimaxOrder:
    p: int
    d: int
    q: int
    P: int = 0
    D: int = 0
    Q: int = 0
    S: int = 1

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 0):
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.S < 1:
            raise ValueError(f"S must be >= 1, got {self.S}")
        if self.S == 1 and (self.P or self.D or self.Q):
            raise ValueError("seasonal terms require S > 1")

    @property
    def n_arma_params(self) -> int:
        return self.p + self.q + self.P + self.Q

    def label(self) -> str:
        return f"({self.p},{self.d},{self.q})({self.P},{self.D},{self.Q},{self.S})"


@dataclass(frozen=True)
class SarimaxFit:
    order: SarimaxOrder
    phi: np.ndarray
    theta: np.ndarray
    Phi: np.ndarray
    Theta: np.ndarray
    beta_exog: np.ndarray
    beta_se: np.ndarray
    sigma2: float
    log_likelihood: float
    aic: float
    bic: float
    converged: bool
    n_obs: int
    trend: str = "none"
    # forecasting state (internal): predicted state after the last training
    # observation, differencing history and the raw exogenous tail
    _state: np.ndarray = field(repr=False, default=None)
    _diff_stack: tuple = field(repr=False, default=())
    _exog_raw_tail: np.ndarray | None = field(repr=False, default=None)
    _n_exog: int = 0


@dataclass(frozen=True)
class ForecastReport:
    entity: str
    horizon: int
    point_forecasts: np.ndarray
    actuals: np.ndarray
    mae: float
    rmse: float
    nrmse: float
    scenario: str


@dataclass(frozen=True)
class ScenarioPair:
    entity: str
    all_features: ForecastReport
    selected_features: ForecastReport
    order_all: SarimaxOrder
    order_selected: SarimaxOrder


# ---------------------------------------------------------------------------
# differencing


def _difference_with_stack(x: np.ndarray, d: int, D: int, S: int):
    """Apply (1-L)^d (1-L^S)^D, keeping the pre-difference series for inversion."""
    z = np.asarray(x, dtype=float)
    stack = []
    for _ in range(D):
        stack.append((S, z.copy()))
        z = z[S:] - z[:-S]
    for _ in range(d):
        stack.append((1, z.copy()))
        z = z[1:] - z[:-1]
    return z, tuple(stack)


def _undifference(forecasts: np.ndarray, stack: tuple) -> np.ndarray:
    out = np.asarray(forecasts, dtype=float)
    for lag, prev in reversed(stack):
        ext = list(prev)
        vals = []
        for f in out:
            v = f + ext[-lag]
            ext.append(v)
            vals.append(v)
        out = np.array(vals)
    return out


def _difference_matrix(X: np.ndarray, d: int, D: int, S: int) -> np.ndarray:
    Z = np.asarray(X, dtype=float)
    for _ in range(D):
        Z = Z[S:] - Z[:-S]
    for _ in range(d):
        Z = Z[1:] - Z[:-1]
    return Z


# ---------------------------------------------------------------------------
# parameter transforms


def _pacf_to_coeffs(r: np.ndarray) -> np.ndarray:
    """Durbin-Levinson map from partial autocorrelations to AR coefficients."""
    phi = np.zeros(0)
    for k, rk in enumerate(r, start=1):
        new = np.empty(k)
        new[k - 1] = rk
        if k > 1:
            new[: k - 1] = phi - rk * phi[::-1]
        phi = new
    return phi


def _unconstrained_to_poly(u: np.ndarray) -> np.ndarray:
    # clamp strictly inside the unit interval so the stationary covariance
    # solve stays well-posed while the optimizer explores
    return _pacf_to_coeffs(np.clip(np.tanh(u), -0.9995, 0.9995))


def _acf(x: np.ndarray, nlags: int) -> np.ndarray:
    x = x - x.mean()
    n = x.size
    denom = float(x @ x)
    if denom <= 0:
        return np.zeros(nlags + 1)
    return np.array([1.0] + [float(x[k:] @ x[:-k]) / denom for k in range(1, nlags + 1)])


def _pacf_from_acf(acf: np.ndarray, nlags: int) -> np.ndarray:
    """Levinson recursion on sample autocorrelations."""
    pacf = np.zeros(nlags)
    phi = np.zeros(0)
    for k in range(1, nlags + 1):
        if k == 1:
            rk = acf[1]
        else:
            num = acf[k] - float(phi @ acf[k - 1:0:-1])
            den = 1.0 - float(phi @ acf[1:k])
            rk = num / den if abs(den) > 1e-12 else 0.0
        rk = float(np.clip(rk, -0.95, 0.95))
        new = np.empty(k)
        new[k - 1] = rk
        if k > 1:
            new[: k - 1] = phi - rk * phi[::-1]
        phi = new
        pacf[k - 1] = rk
    return pacf


def _expand_seasonal(nonseasonal: np.ndarray, seasonal: np.ndarray, S: int) -> np.ndarray:
    """Coefficients of (1 - sum a_i L^i)(1 - sum b_j L^{jS}) as one AR-style vector."""
    pa = np.concatenate([[1.0], -np.asarray(nonseasonal, dtype=float)])
    pb = np.ones(1)
    if seasonal.size:
        pb = np.zeros(seasonal.size * S + 1)
        pb[0] = 1.0
        pb[S::S] = -np.asarray(seasonal, dtype=float)
    full = np.convolve(pa, pb)
    return -full[1:]


# ---------------------------------------------------------------------------
# state space


def _companion(ar_full: np.ndarray, ma_full: np.ndarray):
    p = ar_full.size
    q = ma_full.size
    m = max(p, q + 1)
    T = np.zeros((m, m))
    T[: m - 1, 1:] = np.eye(m - 1)
    T[:p, 0] = ar_full
    R = np.zeros(m)
    R[0] = 1.0
    R[1: q + 1] = ma_full
    return T, R


def _stationary_cov(T: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Solve P = T P T' + R R' by the vectorized linear system."""
    m = T.shape[0]
    A = np.eye(m * m) - np.kron(T, T)
    vec = np.linalg.solve(A, np.outer(R, R).reshape(-1))
    P = vec.reshape(m, m)
    return 0.5 * (P + P.T)


def _filter_innovations(M: np.ndarray, T: np.ndarray, R: np.ndarray, P0: np.ndarray):
    """Run the Kalman recursion jointly over the columns of M (sigma^2 = 1).

    Returns the innovation matrix (n x C), the prediction variances F (n,) and
    the predicted state for the period after the sample (per column).
    """
    n, C = M.shape
    m = T.shape[0]
    A = np.zeros((m, C))
    P = P0.copy()
    RR = np.outer(R, R)
    V = np.empty((n, C))
    F = np.empty(n)
    for t in range(n):
        v = M[t, :] - A[0, :]
        f = P[0, 0]
        V[t, :] = v
        F[t] = f
        TP = T @ P
        K = TP[:, 0] / f
        A = T @ A + np.outer(K, v)
        P = TP @ T.T + RR - np.outer(K, K) * f
        P = 0.5 * (P + P.T)
    return V, F, A


def _profile_loglik(V: np.ndarray, F: np.ndarray):
    """Concentrate beta (GLS on innovations) and sigma^2 out of the likelihood."""
    n = V.shape[0]
    w = 1.0 / F
    vy = V[:, 0]
    if V.shape[1] > 1:
        VX = V[:, 1:]
        G = (VX * w[:, None]).T @ VX
        g = (VX * w[:, None]).T @ vy
        try:
            G_inv = np.linalg.inv(G)
        except np.linalg.LinAlgError:
            raise DataError("exogenous innovations are collinear; drop redundant columns") from None
        beta = G_inv @ g
        resid = vy - VX @ beta
    else:
        G_inv = None
        beta = np.zeros(0)
        resid = vy
    rss = float((resid * resid) @ w)
    if rss <= 0:
        rss = 1e-300
    sigma2 = rss / n
    beta_se = np.sqrt(sigma2 * np.diag(G_inv)) if G_inv is not None else np.zeros(0)
    ll = -0.5 * (n * math.log(2.0 * math.pi * sigma2) + float(np.log(F).sum()) + n)
    return ll, beta, sigma2, beta_se


# ---------------------------------------------------------------------------
# fitting


def _split_params(u: np.ndarray, order: SarimaxOrder):
    p, q, P, Q = order.p, order.q, order.P, order.Q
    parts = np.split(u, np.cumsum([p, q, P])) if u.size else [np.zeros(0)] * 4
    while len(parts) < 4:
        parts.append(np.zeros(0))
    return parts[0], parts[1], parts[2], parts[3]


def _arma_polys(u: np.ndarray, order: SarimaxOrder):
    u_p, u_q, u_P, u_Q = _split_params(u, order)
    phi = _unconstrained_to_poly(u_p)
    Phi = _unconstrained_to_poly(u_P)
    # invertible MA(1 + sum th L) <=> (-th) is a stationary AR vector
    theta = -_unconstrained_to_poly(u_q)
    Theta = -_unconstrained_to_poly(u_Q)
    ar_full = _expand_seasonal(phi, Phi, order.S)
    ma_full = _combined_ma(theta, Theta, order.S)
    return phi, theta, Phi, Theta, ar_full, ma_full


def _combined_ma(theta: np.ndarray, Theta: np.ndarray, S: int) -> np.ndarray:
    """Coefficients c of (1 + sum th L)(1 + sum Th L^S) = 1 + sum c_i L^i."""
    return -_expand_seasonal(-np.asarray(theta, dtype=float),
                             -np.asarray(Theta, dtype=float), S)


def fit_sarimax(y: Sequence[float], exog: np.ndarray | None, order: SarimaxOrder,
                trend: str = "none") -> SarimaxFit:
    """Maximum-likelihood SARIMAX fit.

    ``exog`` may be None or an (n x k) matrix aligned to ``y``.  ``trend="c"``
    adds a constant to the differenced equation (a mean when d = D = 0, a
    drift otherwise); an explicit ones column in ``exog`` achieves the same
    for undifferenced models.
    """
    if trend not in ("none", "c"):
        raise ValueError(f"trend must be 'none' or 'c', got {trend!r}")
    y = np.asarray(y, dtype=float).reshape(-1)
    n_raw = y.size
    if exog is not None:
        exog = np.asarray(exog, dtype=float)
        if exog.ndim == 1:
            exog = exog[:, None]
        if exog.shape[0] != n_raw:
            raise HorizonExogMismatch(f"exog has {exog.shape[0]} rows, y has {n_raw}")
        if not np.isfinite(exog).all():
            raise DataError("exogenous values must be finite")
    if not np.isfinite(y).all():
        raise DataError("series values must be finite")

    y_d, stack = _difference_with_stack(y, order.d, order.D, order.S)
    X_d = _difference_matrix(exog, order.d, order.D, order.S) if exog is not None else None
    k_exog = 0 if X_d is None else X_d.shape[1]
    n = y_d.size
    n_free = order.n_arma_params + k_exog + (1 if trend == "c" else 0) + 1
    if n < n_free + 2:
        raise SeriesTooShort(
            f"{n} observations after differencing for {n_free} free parameters"
        )
    if X_d is not None:
        if order.d + order.D > 0:
            scale = np.abs(X_d).max(axis=0)
            ref = np.abs(exog).max(axis=0)
            zero = scale <= 1e-12 * np.maximum(ref, 1.0)
            if zero.any():
                raise DataError(
                    f"exogenous column(s) {np.where(zero)[0].tolist()} are constant after differencing"
                )
    if trend == "c":
        ones = np.ones((n, 1))
        X_d = ones if X_d is None else np.column_stack([X_d, ones])

    if order.d > 0 and n > 4:
        ac = _acf(y_d, 1)
        if ac[1] > 0.97:
            warnings.warn(
                "differenced series still shows a unit-root signature",
                NonStationaryStartWarning,
            )

    M = np.column_stack([y_d] + ([X_d] if X_d is not None else []))

    def neg_loglik(u: np.ndarray) -> float:
        try:
            *_, ar_full, ma_full = _arma_polys(u, order)
            T, R = _companion(ar_full, ma_full)
            P0 = _stationary_cov(T, R)
            V, F, _ = _filter_innovations(M, T, R, P0)
            ll, *_ = _profile_loglik(V, F)
        except (np.linalg.LinAlgError, DataError):
            return 1e100
        return -ll if math.isfinite(ll) else 1e100

    n_arma = order.n_arma_params
    if n_arma == 0:
        u_hat = np.zeros(0)
        converged = True
    else:
        u0 = _start_values(y_d, X_d, order)
        res = optimize.minimize(
            neg_loglik,
            u0,
            method="Nelder-Mead",
            options={"maxiter": MAX_ITER, "fatol": LOGLIK_TOL, "xatol": 1e-6},
        )
        if not np.isfinite(res.fun):
            raise OptimizerFailure("likelihood is not finite at the optimizer solution")
        u_hat = res.x
        converged = bool(res.success)

    phi, theta, Phi, Theta, ar_full, ma_full = _arma_polys(u_hat, order)
    T, R = _companion(ar_full, ma_full)
    P0 = _stationary_cov(T, R)
    V, F, _ = _filter_innovations(M, T, R, P0)
    ll, beta, sigma2, beta_se = _profile_loglik(V, F)

    # refilter the beta-adjusted series alone to get the forecasting state
    z = y_d - (X_d @ beta if k_exog else 0.0)
    _, _, A_next = _filter_innovations(z[:, None], T, R, P0)

    n_params = n_free
    aic = 2.0 * n_params - 2.0 * ll
    bic = n_params * math.log(n) - 2.0 * ll

    tail_len = order.d + order.D * order.S
    exog_tail = exog[n_raw - tail_len:, :].copy() if (exog is not None and tail_len) else None

    return SarimaxFit(
        order=order,
        phi=phi,
        theta=theta,
        Phi=Phi,
        Theta=Theta,
        beta_exog=beta,
        beta_se=beta_se,
        sigma2=float(sigma2),
        log_likelihood=float(ll),
        aic=float(aic),
        bic=float(bic),
        converged=converged,
        n_obs=n,
        trend=trend,
        _state=A_next[:, 0],
        _diff_stack=stack,
        _exog_raw_tail=exog_tail,
        _n_exog=k_exog,
    )


def _start_values(y_d: np.ndarray, X_d: np.ndarray | None, order: SarimaxOrder) -> np.ndarray:
    """Method-of-moments starting point in the unconstrained parameterization."""
    if X_d is not None:
        coef, *_ = np.linalg.lstsq(X_d, y_d, rcond=None)
        resid = y_d - X_d @ coef
    else:
        resid = y_d - y_d.mean()
    u = []
    if order.p:
        nlags = min(order.p, resid.size - 2)
        pacf = np.zeros(order.p)
        if nlags > 0:
            pacf[:nlags] = _pacf_from_acf(_acf(resid, nlags), nlags)
        u.append(np.arctanh(np.clip(pacf, -0.9, 0.9)))
    if order.q:
        u.append(np.zeros(order.q))
    if order.P:
        lagS = order.S
        ac = _acf(resid, lagS) if resid.size > lagS + 1 else np.zeros(lagS + 1)
        r = float(np.clip(ac[lagS], -0.7, 0.7))
        seas = np.zeros(order.P)
        seas[0] = np.arctanh(r)
        u.append(seas)
    if order.Q:
        u.append(np.zeros(order.Q))
    return np.concatenate(u) if u else np.zeros(0)


# ---------------------------------------------------------------------------
# forecasting and evaluation


def forecast(fit: SarimaxFit, exog_future: np.ndarray | None, h: int) -> np.ndarray:
    """Point forecasts for h periods ahead.

    The state recursion is iterated with innovations at zero, exogenous
    contributions are added per future period, and differencing is inverted by
    cumulative summation against the stored training tail.
    """
    if h < 1:
        raise ValueError(f"horizon must be >= 1, got {h}")
    if fit._n_exog:
        if exog_future is None:
            raise HorizonExogMismatch("fit uses exogenous variables but none were supplied")
        exog_future = np.asarray(exog_future, dtype=float)
        if exog_future.ndim == 1:
            exog_future = exog_future[:, None]
        if exog_future.shape != (h, fit._n_exog):
            raise HorizonExogMismatch(
                f"exog_future shape {exog_future.shape} != ({h}, {fit._n_exog})"
            )
        if fit._exog_raw_tail is not None:
            stacked = np.vstack([fit._exog_raw_tail, exog_future])
            Xf = _difference_matrix(stacked, fit.order.d, fit.order.D, fit.order.S)[-h:, :]
        else:
            Xf = exog_future
    elif exog_future is not None and np.size(exog_future):
        raise HorizonExogMismatch("fit has no exogenous variables but exog_future was supplied")
    else:
        Xf = None
    if fit.trend == "c":
        ones = np.ones((h, 1))
        Xf = ones if Xf is None else np.column_stack([Xf, ones])
    exog_term = Xf @ fit.beta_exog if Xf is not None else np.zeros(h)

    ar_full = _expand_seasonal(fit.phi, fit.Phi, fit.order.S)
    ma_full = _combined_ma(fit.theta, fit.Theta, fit.order.S)
    T, _ = _companion(ar_full, ma_full)
    a = fit._state.copy()
    diffed = np.empty(h)
    for i in range(h):
        diffed[i] = a[0] + exog_term[i]
        a = T @ a
    return _undifference(diffed, fit._diff_stack)


def evaluate_forecast(point_forecasts: Sequence[float], actuals: Sequence[float]):
    """(MAE, RMSE, NRMSE); NRMSE divides by the range of the actuals.

    Constant actuals make NRMSE undefined; it is returned as NaN while MAE and
    RMSE are still computed.
    """
    f = np.asarray(point_forecasts, dtype=float).reshape(-1)
    a = np.asarray(actuals, dtype=float).reshape(-1)
    if f.size != a.size or f.size == 0:
        raise ValueError("forecasts and actuals must have equal nonzero length")
    err = a - f
    mae = float(np.mean(np.abs(err)))
    rmse = float(math.sqrt(np.mean(err * err)))
    rng = float(a.max() - a.min())
    nrmse = rmse / rng if rng > 0 else float("nan")
    return mae, rmse, nrmse


# ---------------------------------------------------------------------------
# order selection


def select_order(y: Sequence[float], exog: np.ndarray | None = None,
                 p_range: Sequence[int] = (0, 1, 2),
                 d_range: Sequence[int] = (0, 1, 2),
                 q_range: Sequence[int] = (0, 1, 2),
                 s: int = 1,
                 trend: str = "none",
                 log: dict | None = None) -> SarimaxOrder:
    """Pick d by the variance-reduction rule, then (p, q) by minimum AIC.

    Differencing stops as soon as the sample variance stops shrinking; the
    (p, q) grid is scanned at the chosen d with ties broken by fewer
    parameters.  Grid cells that fail to fit are skipped (and logged when a
    log dict is passed).
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if not (len(p_range) and len(d_range) and len(q_range)):
        raise ValueError("search space must be nonempty")

    ds = sorted(set(int(d) for d in d_range))
    variances = {}
    for d in range(max(ds) + 1):
        z = _difference_matrix(y[:, None], d, 0, 1).reshape(-1)
        variances[d] = float(np.var(z)) if z.size > 1 else float("inf")
    chosen_d = ds[0]
    for d in ds[1:]:
        if variances[d] < variances[chosen_d]:
            chosen_d = d
        else:
            break

    grid: list[tuple[float, int, int]] = []
    failures: list[str] = []
    for p in sorted(set(int(v) for v in p_range)):
        for q in sorted(set(int(v) for v in q_range)):
            order = SarimaxOrder(p, chosen_d, q, S=s)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", NonStationaryStartWarning)
                    fit = fit_sarimax(y, exog, order, trend=trend)
            except (SeriesTooShort, OptimizerFailure, DataError) as exc:
                failures.append(f"{order.label()}: {exc}")
                continue
            grid.append((fit.aic, p, q))
    if not grid:
        raise OptimizerFailure(f"no grid cell could be fitted: {failures}")

    grid.sort(key=lambda t: (t[0], t[1] + t[2], t[1], t[2]))
    best_aic, best_p, best_q = grid[0]
    if log is not None:
        log["d_variances"] = {str(d): variances[d] for d in variances}
        log["chosen_d"] = chosen_d
        log["grid_aic"] = {f"({p},{chosen_d},{q})": aic for aic, p, q in sorted(grid, key=lambda t: (t[1], t[2]))}
        log["failures"] = failures
    return SarimaxOrder(best_p, chosen_d, best_q, S=s)


# ---------------------------------------------------------------------------
# two-scenario runner


def _entity_frames(panel: PanelDataset, entity: str, dependent: str, codes: Sequence[str],
                   split_year: int, horizon: int):
    i_split = panel.periods.index(split_year)
    y = panel.series(entity, dependent).values
    X = np.column_stack([panel.series(entity, c).values for c in codes])
    y_train = y[: i_split + 1]
    X_train = X[: i_split + 1, :]
    X_future = X[i_split + 1: i_split + 1 + horizon, :]
    actuals = y[i_split + 1: i_split + 1 + horizon]
    return y_train, X_train, X_future, actuals


def _forecast_scenario(entity: str, scenario: str, y_train, X_train, X_future, actuals,
                       p_range, d_range, q_range, log: dict | None):
    sub_log: dict = {}
    order = select_order(y_train, X_train, p_range, d_range, q_range,
                         trend="c", log=sub_log)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonStationaryStartWarning)
        fit = fit_sarimax(y_train, X_train, order, trend="c")
    points = forecast(fit, X_future, len(actuals))
    mae, rmse, nrmse = evaluate_forecast(points, actuals)
    if log is not None:
        log[f"{entity}/{scenario}"] = {"order": order.label(), **sub_log}
    report = ForecastReport(
        entity=entity,
        horizon=len(actuals),
        point_forecasts=points,
        actuals=np.asarray(actuals, dtype=float),
        mae=mae,
        rmse=rmse,
        nrmse=nrmse,
        scenario=scenario,
    )
    return report, order


def run_two_scenarios(panel: PanelDataset, selected: Sequence[str], all_codes: Sequence[str],
                      split_year: int | None = None, horizon: int = 3, *,
                      dependent: str,
                      p_range: Sequence[int] = (0, 1, 2),
                      d_range: Sequence[int] = (0, 1, 2),
                      q_range: Sequence[int] = (0, 1, 2),
                      log: dict | None = None) -> list[ScenarioPair]:
    """Fit per-entity SARIMAX under the all-features and selected-features sets.

    The test window is the final ``horizon`` panel years; observed indicator
    values serve as the future exogenous inputs, matching a retrospective
    evaluation design.
    """
    if split_year is None:
        split_year = panel.periods[-1] - horizon
    if split_year + horizon > panel.periods[-1]:
        raise ValueError(
            f"split_year {split_year} + horizon {horizon} exceeds the last panel year {panel.periods[-1]}"
        )
    if split_year not in panel.periods:
        raise ValueError(f"split_year {split_year} is not a panel period")
    panel.require_complete()

    pairs = []
    for entity in panel.entities:
        frames_all = _entity_frames(panel, entity, dependent, all_codes, split_year, horizon)
        frames_sel = _entity_frames(panel, entity, dependent, selected, split_year, horizon)
        report_all, order_all = _forecast_scenario(
            entity, "all_features", *frames_all, p_range, d_range, q_range, log)
        report_sel, order_sel = _forecast_scenario(
            entity, "selected_features", *frames_sel, p_range, d_range, q_range, log)
        pairs.append(ScenarioPair(entity, report_all, report_sel, order_all, order_sel))
    return pairs
