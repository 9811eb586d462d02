"""Probability generating function estimators for count time series.

Points ``u = (u_0, ..., u_s)`` address the joint pgf of ``(X_t, X_{t-1}, ..., X_{t-s})``.
All evaluators accept a single point of shape ``(s+1,)`` or a stack of shape
``(..., s+1)``; ``0**0`` is taken as 1 throughout.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .core import InarModel, InvalidParameter, Pmf, validate_series


def _points(u, dim: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        u = u[None]
    if dim is not None and u.shape[-1] != dim:
        raise InvalidParameter(f"pgf points need {dim} coordinates, got {u.shape[-1]}")
    if np.any(u < 0) or np.any(u > 1):
        raise InvalidParameter("pgf arguments must lie in [0, 1]")
    return u


def weight(u, a: float) -> np.ndarray | float:
    """Product-beta weight density (a+1)^(s+1) prod_j u_j^a on [0,1]^(s+1)."""
    if a < 0:
        raise InvalidParameter(f"weighting parameter must be non-negative, got {a}")
    u = _points(u)
    d = u.shape[-1]
    out = (a + 1.0) ** d * np.prod(np.power(u, a), axis=-1)
    return float(out) if out.ndim == 0 else out


def innovation_pgf(pmf: Pmf, u0) -> np.ndarray | float:
    """sum_k pmf(k) u0^k."""
    out = np.polynomial.polynomial.polyval(np.asarray(u0, dtype=float), pmf.masses)
    return float(out) if np.ndim(out) == 0 else out


def lagged_windows(series, s: int) -> np.ndarray:
    """Matrix with rows ``(X_t, X_{t-1}, ..., X_{t-s})`` for t = s+1..n (1-based)."""
    x = validate_series(series).values
    n = x.shape[0]
    if n <= s:
        raise InvalidParameter(f"series of length {n} is too short for order {s}")
    return np.column_stack([x[s - j : n - j] for j in range(s + 1)])


def grouped_windows(series, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct lag windows with their multiplicities."""
    rows, counts = np.unique(lagged_windows(series, s), axis=0, return_counts=True)
    return rows, counts.astype(float)


def _monomial_mean(rows: np.ndarray, counts: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Weighted mean over rows of prod_j bases[..., j] ** rows[r, j]."""
    lead = bases.shape[:-1]
    flat = bases.reshape(-1, bases.shape[-1])
    out = np.empty(flat.shape[0])
    total = counts.sum()
    chunk = max(1, 2_000_000 // max(1, rows.size))
    for lo in range(0, flat.shape[0], chunk):
        b = flat[lo : lo + chunk]
        vals = np.power(b[:, None, :], rows[None, :, :]).prod(axis=-1)
        out[lo : lo + chunk] = vals @ counts / total
    return out.reshape(lead)


def empirical_joint_pgf(series, s: int, u) -> np.ndarray | float:
    """Nonparametric estimate (1/(n-s)) sum_t prod_{j=0..s} u_j^{X_{t-j}}."""
    u = _points(u, s + 1)
    rows, counts = grouped_windows(series, s)
    out = _monomial_mean(rows, counts, u)
    return float(out) if out.ndim == 0 else out


def null_joint_pgf(model: InarModel, series, s: int, u) -> np.ndarray | float:
    """INAR-structured plug-in estimate of the order-``s`` joint pgf.

    g_eps(u_0) * (1/(n-s)) sum_t prod_{j=1..s} {u_j (1 + alpha_j (u_0 - 1))}^{X_{t-j}},
    with alpha_j = 0 beyond the model order.
    """
    u = _points(u, s + 1)
    alphas = model.padded_alphas(s)
    rows, counts = grouped_windows(series, s)
    u0 = u[..., :1]
    bases = u[..., 1:] * (1.0 + alphas * (u0 - 1.0))
    out = innovation_pgf(model.innovations, u[..., 0]) * _monomial_mean(rows[:, 1:], counts, bases)
    return float(out) if np.ndim(out) == 0 else out


def analytic_inar_pgf(model: InarModel, lag_pgf_oracle: Callable, u) -> float:
    """Joint pgf of a stationary INAR(p) from the pgf of its ``p`` lagged values.

    ``lag_pgf_oracle(v)`` must return E(prod_j v_j^{X_{t-j}}) for the stationary
    law; it is evaluated at v_j = u_j (1 + alpha_j (u_0 - 1)).
    """
    u = _points(u, model.p + 1)
    v = u[1:] * (1.0 + np.asarray(model.alphas) * (u[0] - 1.0))
    return float(innovation_pgf(model.innovations, u[0]) * lag_pgf_oracle(v))


def poisson_inar1_pgf(lam: float, alpha: float, u) -> float:
    """Closed-form joint pgf of (X_t, X_{t-1}) for a stationary Poi(lam)-INAR(1)."""
    u0, u1 = _points(u, 2)
    mu = lam / (1.0 - alpha)
    return float(np.exp(lam * (u0 - 1.0)) * np.exp(mu * (u1 * (1.0 + alpha * (u0 - 1.0)) - 1.0)))


def weighted_squared_difference(model: InarModel, series, a: float, grid: int) -> np.ndarray:
    """Integrand (null - empirical)^2 * w on a ``grid x grid`` lattice over (u_0, u_1).

    Uses the order-``model.p`` pgfs with u_2..u_p held at 1. Returns rows
    ``(u0, u1, value)`` with u_0 varying slowest.
    """
    if grid < 2:
        raise InvalidParameter("heatmap grid needs at least 2 points per axis")
    s = model.p
    ticks = np.linspace(0.0, 1.0, grid)
    u0, u1 = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.ones((grid, grid, s + 1))
    pts[..., 0] = u0
    pts[..., 1] = u1
    diff = null_joint_pgf(model, series, s, pts) - empirical_joint_pgf(series, s, pts)
    val = diff**2 * weight(pts, a)
    return np.column_stack([u0.ravel(), u1.ravel(), val.ravel()])
