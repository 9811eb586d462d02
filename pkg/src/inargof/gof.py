"""Weighted L2 distance between the INAR-structured and the unrestricted joint pgf.

For each window ``(X_t, X_{t-1}, ..., X_{t-s})`` the difference of the two pgf
summands factorizes as

    A_t(u_0) * prod_{j>=1} u_j^{X_{t-j}},
    A_t(u_0) = g_eps(u_0) prod_j (1 - a_j + a_j u_0)^{X_{t-j}} - u_0^{X_t},

so the statistic is a double sum over window pairs of a lag kernel
prod_j 1/(1 + X_{t-j} + X_{t'-j} + a) times a Hilbert-type quadratic form in the
coefficients of A_t and A_{t'}. ``tn_closed_form`` evaluates that sum exactly;
``tn_quadrature`` integrates the same integrand on a tensor Gauss grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .core import InarError, InarModel, InvalidParameter, validate_series
from .estimate import _binom_pmf
from .pgf import grouped_windows

MAX_NODES = 64


class NonIntegerWeight(InarError, ValueError):
    """The closed form needs an integer weighting parameter."""


@dataclass(frozen=True)
class StatConfig:
    """Statistic settings.

    s : pgf order (at least the model order).
    a : weighting exponent, ``a >= 0``.
    method : ``"closed"`` or ``"quad"``.
    nodes : quadrature nodes per axis; ``None`` picks the exactness threshold per axis.
    """

    s: int = 1
    a: float = 5.0
    method: str = "closed"
    nodes: int | None = None

    def __post_init__(self):
        if self.s < 1:
            raise InvalidParameter("pgf order s must be at least 1")
        if self.a < 0:
            raise InvalidParameter("weighting parameter a must be non-negative")
        if self.method not in ("closed", "quad"):
            raise InvalidParameter(f"unknown method {self.method!r}; use 'closed' or 'quad'")
        if self.nodes is not None and self.nodes < 2:
            raise InvalidParameter("quadrature needs at least 2 nodes per axis")


def _is_integer(a: float) -> bool:
    return float(a).is_integer()


def _check(series, model: InarModel, s: int):
    cs = validate_series(series)
    if s < model.p:
        raise InvalidParameter(f"pgf order s={s} is below the model order p={model.p}")
    cs.require_longer_than(s)
    return cs


def _null_polynomials(rows: np.ndarray, alphas: np.ndarray, g: np.ndarray) -> list[np.ndarray]:
    """Coefficients in u_0 of g_eps(u_0) prod_j (1 - a_j + a_j u_0)^{L_j} for each row's lags."""
    cache: dict = {}
    out = []
    for r in rows:
        coef = g
        for j, x in enumerate(r[1:]):
            x = int(x)
            if x == 0 or alphas[j] == 0.0:
                continue
            key = (j, x)
            b = cache.get(key)
            if b is None:
                b = cache[key] = _binom_pmf(x, np.arange(x + 1), alphas[j])
            coef = np.convolve(coef, b)
        out.append(coef)
    return out


def _difference_coefficients(rows, alphas, g) -> np.ndarray:
    """Matrix V with V[r] = coefficients of A_r(u_0), zero-padded to a common degree."""
    polys = _null_polynomials(rows, alphas, g)
    deg = max(max(len(c) for c in polys) - 1, int(rows[:, 0].max()))
    V = np.zeros((len(polys), deg + 1))
    for i, c in enumerate(polys):
        V[i, : len(c)] = c
    V[np.arange(len(polys)), rows[:, 0]] -= 1.0
    return V


def tn_closed_form(series, model: InarModel, cfg: StatConfig) -> float:
    """Integral-free evaluation of the statistic for integer ``a``.

    Uses int_0^1 u^x du = 1/(1+x) on every monomial; window pairs are grouped by
    their value profile and the final double sum is accumulated with ``math.fsum``.
    """
    if not _is_integer(cfg.a):
        raise NonIntegerWeight(f"closed form requires an integer weight, got a={cfg.a}; use method='quad'")
    s, a = cfg.s, float(cfg.a)
    cs = _check(series, model, s)
    n = cs.n
    rows, counts = grouped_windows(cs, s)
    alphas = model.padded_alphas(s)
    V = _difference_coefficients(rows, alphas, model.innovations.masses)
    d = np.arange(V.shape[1])
    H = 1.0 / (1.0 + d[:, None] + d[None, :] + a)
    Q = V @ H @ V.T
    lags = rows[:, 1:].astype(float)
    K = np.ones_like(Q)
    for j in range(s):
        K /= 1.0 + lags[:, j][:, None] + lags[:, j][None, :] + a
    terms = (counts[:, None] * counts[None, :]) * Q * K
    total = math.fsum(terms.ravel())
    return max(0.0, n / (n - s) ** 2 * (a + 1.0) ** (s + 1) * total)


def _gauss_nodes(k: int, a: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on [0,1] and weights that already include the density (a+1) u^a.

    Gauss-Legendre for integer ``a`` (u^a is then part of the polynomial
    integrand); Gauss-Jacobi with the u^a factor as weight otherwise.
    """
    if _is_integer(a):
        x, w = np.polynomial.legendre.leggauss(k)
        u = (x + 1.0) / 2.0
        return u, w / 2.0 * (a + 1.0) * u**a
    x, w = roots_jacobi(k, 0.0, a)
    u = (x + 1.0) / 2.0
    return u, w / 2.0 ** (a + 1.0) * (a + 1.0)


def quadrature_nodes(series, model: InarModel, cfg: StatConfig) -> list[int]:
    """Per-axis node counts that make the quadrature exact (capped at 64)."""
    cs = _check(series, model, cfg.s)
    mx = int(cs.values.max())
    extra = int(math.ceil(cfg.a)) if _is_integer(cfg.a) else 0
    deg0 = model.innovations.K + cfg.s * mx
    counts = [math.ceil((2 * deg0 + extra + 1) / 2)] + [math.ceil((2 * mx + extra + 1) / 2)] * cfg.s
    if cfg.nodes is not None:
        counts = [cfg.nodes] * (cfg.s + 1)
    counts = [max(2, c) for c in counts]
    if max(counts) > MAX_NODES:
        warnings.warn(f"quadrature capped at {MAX_NODES} nodes per axis; result is no longer exact",
                      RuntimeWarning, stacklevel=3)
        counts = [min(c, MAX_NODES) for c in counts]
    return counts


def tn_quadrature(series, model: InarModel, cfg: StatConfig) -> float:
    """n times the weighted integral of the squared pgf difference, on a tensor Gauss grid."""
    s, a = cfg.s, float(cfg.a)
    cs = _check(series, model, s)
    n = cs.n
    rows, counts = grouped_windows(cs, s)
    alphas = model.padded_alphas(s)
    nodes = quadrature_nodes(cs, model, cfg)
    u0, w0 = _gauss_nodes(nodes[0], a)
    V = _difference_coefficients(rows, alphas, model.innovations.masses)
    # A[r, i] = A_r(u0_i) / (n - s), weighted by multiplicity
    A = np.polynomial.polynomial.polyvander(u0, V.shape[1] - 1) @ V.T
    A = (A * (counts / (n - s))).T
    factors = [A]
    weights = [w0]
    for j in range(s):
        uj, wj = _gauss_nodes(nodes[j + 1], a)
        factors.append(np.power(uj[None, :], rows[:, j + 1][:, None]))
        weights.append(wj)
    letters = "abcdefghij"[: s + 1]
    D = np.einsum(",".join("r" + c for c in letters) + "->" + letters, *factors)
    W = weights[0]
    for wj in weights[1:]:
        W = np.multiply.outer(W, wj)
    return float(n * np.sum(W * D * D))


def tn(series, model: InarModel, cfg: StatConfig) -> float:
    """Order-``cfg.s`` statistic; coefficients beyond the model order are taken as zero."""
    if cfg.method == "quad":
        return tn_quadrature(series, model, cfg)
    return tn_closed_form(series, model, cfg)
