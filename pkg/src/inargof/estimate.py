"""Semi-parametric conditional maximum likelihood for INAR(p).

The innovation pmf is left unrestricted on ``0..max(X)`` and estimated jointly
with the thinning coefficients. Maximization is by EM on the latent split of
each observation into thinning survivors (one per lag) and an innovation: the
E-step is an exact posterior over that split, and both M-steps are closed-form.
Every accepted iteration increases the conditional log-likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_toeplitz
from scipy.special import gammaln, xlogy

from .core import (
    InarError,
    InarModel,
    InvalidParameter,
    Pmf,
    sample_acf,
    validate_series,
)

ALPHA_LO = 1e-6
ALPHA_HI = 1.0 - 1e-6
LOG_FLOOR = 1e-300


class ZeroLikelihood(InarError, ValueError):
    """A transition in the series has probability zero under the model."""

    def __init__(self, t: int):
        self.t = t
        super().__init__(f"transition into observation {t} has zero probability under the model")


class DegenerateInput(InarError, ValueError):
    """Constant series: the thinning coefficients are not identified."""


class NonConvergence(InarError, RuntimeError):
    pass


@dataclass(frozen=True)
class FitOptions:
    tol: float = 1e-8
    max_iter: int = 500
    accelerate: bool = True


@dataclass(frozen=True, eq=False)
class FitResult:
    model: InarModel
    loglik: float
    iterations: int
    converged: bool
    degenerate: bool = False
    boundary: bool = False
    history: tuple = field(default=(), repr=False)


def _binom_pmf(x: np.ndarray, i: np.ndarray, alpha: float) -> np.ndarray:
    """Bin(x, alpha) mass at i, broadcasting; zero where i > x."""
    x = np.asarray(x, dtype=float)
    i = np.asarray(i, dtype=float)
    ok = i <= x
    with np.errstate(invalid="ignore", divide="ignore"):
        logc = gammaln(x + 1) - gammaln(i + 1) - gammaln(np.where(ok, x - i, 0) + 1)
        logp = logc + xlogy(i, alpha) + xlogy(np.where(ok, x - i, 0), 1.0 - alpha)
        out = np.exp(logp)
    return np.where(ok, out, 0.0)


def transition_probability(model: InarModel, lags, next: int) -> float:
    """P(X_t = next | X_{t-1..t-p} = lags): the convolution Bin(lags[0], a1) * ... * G at ``next``."""
    lags = [int(v) for v in lags]
    if len(lags) != model.p:
        raise InvalidParameter(f"expected {model.p} lagged values, got {len(lags)}")
    if next < 0:
        return 0.0
    dist = model.innovations.masses
    for a, x in zip(model.alphas, lags):
        dist = np.convolve(dist, _binom_pmf(x, np.arange(x + 1), a))
    return float(dist[next]) if next < dist.shape[0] else 0.0


class _Kernel:
    """Transition likelihood machinery for one series and model order.

    Windows ``(X_t, X_{t-1}, ..., X_{t-p})`` are grouped into distinct rows with
    multiplicities; all work is done on the (rows x survivors^p) posterior tensor.
    """

    def __init__(self, x: np.ndarray, p: int):
        n = x.shape[0]
        self.p = p
        self.m = m = int(x.max())
        windows = np.column_stack([x[p - j : n - j] for j in range(p + 1)])
        rows, first, counts = np.unique(windows, axis=0, return_index=True, return_counts=True)
        self.first_t = first + p
        self.y = rows[:, 0]
        self.lags = rows[:, 1:]
        self.counts = counts.astype(float)
        self.nobs = float(n - p)
        self.lag_totals = (self.counts[:, None] * self.lags).sum(axis=0)
        grid = np.arange(m + 1)
        # log binomial coefficients for every (x, i) in [0, m]^2
        with np.errstate(invalid="ignore"):
            self._logc = gammaln(grid[:, None] + 1) - gammaln(grid[None, :] + 1) - gammaln(
                np.maximum(grid[:, None] - grid[None, :], 0) + 1)
        self._tri = grid[None, :] <= grid[:, None]
        self._grid = grid
        self._diff = np.maximum(grid[:, None] - grid[None, :], 0)
        # innovation index y - sum(i) for each cell of the tensor, offset so negatives hit zeros
        shape = (len(self.y),) + (m + 1,) * p
        s = np.zeros((1,) + (m + 1,) * p, dtype=np.int64)
        for j in range(p):
            ax = [1] * (p + 1)
            ax[j + 1] = m + 1
            s = s + grid.reshape(ax)
        k = self.y.reshape((-1,) + (1,) * p) - s
        self.k_index = np.broadcast_to(k, shape)
        self._offset = p * m
        self.k_gather = self.k_index + self._offset
        self.k_valid = self.k_index >= 0
        self._k_flat = np.where(self.k_valid, self.k_index, m + 1).ravel()
        self._surv = [np.broadcast_to(grid.reshape([1] * (j + 1) + [m + 1] + [1] * (p - j - 1)), shape)
                      for j in range(p)]

    def binom_table(self, alpha: float) -> np.ndarray:
        g = self._grid
        logp = self._logc + xlogy(g[None, :], alpha) + xlogy(self._diff, 1.0 - alpha)
        return np.where(self._tri, np.exp(logp), 0.0)

    def joint(self, alphas, g: np.ndarray) -> np.ndarray:
        """Unnormalized posterior tensor J[r, i_1..i_p] = prod_j Bin(L_rj, a_j)(i_j) * G(y_r - sum i)."""
        p = self.p
        gext = np.concatenate([np.zeros(self._offset), g[: self.m + 1],
                               np.zeros(max(0, self.m + 1 - g.shape[0]))])
        J = gext[self.k_gather]
        for j in range(p):
            b = self.binom_table(alphas[j])[self.lags[:, j]]
            shape = [b.shape[0]] + [1] * p
            shape[j + 1] = self.m + 1
            J = J * b.reshape(shape)
        return J

    def probs(self, alphas, g) -> np.ndarray:
        J = self.joint(alphas, g)
        return J.reshape(J.shape[0], -1).sum(axis=1)

    def loglik(self, alphas, g) -> float:
        P = self.probs(alphas, g)
        return float(np.dot(self.counts, np.log(np.maximum(P, LOG_FLOOR))))

    def em_step(self, alphas, g, update_alpha: bool = True):
        """One EM update; also returns the log-likelihood at the *input* parameters."""
        J = self.joint(alphas, g)
        flat = J.reshape(J.shape[0], -1)
        P = flat.sum(axis=1)
        ll = float(np.dot(self.counts, np.log(np.maximum(P, LOG_FLOOR))))
        w = (self.counts / np.maximum(P, LOG_FLOOR)).reshape((-1,) + (1,) * self.p)
        post = J * w
        g_new = np.bincount(self._k_flat, weights=post.ravel(), minlength=self.m + 2)[: self.m + 1]
        g_new /= self.nobs
        if update_alpha:
            a_new = np.array(alphas, dtype=float)
            for j in range(self.p):
                if self.lag_totals[j] > 0:
                    a_new[j] = float((post * self._surv[j]).sum()) / self.lag_totals[j]
        else:
            a_new = np.array(alphas, dtype=float)
        return a_new, g_new, ll


def _project_alphas(a: np.ndarray) -> np.ndarray:
    a = np.clip(a, ALPHA_LO, ALPHA_HI)
    total = a.sum()
    if total > ALPHA_HI:
        a = a * (ALPHA_HI / total)
    return a


def _project_pmf(g: np.ndarray) -> np.ndarray:
    g = np.maximum(g, 0.0)
    return g / g.sum()


def conditional_loglik(model: InarModel, series, strict: bool = True) -> float:
    """Sum over t > p of log P(X_t | X_{t-1}, ..., X_{t-p}) under ``model``.

    With ``strict`` a zero-probability transition raises :class:`ZeroLikelihood`
    naming the first offending (0-based) time index; otherwise ``-inf`` is returned.
    """
    cs = validate_series(series)
    cs.require_longer_than(model.p)
    kern = _Kernel(cs.values, model.p)
    P = kern.probs(model.alphas, model.innovations.masses)
    if np.any(P <= 0):
        if strict:
            raise ZeroLikelihood(int(kern.first_t[P <= 0].min()))
        return -math.inf
    return math.fsum(kern.counts * np.log(P))


def yule_walker_init(series, p: int) -> InarModel:
    """Moment-based starting point for the likelihood maximization.

    Coefficients come from the Yule-Walker equations, clamped into [0.01, 0.95]
    and shrunk if their sum reaches 0.99. The innovation pmf is the empirical
    distribution of ``max(X_t - round(sum_j a_j X_{t-j}), 0)`` on ``0..max(X)``.
    """
    cs = validate_series(series)
    cs.require_longer_than(p)
    if p < 1:
        raise InvalidParameter("model order p must be at least 1")
    r = sample_acf(cs, p)
    alphas = solve_toeplitz(r[:p], r[1 : p + 1]) if p > 1 else np.array([r[1]])
    alphas = np.clip(np.nan_to_num(alphas, nan=0.01), 0.01, 0.95)
    if alphas.sum() >= 0.99:
        alphas = alphas * (0.98 / alphas.sum())
    x = cs.values
    n = cs.n
    fitted = np.zeros(n - p)
    for j in range(1, p + 1):
        fitted += alphas[j - 1] * x[p - j : n - j]
    resid = np.maximum(x[p:] - np.round(fitted).astype(np.int64), 0)
    g = np.bincount(resid, minlength=int(x.max()) + 1).astype(float)
    return InarModel(tuple(alphas), Pmf(g / g.sum()))


def _feasible(a: np.ndarray, g: np.ndarray) -> bool:
    return bool(np.all(a >= ALPHA_LO) and np.all(a <= ALPHA_HI) and a.sum() <= ALPHA_HI
                and np.all(g >= 0))


def _squarem_step(kern: _Kernel, a0, g0):
    """SQUAREM extrapolation from two EM steps (Varadhan & Roland, 2008).

    The step length is halved toward the plain double-EM update until the
    extrapolated point is feasible; clipping instead would pin pmf masses at
    zero, where EM can never revive them.
    """
    p = len(a0)
    a1, g1, _ = kern.em_step(a0, g0)
    a1, g1 = _project_alphas(a1), _project_pmf(g1)
    a2, g2, _ = kern.em_step(a1, g1)
    a2, g2 = _project_alphas(a2), _project_pmf(g2)
    ll2 = kern.loglik(a2, g2)
    th0 = np.concatenate([a0, g0])
    th1 = np.concatenate([a1, g1])
    r = th1 - th0
    v = np.concatenate([a2, g2]) - th1 - r
    nv = np.linalg.norm(v)
    if nv == 0:
        return a2, g2, ll2
    step = min(-np.linalg.norm(r) / nv, -1.0)
    for _ in range(30):
        th = th0 - 2 * step * r + step * step * v
        if _feasible(th[:p], th[p:]) or step == -1.0:
            break
        step = min((step - 1.0) / 2.0, -1.0)
    if step == -1.0:
        return a2, g2, ll2
    a3, g3 = th[:p], th[p:] / th[p:].sum()
    a4, g4, _ = kern.em_step(a3, g3)
    a4, g4 = _project_alphas(a4), _project_pmf(g4)
    ll4 = kern.loglik(a4, g4)
    if ll4 > ll2:
        return a4, g4, ll4
    return a2, g2, ll2


def fit_semiparametric(series, p: int = 1, opts: FitOptions | None = None) -> FitResult:
    """Maximize the conditional likelihood over coefficients and an unrestricted innovation pmf.

    Parameters
    ----------
    series : CountSeries or sequence of counts
    p : int
        Model order.
    opts : FitOptions, optional
        ``tol`` is the log-likelihood improvement below which iteration stops;
        ``max_iter`` bounds the number of accepted iterations.

    Returns
    -------
    FitResult
        A constant series yields ``alpha = 0`` and a point-mass innovation with
        ``degenerate=True``. When ``max_iter`` is reached the best iterate is
        returned with ``converged=False``.
    """
    opts = opts or FitOptions()
    cs = validate_series(series)
    if p < 1:
        raise InvalidParameter("model order p must be at least 1")
    cs.require_longer_than(p)
    x = cs.values
    if np.all(x == x[0]):
        model = InarModel((0.0,) * p, Pmf.point_mass(int(x[0])))
        return FitResult(model, 0.0, 0, True, degenerate=True, history=(0.0,))

    kern = _Kernel(x, p)
    m = kern.m
    init = yule_walker_init(cs, p)
    g_init = init.innovations.padded(m + 1)
    a_init = _project_alphas(np.array(init.alphas))
    ll_init = kern.loglik(a_init, g_init)

    # start from a smoothed pmf so EM can reach every support point
    a = a_init.copy()
    g = 0.9 * g_init + 0.1 / (m + 1)
    ll = kern.loglik(a, g)
    if ll < ll_init:
        a, g, ll = a_init.copy(), g_init.copy(), ll_init
    history = [ll]
    converged = False
    it = 0
    while it < opts.max_iter:
        it += 1
        if opts.accelerate:
            a_new, g_new, ll_new = _squarem_step(kern, a, g)
        else:
            a_new, g_new, _ = kern.em_step(a, g)
            a_new, g_new = _project_alphas(a_new), _project_pmf(g_new)
            ll_new = kern.loglik(a_new, g_new)
        if ll_new < ll:
            # projection broke the EM guarantee: fall back to the innovation-only update
            a_new = a
            _, g_new, _ = kern.em_step(a, g, update_alpha=False)
            g_new = _project_pmf(g_new)
            ll_new = kern.loglik(a_new, g_new)
            if ll_new < ll:
                a_new, g_new, ll_new = a, g, ll
        improvement = ll_new - ll
        a, g, ll = a_new, g_new, ll_new
        history.append(ll)
        if improvement < opts.tol:
            converged = True
            break

    # drop numerically-zero masses above the last supported value
    g = np.where(g < 1e-300, 0.0, g)
    model = InarModel(tuple(float(v) for v in a), Pmf(g / g.sum()))
    P = kern.probs(model.alphas, model.innovations.masses)
    final_ll = math.fsum(kern.counts * np.log(P)) if np.all(P > 0) else -math.inf
    boundary = bool(np.any(a <= ALPHA_LO * 1.0001) or a.sum() >= ALPHA_HI * 0.9999)
    return FitResult(model, final_ll, it, converged, boundary=boundary, history=tuple(history))
