"""Bootstrap calibration of the pgf statistic.

``gof_test`` runs the semi-parametric INAR bootstrap for one observed series:
simulate from the fitted model with its nonparametric innovation pmf, refit,
recompute the statistic, and compare. ``warp_speed_experiment`` is the Monte
Carlo shortcut for size/power studies, where every simulated sample contributes
a single bootstrap statistic to one pooled null distribution.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .core import InvalidParameter, validate_series
from .dgp import DEFAULT_BURN_IN, DgpSpec, RngStream, simulate, simulate_inar
from .estimate import DegenerateInput, FitOptions, FitResult, fit_semiparametric
from .gof import StatConfig, tn

FAILURE_WARN_FRACTION = 0.01


def _as_stream(seed) -> RngStream:
    return seed if isinstance(seed, RngStream) else RngStream(int(seed))


def empirical_quantile(values, q: float) -> float:
    """Left-continuous inverse of the empirical cdf: inf{x : F(x) >= q}; ``-inf`` at q = 0."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise InvalidParameter("quantile of an empty sample")
    k = math.ceil(q * v.size - 1e-12)
    if k <= 0:
        return -math.inf
    return float(v[min(k, v.size) - 1])


def bootstrap_p_value(statistic: float, replicates) -> float:
    """(1 + #{T* >= T}) / (B + 1)."""
    r = np.asarray(replicates, dtype=float)
    return (1.0 + np.count_nonzero(r >= statistic)) / (r.size + 1.0)


@dataclass(frozen=True, eq=False)
class GofResult:
    statistic: float
    p_value: float
    replicates: np.ndarray
    fit: FitResult
    cfg: StatConfig
    B: int
    seed: RngStream
    excluded: int = 0
    warning: bool = False
    burn_in: int = DEFAULT_BURN_IN

    def reject(self, level: float = 0.05) -> bool:
        """Reject when the statistic exceeds the (1 - level) quantile of the replicates."""
        return self.statistic > empirical_quantile(self.replicates, 1.0 - level)


def _usable(fit: FitResult) -> bool:
    return not fit.degenerate and math.isfinite(fit.loglik)


def _replicate(task, series_n, model, p, cfgs, burn_in, init, opts):
    """Statistics of one bootstrap series for each config, or None if the refit degenerates."""
    gen = task.generator()
    xb = simulate_inar(model, series_n, gen, burn_in=burn_in, init=init)
    fb = fit_semiparametric(xb, p, opts)
    if not _usable(fb):
        return None
    return [tn(xb, fb.model, c) for c in cfgs]


def gof_test(series, p: int = 1, cfg: StatConfig | None = None, B: int = 1000,
             r: int = DEFAULT_BURN_IN, seed=0, opts: FitOptions | None = None,
             threads: int | None = None) -> GofResult:
    """Semi-parametric INAR bootstrap test of an INAR(p) null.

    Replicate ``b`` uses the random stream ``seed.spawn(b)``; the bootstrap burn-in
    starts from the rounded mean of the observed series. Replicates whose refit
    is degenerate (constant bootstrap series) are dropped and counted in
    ``excluded``; ``warning`` is set when more than 1% are lost.
    """
    cfg = cfg or StatConfig(s=p)
    if B < 1:
        raise InvalidParameter("B must be at least 1")
    cs = validate_series(series)
    cs.require_longer_than(cfg.s)
    stream = _as_stream(seed)
    opts = opts or FitOptions()
    fit = fit_semiparametric(cs, p, opts)
    if fit.degenerate:
        raise DegenerateInput("constant series: the INAR coefficients are not identified")
    statistic = tn(cs, fit.model, cfg)
    init = int(round(float(cs.values.mean())))
    work = functools.partial(_replicate, series_n=cs.n, model=fit.model, p=p, cfgs=[cfg],
                             burn_in=r, init=init, opts=opts)
    out = pmap(work, [stream.spawn(b) for b in range(B)], threads)
    reps = np.array([o[0] for o in out if o is not None], dtype=float)
    excluded = B - reps.size
    return GofResult(
        statistic=statistic,
        p_value=bootstrap_p_value(statistic, reps),
        replicates=reps,
        fit=fit,
        cfg=cfg,
        B=B,
        seed=stream,
        excluded=excluded,
        warning=excluded > FAILURE_WARN_FRACTION * B,
        burn_in=r,
    )


@dataclass(frozen=True, eq=False)
class WarpSpeedStats:
    """Per-sample statistics and pooled bootstrap statistics, one row per config."""

    cfgs: tuple
    statistics: np.ndarray
    bootstrap: np.ndarray
    excluded: int
    M: int

    def rejection_rate(self, level: float = 0.05, index: int = 0) -> float:
        if self.statistics.shape[1] == 0:
            return float("nan")
        q = empirical_quantile(self.bootstrap[index], 1.0 - level)
        return float(np.mean(self.statistics[index] > q))


def _warp_sample(task, dgp, n, p, cfgs, r, opts):
    gen = task.generator()
    x = simulate(dgp, n, gen)
    fit = fit_semiparametric(x, p, opts)
    if not _usable(fit):
        return None
    stats = [tn(x, fit.model, c) for c in cfgs]
    init = int(round(float(x.values.mean())))
    xb = simulate_inar(fit.model, n, gen, burn_in=r, init=init)
    fb = fit_semiparametric(xb, p, opts)
    if not _usable(fb):
        return None
    boot = [tn(xb, fb.model, c) for c in cfgs]
    return stats, boot


def warp_speed_statistics(dgp: DgpSpec, n: int, p: int, cfgs, M: int, r: int = DEFAULT_BURN_IN,
                          seed=0, opts: FitOptions | None = None,
                          threads: int | None = None) -> WarpSpeedStats:
    """Warp-speed Monte Carlo for several statistic configs on shared samples.

    Sample ``m`` draws everything (data, bootstrap thinnings and innovations)
    from ``seed.spawn(m)``: simulate ``n`` observations, fit, compute the
    statistic, generate one bootstrap series from the fit, refit, and compute one
    bootstrap statistic. Samples with a degenerate fit are excluded and counted.
    """
    if isinstance(cfgs, StatConfig):
        cfgs = [cfgs]
    cfgs = tuple(cfgs)
    for c in cfgs:
        if c.s < p:
            raise InvalidParameter(f"pgf order s={c.s} is below the fitted order p={p}")
    stream = _as_stream(seed)
    opts = opts or FitOptions()
    work = functools.partial(_warp_sample, dgp=dgp, n=n, p=p, cfgs=cfgs, r=r, opts=opts)
    out = pmap(work, [stream.spawn(m) for m in range(M)], threads)
    kept = [o for o in out if o is not None]
    k = len(cfgs)
    stats = np.array([o[0] for o in kept], dtype=float).reshape(-1, k).T
    boot = np.array([o[1] for o in kept], dtype=float).reshape(-1, k).T
    return WarpSpeedStats(cfgs, stats, boot, M - len(kept), M)


def warp_speed_experiment(dgp: DgpSpec, n: int, p: int, cfg: StatConfig, M: int,
                          r: int = DEFAULT_BURN_IN, seed=0, level: float = 0.05,
                          opts: FitOptions | None = None, threads: int | None = None) -> float:
    """Rejection rate at ``level``: share of samples whose statistic exceeds the
    (1 - level) quantile of the pooled bootstrap statistics."""
    if M < 50:
        raise InvalidParameter("warp-speed pooling needs M >= 50 Monte Carlo samples")
    if not 0.0 < level <= 1.0:
        raise InvalidParameter(f"level must lie in (0, 1], got {level}")
    res = warp_speed_statistics(dgp, n, p, [cfg], M, r, seed, opts, threads)
    return res.rejection_rate(level)
