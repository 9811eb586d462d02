"""Shared types, input validation and descriptive statistics for count series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class InarError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(InarError, ValueError):
    def __init__(self, index: int = 0):
        self.index = index
        super().__init__("input series is empty")


class NegativeValue(InarError, ValueError):
    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"negative count {value!r} at index {index}")


class NonIntegerValue(InarError, ValueError):
    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"non-integer value {value!r} at index {index}")


class DegenerateSeries(InarError, ValueError):
    """Raised when a statistic is undefined for the given series (zero mean or variance)."""


class InvalidParameter(InarError, ValueError):
    """Raised for model or distribution parameters outside their domain."""


@dataclass(frozen=True, eq=False)
class CountSeries:
    """Validated vector of non-negative integer counts.

    Build instances with :func:`validate_series`; the constructor trusts its input.
    """

    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountSeries):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def require_longer_than(self, p: int) -> None:
        if self.n <= p:
            raise InvalidParameter(f"series of length {self.n} is too short for {p} lags")


def validate_series(raw: Iterable, name: str = "") -> CountSeries:
    """Check that every entry is a non-negative integer and wrap it as a CountSeries.

    Floats are accepted when they hold an exact integer value (``3.0``); booleans
    and strings are rejected.
    """
    if isinstance(raw, CountSeries):
        return raw
    items = list(raw.tolist() if isinstance(raw, np.ndarray) else raw)
    if not items:
        raise EmptyInput()
    out = np.empty(len(items), dtype=np.int64)
    for i, v in enumerate(items):
        if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, float, np.integer, np.floating)):
            raise NonIntegerValue(i, v)
        if isinstance(v, (float, np.floating)):
            if not math.isfinite(v) or v != math.floor(v):
                if math.isfinite(v) and v < 0:
                    raise NegativeValue(i, v)
                raise NonIntegerValue(i, v)
            v = int(v)
        if v < 0:
            raise NegativeValue(i, v)
        out[i] = int(v)
    return CountSeries(out, name)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function on ``{0, 1, ..., K}`` stored as a dense vector.

    Trailing zero masses are trimmed so that ``K`` is the largest index with
    positive mass. Masses summing to within 1e-9 of one are renormalized;
    anything further off raises :class:`InvalidParameter`.
    """

    masses: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=float).ravel()
        if m.size == 0:
            raise InvalidParameter("a pmf needs at least one mass")
        if not np.all(np.isfinite(m)):
            raise InvalidParameter("pmf masses must be finite")
        if np.any(m < 0) or np.any(m > 1 + 1e-12):
            raise InvalidParameter("pmf masses must lie in [0, 1]")
        total = math.fsum(m)
        if abs(total - 1.0) > 1e-9:
            raise InvalidParameter(f"pmf masses sum to {total!r}, not 1")
        nz = np.flatnonzero(m > 0)
        m = m[: nz[-1] + 1] / total
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @classmethod
    def point_mass(cls, k: int) -> "Pmf":
        m = np.zeros(int(k) + 1)
        m[k] = 1.0
        return cls(m)

    @property
    def K(self) -> int:
        return self.masses.shape[0] - 1

    def __getitem__(self, k: int) -> float:
        if 0 <= k <= self.K:
            return float(self.masses[k])
        return 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return np.array_equal(self.masses, other.masses)

    def mean(self) -> float:
        return float(np.dot(np.arange(self.K + 1), self.masses))

    def padded(self, length: int) -> np.ndarray:
        """Masses as a vector of exactly ``length`` entries (zero-padded or truncated)."""
        out = np.zeros(length)
        k = min(length, self.K + 1)
        out[:k] = self.masses[:k]
        return out


@dataclass(frozen=True, eq=False)
class InarModel:
    """INAR(p) parameters: thinning coefficients and the innovation pmf."""

    alphas: tuple
    innovations: Pmf

    def __post_init__(self):
        a = tuple(float(x) for x in np.atleast_1d(self.alphas))
        if not a:
            raise InvalidParameter("an INAR model needs order p >= 1")
        if any(not (0.0 <= x <= 1.0) for x in a):
            raise InvalidParameter(f"thinning coefficients must lie in [0, 1], got {a}")
        if sum(a) >= 1.0:
            raise InvalidParameter(f"thinning coefficients must sum to less than 1, got {sum(a)}")
        if not isinstance(self.innovations, Pmf):
            raise InvalidParameter("innovations must be a Pmf")
        object.__setattr__(self, "alphas", a)

    @property
    def p(self) -> int:
        return len(self.alphas)

    def padded_alphas(self, s: int) -> np.ndarray:
        """Coefficients extended with zeros up to lag ``s``."""
        if s < self.p:
            raise InvalidParameter(f"statistic order {s} is below model order {self.p}")
        out = np.zeros(s)
        out[: self.p] = self.alphas
        return out

    def stationary_mean(self) -> float:
        return self.innovations.mean() / (1.0 - sum(self.alphas))

    def __eq__(self, other) -> bool:
        if not isinstance(other, InarModel):
            return NotImplemented
        return self.alphas == other.alphas and self.innovations == other.innovations


def sample_moments(series: CountSeries) -> tuple[float, float, float]:
    """Sample mean, variance (denominator n-1) and dispersion index variance/mean."""
    x = validate_series(series).values.astype(float)
    if x.size < 2:
        raise InvalidParameter("sample moments need at least two observations")
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    if mean == 0.0:
        raise DegenerateSeries("dispersion index is undefined for an all-zero series")
    return mean, var, var / mean


def _autocov(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = x.shape[0]
    d = x - x.mean()
    return np.array([np.dot(d[: n - h], d[h:]) / n for h in range(max_lag + 1)])


def sample_acf(series: CountSeries, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags ``0..max_lag`` using the biased (1/n) autocovariance."""
    x = validate_series(series).values.astype(float)
    if not 1 <= max_lag < x.shape[0]:
        raise InvalidParameter(f"max_lag must satisfy 1 <= max_lag < n, got {max_lag}")
    c = _autocov(x, max_lag)
    if c[0] == 0.0:
        raise DegenerateSeries("autocorrelation is undefined for a constant series")
    return np.clip(c / c[0], -1.0, 1.0)


def durbin_levinson(acf: Sequence[float]) -> np.ndarray:
    """Partial autocorrelations from autocorrelations ``acf[0..m]`` (``acf[0] == 1``).

    Returns an array of length ``m + 1`` with the lag-0 entry set to 1.
    """
    r = np.asarray(acf, dtype=float)
    m = r.shape[0] - 1
    pacf = np.ones(m + 1)
    phi = np.zeros(m + 1)
    v = 1.0
    for k in range(1, m + 1):
        if v <= 0:
            pacf[k:] = 0.0
            break
        num = r[k] - np.dot(phi[1:k], r[k - 1 : 0 : -1])
        a = num / v
        new = phi.copy()
        new[k] = a
        new[1:k] = phi[1:k] - a * phi[k - 1 : 0 : -1]
        phi = new
        v *= 1.0 - a * a
        pacf[k] = a
    return pacf


def sample_pacf(series: CountSeries, max_lag: int) -> np.ndarray:
    """Sample partial autocorrelations at lags ``0..max_lag`` (Durbin-Levinson on :func:`sample_acf`)."""
    return durbin_levinson(sample_acf(series, max_lag))
