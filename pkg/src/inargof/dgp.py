"""Data-generating processes for count time series.

Every simulator consumes randomness only through the generator it is handed, so a
fixed :class:`RngStream` reproduces a series bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import stats

from .core import CountSeries, InarModel, InvalidParameter, Pmf

DEFAULT_BURN_IN = 100
DEFAULT_TAIL_EPS = 1e-12


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream: the pair (seed, stream) plus an optional child path.

    Two streams with the same address always yield the same numbers, whatever
    else has been drawn elsewhere. ``spawn(i)`` derives an independent child.
    """

    seed: int
    stream: int = 0
    path: tuple = ()

    def spawn(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),) + self.path)
        return np.random.Generator(np.random.PCG64(ss))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def binomial_thin(alpha: float, x: int, rng: RngLike) -> int:
    """Binomial thinning ``alpha o x``: the number of survivors among ``x`` Bernoulli(alpha) trials."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameter(f"thinning probability must lie in [0, 1], got {alpha}")
    if x < 0:
        raise InvalidParameter(f"cannot thin a negative count {x}")
    return int(as_generator(rng).binomial(int(x), alpha))


# Innovation families


@dataclass(frozen=True)
class Poisson:
    lam: float


@dataclass(frozen=True)
class NegBin:
    """Negative binomial with pmf C(k+N-1, k) pi^N (1-pi)^k."""

    N: float
    pi: float


@dataclass(frozen=True)
class Geometric:
    pi: float


@dataclass(frozen=True)
class PointMass:
    k: int


def make_innovation_pmf(family, tail_eps: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Dense pmf of a parametric family, truncated where the upper tail drops below ``tail_eps``."""
    if not 0.0 < tail_eps <= 1e-6:
        raise InvalidParameter(f"tail_eps must lie in (0, 1e-6], got {tail_eps}")
    if isinstance(family, PointMass):
        if family.k < 0 or int(family.k) != family.k:
            raise InvalidParameter(f"point mass location must be a non-negative integer, got {family.k}")
        return Pmf.point_mass(int(family.k))
    if isinstance(family, Poisson):
        if not family.lam > 0:
            raise InvalidParameter(f"Poisson mean must be positive, got {family.lam}")
        dist = stats.poisson(family.lam)
    elif isinstance(family, (NegBin, Geometric)):
        N = 1.0 if isinstance(family, Geometric) else family.N
        if not N > 0 or not 0.0 < family.pi <= 1.0:
            raise InvalidParameter(f"invalid negative binomial parameters {family}")
        dist = stats.nbinom(N, family.pi)
    else:
        raise InvalidParameter(f"unknown innovation family {family!r}")
    K = max(int(dist.isf(tail_eps)), 0)
    while K > 0 and dist.sf(K - 1) <= tail_eps:
        K -= 1
    while dist.sf(K) > tail_eps:
        K += 1
    masses = dist.pmf(np.arange(K + 1))
    return Pmf(masses / masses.sum())


# Processes


@dataclass(frozen=True)
class InarP:
    model: InarModel

    def unconditional_mean(self) -> float:
        return self.model.stationary_mean()


@dataclass(frozen=True)
class Ingarch11:
    """Poisson INGARCH(1,1): M_t = beta0 + beta1 M_{t-1} + alpha1 X_{t-1}, X_t ~ Poi(M_t)."""

    beta0: float
    beta1: float
    alpha1: float

    def __post_init__(self):
        if not (self.beta0 > 0 and self.beta1 >= 0 and self.alpha1 >= 0):
            raise InvalidParameter(f"INGARCH(1,1) needs beta0 > 0 and non-negative beta1, alpha1: {self}")
        if self.beta1 + self.alpha1 >= 1:
            raise InvalidParameter("INGARCH(1,1) is non-stationary unless beta1 + alpha1 < 1")

    def unconditional_mean(self) -> float:
        return self.beta0 / (1.0 - self.beta1 - self.alpha1)


@dataclass(frozen=True)
class Inarch1:
    """Poisson INARCH(1): X_t ~ Poi(beta + alpha X_{t-1})."""

    beta: float
    alpha: float

    def __post_init__(self):
        if not (self.beta > 0 and 0 <= self.alpha < 1):
            raise InvalidParameter(f"INARCH(1) needs beta > 0 and alpha in [0, 1): {self}")

    def unconditional_mean(self) -> float:
        return self.beta / (1.0 - self.alpha)


@dataclass(frozen=True)
class PoiDar1:
    """Poisson DAR(1): repeat the previous value with probability alpha, else draw Poi(lam)."""

    lam: float
    alpha: float

    def __post_init__(self):
        if not (self.lam > 0 and 0 <= self.alpha < 1):
            raise InvalidParameter(f"Poi-DAR(1) needs lam > 0 and alpha in [0, 1): {self}")

    def unconditional_mean(self) -> float:
        return self.lam


@dataclass(frozen=True)
class DgpSpec:
    """A process variant plus the number of leading observations to discard.

    ``label`` is the mini-language form (``poi-inar1:lambda=1,alpha=0.5``) when the
    spec was built through :func:`parse_dgp` or the helper constructors.
    """

    variant: Union[InarP, Ingarch11, Inarch1, PoiDar1]
    burn_in: int = DEFAULT_BURN_IN
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.burn_in < 0:
            raise InvalidParameter("burn_in must be non-negative")

    @property
    def name(self) -> str:
        return self.label.split(":", 1)[0] if self.label else type(self.variant).__name__.lower()

    @property
    def params(self) -> str:
        return self.label.split(":", 1)[1] if ":" in self.label else ""


def _draw_innovations(pmf: Pmf, size: int, gen: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(pmf.masses)
    idx = np.searchsorted(cdf, gen.random(size), side="right")
    return np.minimum(idx, pmf.K)


def simulate_inar(model: InarModel, n: int, rng: RngLike, burn_in: int = DEFAULT_BURN_IN,
                  init: int | None = None) -> CountSeries:
    """Simulate ``burn_in + n`` steps of the INAR(p) recursion and keep the last ``n``.

    The ``p`` pre-sample values are all set to ``init`` (default: the rounded
    stationary mean). Innovations are drawn first, then thinnings step by step.
    """
    gen = as_generator(rng)
    p = model.p
    total = burn_in + n
    start = int(round(model.stationary_mean())) if init is None else int(init)
    eps = _draw_innovations(model.innovations, total, gen)
    alphas = model.alphas
    x = np.empty(p + total, dtype=np.int64)
    x[:p] = start
    for t in range(p, p + total):
        v = eps[t - p]
        for j in range(p):
            a = alphas[j]
            if a > 0.0:
                lag = x[t - 1 - j]
                if lag:
                    v += gen.binomial(lag, a)
        x[t] = v
    return CountSeries(x[p + burn_in :])


def simulate(spec: DgpSpec, n: int, rng: RngLike) -> CountSeries:
    """Draw ``n`` observations from ``spec`` after discarding ``spec.burn_in`` warm-up steps."""
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    gen = as_generator(rng)
    v = spec.variant
    burn = spec.burn_in
    total = burn + n
    if isinstance(v, InarP):
        return simulate_inar(v.model, n, gen, burn)

    x = np.empty(total, dtype=np.int64)
    if isinstance(v, Ingarch11):
        m = v.unconditional_mean()
        prev = gen.poisson(m)
        for t in range(total):
            m = v.beta0 + v.beta1 * m + v.alpha1 * prev
            prev = gen.poisson(m)
            x[t] = prev
    elif isinstance(v, Inarch1):
        prev = int(round(v.unconditional_mean()))
        for t in range(total):
            prev = gen.poisson(v.beta + v.alpha * prev)
            x[t] = prev
    elif isinstance(v, PoiDar1):
        prev = int(round(v.lam))
        keep = gen.random(total) < v.alpha
        fresh = gen.poisson(v.lam, total)
        for t in range(total):
            if not keep[t]:
                prev = fresh[t]
            x[t] = prev
    else:
        raise InvalidParameter(f"unknown process variant {v!r}")
    return CountSeries(x[burn:])


# Mini-language: name:key=val,...

_DGP_KEYS = {
    "poi-inar1": ("lambda", "alpha"),
    "poi-inar2": ("lambda", "alpha1", "alpha2"),
    "nb-inar1": ("N", "pi", "alpha"),
    "geom-inar1": ("pi", "alpha"),
    "ingarch11": ("beta0", "beta1", "alpha1"),
    "inarch1": ("beta", "alpha"),
    "poi-dar1": ("lambda", "alpha"),
}


def _fmt(v: float) -> str:
    return repr(float(v)).removesuffix(".0") if float(v).is_integer() else repr(float(v))


def _label(name: str, **params) -> str:
    return name + ":" + ",".join(f"{k}={_fmt(v)}" for k, v in params.items())


def poi_inar(lam: float, alphas, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    alphas = tuple(np.atleast_1d(alphas).astype(float))
    model = InarModel(alphas, make_innovation_pmf(Poisson(lam)))
    if len(alphas) == 1:
        label = _label("poi-inar1", **{"lambda": lam, "alpha": alphas[0]})
    elif len(alphas) == 2:
        label = _label("poi-inar2", **{"lambda": lam, "alpha1": alphas[0], "alpha2": alphas[1]})
    else:
        label = ""
    return DgpSpec(InarP(model), burn_in, label)


def nb_inar1(N: float, pi: float, alpha: float, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    model = InarModel((alpha,), make_innovation_pmf(NegBin(N, pi)))
    return DgpSpec(InarP(model), burn_in, _label("nb-inar1", N=N, pi=pi, alpha=alpha))


def geom_inar1(pi: float, alpha: float, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    model = InarModel((alpha,), make_innovation_pmf(Geometric(pi)))
    return DgpSpec(InarP(model), burn_in, _label("geom-inar1", pi=pi, alpha=alpha))


def ingarch11(beta0: float, beta1: float, alpha1: float, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    return DgpSpec(Ingarch11(beta0, beta1, alpha1), burn_in,
                   _label("ingarch11", beta0=beta0, beta1=beta1, alpha1=alpha1))


def inarch1(beta: float, alpha: float, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    return DgpSpec(Inarch1(beta, alpha), burn_in, _label("inarch1", beta=beta, alpha=alpha))


def poi_dar1(lam: float, alpha: float, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    return DgpSpec(PoiDar1(lam, alpha), burn_in, _label("poi-dar1", **{"lambda": lam, "alpha": alpha}))


def _number(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def parse_dgp(text: str, burn_in: int = DEFAULT_BURN_IN) -> DgpSpec:
    """Parse ``name:key=val,...``; values may be written as fractions (``pi=1/2``)."""
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if name not in _DGP_KEYS:
        raise InvalidParameter(f"unknown DGP {name!r}; choose from {', '.join(_DGP_KEYS)}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidParameter(f"malformed DGP parameter {item!r} (expected key=value)")
        try:
            params[key.strip()] = _number(val.strip())
        except ValueError:
            raise InvalidParameter(f"DGP parameter {key.strip()!r} is not a number: {val!r}") from None
    expected = _DGP_KEYS[name]
    missing = [k for k in expected if k not in params]
    extra = [k for k in params if k not in expected]
    if missing or extra:
        raise InvalidParameter(f"{name} expects parameters {', '.join(expected)}; "
                               f"missing {missing or 'none'}, unexpected {extra or 'none'}")
    p = params
    if name == "poi-inar1":
        return poi_inar(p["lambda"], (p["alpha"],), burn_in)
    if name == "poi-inar2":
        return poi_inar(p["lambda"], (p["alpha1"], p["alpha2"]), burn_in)
    if name == "nb-inar1":
        return nb_inar1(p["N"], p["pi"], p["alpha"], burn_in)
    if name == "geom-inar1":
        return geom_inar1(p["pi"], p["alpha"], burn_in)
    if name == "ingarch11":
        return ingarch11(p["beta0"], p["beta1"], p["alpha1"], burn_in)
    if name == "inarch1":
        return inarch1(p["beta"], p["alpha"], burn_in)
    return poi_dar1(p["lambda"], p["alpha"], burn_in)
