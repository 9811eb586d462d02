"""Batch size/power experiments with CSV output.

An ``ExperimentSpec`` describes one cell of a size/power table: a DGP, sample
size, fitted order, statistic order, weight, Monte Carlo scale and calibration
method. ``run_table`` runs many cells, sharing simulations and fits between
cells that differ only in the statistic configuration. Named presets carry the
parameter grids together with reference rejection rates.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import dataclass, field, replace
from typing import IO, Iterable

import numpy as np

from .bootstrap import gof_test, warp_speed_statistics
from .core import InvalidParameter
from .dgp import DEFAULT_BURN_IN, DgpSpec, RngStream, inarch1, ingarch11, nb_inar1, parse_dgp, poi_dar1, poi_inar, simulate
from .gof import StatConfig
from .io import atomic_write

CSV_HEADER = ("dgp", "params", "n", "p", "s", "a", "M", "method", "rejection_rate", "excluded", "seconds")
DEFAULT_M = 500
INVALID_EXCLUSION_SHARE = 0.05


@dataclass(frozen=True)
class ExperimentSpec:
    """One table cell.

    ``method`` is ``"warp"`` (warp-speed pooling) or ``"full"`` (a complete
    bootstrap with ``B`` replicates per Monte Carlo sample). ``reference`` holds a
    reference rate for comparison, if any; it does not affect the computation.
    """

    dgp: DgpSpec
    n: int
    p: int = 1
    s: int = 1
    a: float = 5.0
    M: int = DEFAULT_M
    level: float = 0.05
    method: str = "warp"
    B: int = 200
    seed: int = 1
    burn_in: int = DEFAULT_BURN_IN
    stat_method: str = "closed"
    reference: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise InvalidParameter(f"level must lie in (0, 1), got {self.level}")
        if self.M < 1:
            raise InvalidParameter("M must be at least 1")
        if self.s < self.p:
            raise InvalidParameter(f"statistic order s={self.s} is below the fitted order p={self.p}")
        if self.n <= self.s:
            raise InvalidParameter(f"n={self.n} is too short for order {self.s}")
        if self.method not in ("warp", "full"):
            raise InvalidParameter(f"unknown method {self.method!r}; use 'warp' or 'full'")

    @property
    def cfg(self) -> StatConfig:
        return StatConfig(s=self.s, a=self.a, method=self.stat_method)

    @property
    def method_label(self) -> str:
        return "warp" if self.method == "warp" else f"full(B={self.B})"

    def _group_key(self):
        dgp = (self.dgp.label, self.dgp.burn_in) if self.dgp.label else id(self.dgp)
        return (dgp, self.n, self.p, self.M, self.method, self.B, self.seed, self.burn_in)


@dataclass(frozen=True)
class ExperimentRow:
    spec: ExperimentSpec
    rejection_rate: float
    excluded: int
    seconds: float

    @property
    def valid(self) -> bool:
        """False when too many Monte Carlo samples had to be dropped."""
        return self.excluded / self.spec.M < INVALID_EXCLUSION_SHARE

    def csv_fields(self) -> list:
        sp = self.spec
        return [sp.dgp.name, sp.dgp.params, sp.n, sp.p, sp.s, _fmt_num(sp.a), sp.M, sp.method_label,
                f"{self.rejection_rate:.4f}", self.excluded, f"{self.seconds:.3f}"]


def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def tolerance(rate: float, M: int) -> float:
    """Three binomial standard errors, 3 sqrt(rate (1 - rate) / M)."""
    return 3.0 * math.sqrt(rate * (1.0 - rate) / M)


def _full_bootstrap_rate(spec: ExperimentSpec, threads) -> tuple[float, int]:
    root = RngStream(spec.seed)
    rejections, excluded = [], 0
    for m in range(spec.M):
        cell = root.spawn(m)
        x = simulate(spec.dgp, spec.n, cell.spawn(0).generator())
        if np.all(x.values == x.values[0]):
            excluded += 1
            continue
        res = gof_test(x, spec.p, spec.cfg, spec.B, spec.burn_in, cell.spawn(1), threads=threads)
        rejections.append(res.reject(spec.level))
    rate = float(np.mean(rejections)) if rejections else float("nan")
    return rate, excluded


def _run_group(specs: list[ExperimentSpec], threads) -> list[ExperimentRow]:
    t0 = time.perf_counter()
    head = specs[0]
    if head.method == "full":
        rate, excl = _full_bootstrap_rate(head, threads)
        return [ExperimentRow(head, rate, excl, time.perf_counter() - t0)]
    cfgs = [sp.cfg for sp in specs]
    stats = warp_speed_statistics(head.dgp, head.n, head.p, cfgs, head.M, head.burn_in,
                                  RngStream(head.seed), threads=threads)
    share = (time.perf_counter() - t0) / len(specs)
    return [ExperimentRow(sp, stats.rejection_rate(sp.level, i), stats.excluded, share)
            for i, sp in enumerate(specs)]


def run_experiment(spec: ExperimentSpec, threads: int | None = None) -> ExperimentRow:
    """Rejection rate of one cell; a pure function of ``spec``."""
    return _run_group([spec], threads)[0]


def run_experiments(specs: Iterable[ExperimentSpec], threads: int | None = None) -> list[ExperimentRow]:
    """Run many cells, in input order, sharing Monte Carlo samples where possible.

    Warp-speed cells that differ only in ``s``, ``a`` or ``level`` reuse the same
    simulated series and fits; their wall time is split evenly.
    """
    specs = list(specs)
    groups: dict = {}
    for i, sp in enumerate(specs):
        key = sp._group_key() if sp.method == "warp" else ("full", i)
        groups.setdefault(key, []).append(i)
    rows: list = [None] * len(specs)
    for idx in groups.values():
        for i, row in zip(idx, _run_group([specs[i] for i in idx], threads)):
            rows[i] = row
    return rows


def write_rows(rows: Iterable[ExperimentRow], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())


def run_table(specs: Iterable[ExperimentSpec], out: IO[str] | str | os.PathLike,
              threads: int | None = None) -> list[ExperimentRow]:
    """Run the cells and write one CSV line per cell after the header.

    ``out`` is a text stream or a path; a path is written atomically.
    """
    rows = run_experiments(specs, threads)
    if hasattr(out, "write"):
        write_rows(rows, out)
    else:
        buf = io.StringIO()
        write_rows(rows, buf)
        atomic_write(out, buf.getvalue())
    return rows


# Preset grids. Each entry: (DGP, reference rates ordered as
# a=0 n=100, a=0 n=500, a=5 n=100, a=5 n=500, a=2 n=100, a=2 n=500).
_WEIGHT_ORDER = (0.0, 5.0, 2.0)
_N_ORDER = (100, 500)

_POI1 = [
    (poi_inar(1, [0.3]), "0.036 0.033 0.037 0.040 0.036 0.035"),
    (poi_inar(1, [0.5]), "0.040 0.041 0.044 0.046 0.043 0.042"),
    (poi_inar(3, [0.3]), "0.032 0.034 0.043 0.022 0.038 0.027"),
    (poi_inar(3, [0.5]), "0.032 0.032 0.037 0.029 0.039 0.034"),
]
_NB1 = [
    (nb_inar1(1, 0.5, 0.5), "0.048 0.050 0.050 0.053 0.052 0.052"),
    (nb_inar1(2, 2 / 3, 0.5), "0.048 0.049 0.048 0.053 0.045 0.049"),
    (nb_inar1(10, 10 / 11, 0.5), "0.047 0.046 0.049 0.046 0.046 0.045"),
]
_POI2_NULL = [
    (poi_inar(1, [0.3, 0.1]), "0.037 0.040 0.036 0.024 0.035 0.024"),
    (poi_inar(1, [0.5, 0.1]), "0.039 0.043 0.039 0.037 0.037 0.036"),
    (poi_inar(1, [0.5, 0.3]), "0.034 0.041 0.042 0.033 0.040 0.035"),
]
_POI2_S1 = [
    (poi_inar(1, [0.3, 0.1]), "0.039 0.046 0.045 0.050 0.040 0.043"),
    (poi_inar(1, [0.5, 0.1]), "0.044 0.063 0.056 0.104 0.050 0.086"),
    (poi_inar(1, [0.5, 0.3]), "0.097 0.206 0.178 0.525 0.144 0.415"),
]
_ING_S1 = [
    (ingarch11(0.2, 0.4, 0.10), "0.026 0.018 0.026 0.030 0.023 0.021"),
    (ingarch11(0.2, 0.4, 0.20), "0.031 0.087 0.054 0.131 0.044 0.117"),
    (ingarch11(1.0, 0.1, 0.50), "0.068 0.205 0.159 0.645 0.113 0.501"),
    (ingarch11(0.5, 0.1, 0.50), "0.177 0.707 0.256 0.865 0.237 0.833"),
    (ingarch11(0.1, 0.4, 0.40), "0.264 0.829 0.255 0.816 0.264 0.825"),
    (ingarch11(0.6, 0.1, 0.60), "0.271 0.881 0.446 0.982 0.399 0.969"),
    (ingarch11(0.1, 0.2, 0.60), "0.497 0.985 0.443 0.973 0.468 0.980"),
    (ingarch11(0.1, 0.5, 0.45), "0.526 0.997 0.542 0.996 0.562 0.997"),
]
_POI2_S2 = [
    (poi_inar(1, [0.3, 0.1]), "0.068 0.205 0.079 0.391 0.082 0.354"),
    (poi_inar(1, [0.5, 0.1]), "0.060 0.141 0.080 0.311 0.072 0.251"),
    (poi_inar(1, [0.5, 0.3]), "0.114 0.401 0.328 0.958 0.240 0.848"),
]
_ING_S2 = [
    (ingarch11(0.2, 0.4, 0.10), "0.045 0.101 0.052 0.119 0.048 0.116"),
    (ingarch11(0.2, 0.4, 0.20), "0.090 0.403 0.099 0.449 0.100 0.467"),
    (ingarch11(1.0, 0.1, 0.50), "0.068 0.178 0.166 0.691 0.123 0.528"),
    (ingarch11(0.5, 0.1, 0.50), "0.141 0.628 0.249 0.884 0.222 0.846"),
    (ingarch11(0.1, 0.4, 0.40), "0.449 0.989 0.366 0.970 0.416 0.983"),
    (ingarch11(0.6, 0.1, 0.60), "0.216 0.812 0.440 0.987 0.376 0.973"),
    (ingarch11(0.1, 0.2, 0.60), "0.566 0.996 0.489 0.989 0.534 0.994"),
    (ingarch11(0.1, 0.5, 0.45), "0.697 1.000 0.717 1.000 0.749 1.000"),
]
_INARCH = [
    (inarch1(1, 0.30), "0.032 0.044 0.048 0.129 0.039 0.094"),
    (inarch1(1, 0.50), "0.071 0.264 0.159 0.658 0.119 0.540"),
    (inarch1(1, 0.75), "0.271 0.914 0.604 0.999 0.506 0.997"),
    (inarch1(3, 0.30), "0.035 0.030 0.046 0.022 0.038 0.025"),
    (inarch1(3, 0.50), "0.025 0.028 0.052 0.054 0.037 0.034"),
    (inarch1(3, 0.75), "0.074 0.184 0.185 0.634 0.133 0.460"),
]
_DAR = [
    (poi_dar1(2, 0.25), "0.144 0.437 0.115 0.226 0.117 0.212"),
    (poi_dar1(2, 0.50), "0.447 0.992 0.535 0.995 0.538 0.994"),
    (poi_dar1(2, 0.75), "0.326 0.982 0.400 0.997 0.401 0.996"),
    (poi_dar1(6, 0.25), "0.142 0.279 0.160 0.159 0.163 0.230"),
    (poi_dar1(6, 0.50), "0.117 0.371 0.234 0.707 0.190 0.643"),
    (poi_dar1(6, 0.75), "0.016 0.041 0.277 0.980 0.121 0.920"),
]
_POI1_EDGE = [
    (poi_inar(1, [0.1]), "0.027 0.031 0.024 0.015 0.025 0.022"),
    (poi_inar(1, [0.9]), "0.042 0.050 0.051 0.047 0.046 0.047"),
    (poi_inar(3, [0.1]), "0.037 0.040 0.034 0.030 0.035 0.032"),
    (poi_inar(3, [0.9]), "0.031 0.027 0.033 0.026 0.031 0.027"),
]
_POI2_EDGE_S1 = [
    (poi_inar(1, [0.05, 0.05]), "0.039 0.034 0.031 0.020 0.033 0.022"),
    (poi_inar(1, [0.4, 0.5]), "0.103 0.311 0.198 0.657 0.164 0.538"),
]
_POI1_S2 = [
    (poi_inar(1, [0.3]), "0.047 0.047 0.047 0.041 0.044 0.044"),
    (poi_inar(1, [0.5]), "0.039 0.047 0.042 0.051 0.038 0.050"),
    (poi_inar(3, [0.3]), "0.027 0.035 0.048 0.036 0.042 0.037"),
    (poi_inar(3, [0.5]), "0.027 0.030 0.043 0.037 0.038 0.037"),
]
_NB1_S2 = [
    (nb_inar1(1, 0.5, 0.5), "0.053 0.053 0.052 0.051 0.053 0.052"),
    (nb_inar1(2, 2 / 3, 0.5), "0.046 0.050 0.048 0.050 0.049 0.050"),
    (nb_inar1(10, 10 / 11, 0.5), "0.045 0.044 0.047 0.047 0.045 0.041"),
]
_POI2_EDGE_S2 = [
    (poi_inar(1, [0.05, 0.05]), "0.042 0.087 0.041 0.114 0.040 0.111"),
    (poi_inar(1, [0.4, 0.5]), "0.131 0.515 0.384 0.983 0.268 0.900"),
]

# name -> (grid, fitted order p, statistic order s, description)
PRESETS: dict[str, tuple] = {
    "table1": (_POI1, 1, 1, "size, Poisson INAR(1)"),
    "table2": (_NB1, 1, 1, "size, negative binomial INAR(1)"),
    "table3": (_POI2_NULL, 2, 2, "size, Poisson INAR(2) with p = 2"),
    "table4": (_POI2_S1, 1, 1, "power, Poisson INAR(2) against p = 1"),
    "table5": (_ING_S1, 1, 1, "power, INGARCH(1,1)"),
    "table6": (_POI2_S2, 1, 2, "power, Poisson INAR(2) against p = 1 with s = 2"),
    "table7": (_INARCH, 1, 1, "power, INARCH(1)"),
    "table8": (_DAR, 1, 1, "power, Poisson DAR(1)"),
    "table9": (_ING_S2, 1, 2, "power, INGARCH(1,1) with s = 2"),
    "s3": (_POI1_EDGE, 1, 1, "size, Poisson INAR(1) with alpha near the boundary"),
    "s4": (_POI2_EDGE_S1, 1, 1, "power, Poisson INAR(2) with small or large alpha sum"),
    "s5": (_POI1_S2, 1, 2, "size, Poisson INAR(1) with s = 2"),
    "s6": (_NB1_S2, 1, 2, "size, negative binomial INAR(1) with s = 2"),
    "s7": (_POI2_EDGE_S2, 1, 2, "power, Poisson INAR(2) edge cases with s = 2"),
}


def preset(name: str, M: int = DEFAULT_M, seed: int = 1, level: float = 0.05,
           ns: Iterable[int] = _N_ORDER, weights: Iterable[float] = _WEIGHT_ORDER) -> list[ExperimentSpec]:
    """Cells of a named preset, ordered by DGP row, then weight, then sample size."""
    key = name.lower()
    if key not in PRESETS:
        raise InvalidParameter(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    grid, p, s, _ = PRESETS[key]
    ns, weights = tuple(ns), tuple(weights)
    out = []
    for dgp, refs in grid:
        vals = [float(v) for v in refs.split()]
        for a in weights:
            for n in ns:
                ref = None
                if a in _WEIGHT_ORDER and n in _N_ORDER:
                    ref = vals[2 * _WEIGHT_ORDER.index(a) + _N_ORDER.index(n)]
                out.append(ExperimentSpec(dgp, n, p, s, a, M, level, seed=seed, reference=ref))
    return out


def specs_from_json(text: str) -> list[ExperimentSpec]:
    """Cells from a JSON list of objects with keys ``dgp`` (mini-language), ``n``
    and optionally ``p, s, a, M, level, method, B, seed, burn_in``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"experiment spec is not valid JSON: {exc}") from None
    if isinstance(data, dict):
        data = [data]
    allowed = {"p", "s", "a", "M", "level", "method", "B", "seed", "burn_in"}
    out = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict) or "dgp" not in obj or "n" not in obj:
            raise InvalidParameter(f"experiment entry {i} needs 'dgp' and 'n'")
        extra = set(obj) - allowed - {"dgp", "n"}
        if extra:
            raise InvalidParameter(f"experiment entry {i} has unknown keys: {sorted(extra)}")
        kw = {k: obj[k] for k in allowed if k in obj}
        out.append(ExperimentSpec(parse_dgp(str(obj["dgp"])), int(obj["n"]), **kw))
    return out


def rescale(specs: Iterable[ExperimentSpec], M: int) -> list[ExperimentSpec]:
    return [replace(sp, M=M) for sp in specs]
