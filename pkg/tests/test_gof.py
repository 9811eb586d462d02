import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inargof.core import InarModel, InvalidParameter, Pmf
from inargof.dgp import RngStream, poi_inar, simulate
from inargof.estimate import fit_semiparametric
from inargof.gof import NonIntegerWeight, StatConfig, quadrature_nodes, tn, tn_closed_form, tn_quadrature


def alternating_sum_statistic(x, alphas, g, a, s):
    """Integral-free statistic written with explicit alternating binomial sums.

    Pair sum over windows t, t' of the lag kernel times
    [1/(1+X_t+X_t'+a) + sum_{k1,k2} G G sum_{i,h} ... - 2 sum_k G sum_{i,h} ...],
    the cross term symmetrized so that both orderings of a pair are counted.
    """
    n = len(x)
    alphas = list(alphas) + [0.0] * (s - len(alphas))
    idx = range(s, n)

    def thin_terms(lags):
        # expansion of prod_j (1 + alpha_j (u0 - 1))^{lags_j} as (coefficient, power of u0) pairs
        out = []
        for ih in itertools.product(*[[(i, h) for i in range(L + 1) for h in range(i + 1)] for L in lags]):
            c, power = 1.0, 0
            for (i, h), L, al in zip(ih, lags, alphas):
                c *= math.comb(L, i) * al**i * (-1) ** (i - h) * math.comb(i, h)
                power += h
            out.append((c, power))
        return out

    total = 0.0
    for t in idx:
        for r in idx:
            lag_t = [x[t - j] for j in range(1, s + 1)]
            lag_r = [x[r - j] for j in range(1, s + 1)]
            kern = 1.0
            for j in range(s):
                kern /= 1 + lag_t[j] + lag_r[j] + a
            emp = 1.0 / (1 + x[t] + x[r] + a)
            both = thin_terms([lt + lr for lt, lr in zip(lag_t, lag_r)])
            null = sum(g[k1] * g[k2] * c / (1 + k1 + k2 + a + pw)
                       for k1 in range(len(g)) for k2 in range(len(g)) for c, pw in both)
            cross = 0.0
            for (lags, other) in ((lag_t, x[r]), (lag_r, x[t])):
                cross += sum(g[k] * c / (1 + k + other + a + pw) for k in range(len(g)) for c, pw in thin_terms(lags))
            total += kern * (emp + null - cross)
    return n / (n - s) ** 2 * (a + 1) ** (s + 1) * total


class Poly:
    """Multivariate polynomial with exact rational coefficients."""

    def __init__(self, terms):
        self.terms = {k: v for k, v in terms.items() if v != 0}

    @classmethod
    def monomial(cls, exps, coef=Fraction(1)):
        return cls({tuple(exps): Fraction(coef)})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(out)

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return Poly(out)

    def __pow__(self, e):
        dim = len(next(iter(self.terms))) if self.terms else 0
        out = Poly.monomial((0,) * dim)
        for _ in range(e):
            out = out * self
        return out

    def integrate_unit_cube(self):
        return sum(v / math.prod(e + 1 for e in k) for k, v in self.terms.items())


def exact_statistic(x, alphas, g, a, s):
    """n * integral over [0,1]^(s+1) of (null pgf - empirical pgf)^2 * weight, in rationals."""
    n, d = len(x), s + 1
    alphas = [Fraction(v) for v in alphas] + [Fraction(0)] * (s - len(alphas))
    g = [Fraction(v) for v in g]
    one = Poly.monomial((0,) * d)
    u = [Poly.monomial(tuple(int(i == j) for i in range(d))) for j in range(d)]
    ge = Poly({})
    for k, m in enumerate(g):
        ge = ge + Poly.monomial(tuple([k] + [0] * s), m)
    emp, lagpart = Poly({}), Poly({})
    for t in range(s, n):
        mono = one
        for j in range(d):
            mono = mono * u[j] ** x[t - j]
        emp = emp + mono
        term = one
        for j in range(1, d):
            base = u[j] * (one + Poly.monomial(tuple([1] + [0] * s), alphas[j - 1]) - Poly.monomial((0,) * d, alphas[j - 1]))
            term = term * base ** x[t - j]
        lagpart = lagpart + term
    scale = Poly.monomial((0,) * d, Fraction(1, n - s))
    diff = ge * lagpart * scale - emp * scale
    w = Poly.monomial((a,) * d, Fraction(a + 1) ** d)
    return n * (diff * diff * w).integrate_unit_cube()


def random_case(rng, n=None, p=None, s=None, vmax=5):
    p = p or int(rng.integers(1, 3))
    s = s or int(rng.integers(p, 3))
    n = n or int(rng.integers(s + 2, 41))
    x = rng.integers(0, vmax + 1, n)
    if np.all(x == x[0]):
        x[0] = (x[0] + 1) % (vmax + 1)
    al = rng.uniform(0, 0.9, p)
    al *= min(1.0, 0.9 / al.sum())
    g = rng.dirichlet(np.ones(int(rng.integers(1, vmax + 2))))
    return x, InarModel(tuple(al), Pmf(g)), s


class TestClosedForm:
    def test_hand_case_exact(self):
        x = [1, 0, 1]
        exact = exact_statistic(x, [0], [Fraction(1, 2), Fraction(1, 2)], 0, 1)
        assert exact == Fraction(1, 48)
        model = InarModel((0.0,), Pmf([0.5, 0.5]))
        assert tn_closed_form(x, model, StatConfig(s=1, a=0)) == pytest.approx(1 / 48, abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_against_rational_oracle(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.integers(0, 3, int(rng.integers(3, 7))).tolist()
        p = 1 + seed % 2
        s = p if seed % 3 else 2
        if len(x) <= s:
            x += [1, 0]
        al = [Fraction(int(v), 10) for v in rng.integers(0, 5, p)]
        g = [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
        a = [0, 1, 2][seed % 3]
        exact = exact_statistic(x, al, g, a, s)
        model = InarModel(tuple(float(v) for v in al), Pmf([float(v) for v in g]))
        got = tn_closed_form(x, model, StatConfig(s=s, a=a))
        assert got == pytest.approx(float(exact), rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("seed", range(8))
    def test_against_alternating_sums(self, seed):
        rng = np.random.default_rng(1000 + seed)
        x, model, s = random_case(rng, n=int(rng.integers(5, 12)), vmax=3)
        a = [0, 2, 5][seed % 3]
        ref = alternating_sum_statistic(x.tolist(), model.alphas, model.innovations.masses, a, s)
        got = tn_closed_form(x, model, StatConfig(s=s, a=a))
        assert got == pytest.approx(ref, rel=1e-9, abs=1e-14)

    def test_zero_case(self):
        model = InarModel((0.0,), Pmf.point_mass(0))
        for a in (0, 2, 5):
            assert tn_closed_form([0, 0], model, StatConfig(s=1, a=a)) == 0.0
            assert tn_quadrature([0, 0], model, StatConfig(s=1, a=a, method="quad")) == 0.0

    def test_non_integer_weight(self):
        model = InarModel((0.3,), Pmf([0.5, 0.5]))
        with pytest.raises(NonIntegerWeight):
            tn_closed_form([1, 0, 1, 1], model, StatConfig(s=1, a=2.5))

    def test_order_checks(self):
        model = InarModel((0.3, 0.2), Pmf([0.5, 0.5]))
        with pytest.raises(InvalidParameter):
            tn([1, 0, 1, 1], model, StatConfig(s=1))
        with pytest.raises(InvalidParameter):
            tn([1, 0], model, StatConfig(s=2))


class TestQuadrature:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_closed_form(self, seed):
        rng = np.random.default_rng(seed)
        x, model, s = random_case(rng)
        for a in (0, 2, 5):
            c = tn_closed_form(x, model, StatConfig(s=s, a=a))
            q = tn_quadrature(x, model, StatConfig(s=s, a=a, method="quad"))
            assert abs(q - c) / max(c, 1e-12) <= 1e-8

    def test_fitted_model_agreement(self):
        rng = np.random.default_rng(77)
        x = rng.integers(0, 5, 30)
        fit = fit_semiparametric(x, 1)
        for a in (0, 2, 5):
            c = tn_closed_form(x, fit.model, StatConfig(1, a))
            q = tn_quadrature(x, fit.model, StatConfig(1, a, "quad"))
            assert abs(q - c) / max(c, 1e-12) <= 1e-8

    def test_plateau(self):
        rng = np.random.default_rng(3)
        x, model, s = random_case(rng, s=2, p=1)
        cfg = StatConfig(s=s, a=2, method="quad")
        base = tn_quadrature(x, model, cfg)
        more = tn_quadrature(x, model, StatConfig(s=s, a=2, method="quad", nodes=max(quadrature_nodes(x, model, cfg)) + 6))
        assert abs(more - base) < 1e-12

    def test_non_integer_weight_uses_jacobi(self):
        rng = np.random.default_rng(4)
        x, model, _ = random_case(rng, p=1, s=1, vmax=3)
        a = 2.5
        got = tn_quadrature(x, model, StatConfig(s=1, a=a, method="quad"))
        # brute force: Gauss-Legendre on a fine grid with the weight evaluated pointwise
        from inargof.pgf import empirical_joint_pgf, null_joint_pgf, weight
        gx, gw = np.polynomial.legendre.leggauss(200)
        u, w = (gx + 1) / 2, gw / 2
        U0, U1 = np.meshgrid(u, u, indexing="ij")
        pts = np.stack([U0, U1], axis=-1)
        diff = null_joint_pgf(model, x, 1, pts) - empirical_joint_pgf(x, 1, pts)
        ref = len(x) * np.sum(np.outer(w, w) * diff**2 * weight(pts, a))
        assert got == pytest.approx(ref, rel=1e-7)
        assert tn(x, model, StatConfig(s=1, a=a, method="quad")) == got

    def test_node_cap_warns(self):
        x = np.array([70, 0, 35, 69, 1, 0])
        model = InarModel((0.2,), Pmf([0.5, 0.5]))
        with pytest.warns(RuntimeWarning, match="capped"):
            tn_quadrature(x, model, StatConfig(1, 2, "quad"))


class TestDispatcher:
    def test_order_p_equals_plain_statistic(self, rng):
        x = simulate(poi_inar(1, [0.5]), 60, RngStream(1).generator())
        model = fit_semiparametric(x, 1).model
        assert tn(x, model, StatConfig(1, 5)) == tn_closed_form(x, model, StatConfig(1, 5))

    def test_higher_order_pads_zero(self, rng):
        x = rng.integers(0, 5, 40)
        m1 = InarModel((0.4,), Pmf([0.3, 0.3, 0.4]))
        m2 = InarModel((0.4, 0.0), Pmf([0.3, 0.3, 0.4]))
        for method in ("closed", "quad"):
            cfg = StatConfig(2, 2, method)
            assert tn(x, m1, cfg) == pytest.approx(tn(x, m2, cfg), rel=1e-13)

    def test_config_validation(self):
        with pytest.raises(InvalidParameter):
            StatConfig(s=0)
        with pytest.raises(InvalidParameter):
            StatConfig(a=-1)
        with pytest.raises(InvalidParameter):
            StatConfig(method="mc")
        with pytest.raises(InvalidParameter):
            StatConfig(method="quad", nodes=1)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=3, max_size=30), st.floats(0, 0.95), st.sampled_from([0, 2, 5]),
           st.lists(st.floats(0.01, 1), min_size=1, max_size=5))
    def test_non_negative(self, xs, alpha, a, w):
        model = InarModel((alpha,), Pmf(np.array(w) / np.sum(w)))
        assert tn(xs, model, StatConfig(1, a)) >= 0.0
