import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inargof.core import DegenerateSeries, InarModel, Pmf
from inargof.dgp import Poisson, RngStream, inarch1, make_innovation_pmf, poi_dar1, poi_inar, simulate
from inargof.estimate import (
    FitOptions,
    ZeroLikelihood,
    conditional_loglik,
    fit_semiparametric,
    transition_probability,
    yule_walker_init,
)


def brute_transition(alphas, g, lags, nxt):
    """Sum over every split of ``nxt`` into thinning survivors and an innovation."""
    total = 0.0
    ranges = [range(x + 1) for x in lags]
    for survivors in itertools.product(*ranges):
        k = nxt - sum(survivors)
        if k < 0 or k >= len(g):
            continue
        term = g[k]
        for a, x, i in zip(alphas, lags, survivors):
            term *= math.comb(x, i) * a**i * (1 - a) ** (x - i)
        total += term
    return total


def brute_loglik(alphas, g, x):
    p = len(alphas)
    return sum(math.log(brute_transition(alphas, g, [x[t - j] for j in range(1, p + 1)], x[t]))
               for t in range(p, len(x)))


class TestTransition:
    def test_no_thinning_returns_innovation_mass(self):
        g = Pmf([0.2, 0.3, 0.5])
        m = InarModel((0.0, 0.0), g)
        for k in range(4):
            assert transition_probability(m, [3, 1], k) == g[k]

    def test_hand_case(self):
        m = InarModel((0.5,), Pmf.point_mass(0))
        assert transition_probability(m, [2], 1) == pytest.approx(0.5, abs=1e-15)

    def test_against_triple_sum(self, rng):
        g = make_innovation_pmf(Poisson(1.0))
        m = InarModel((0.3, 0.2), g)
        for _ in range(40):
            lags = rng.integers(0, 6, 2).tolist()
            nxt = int(rng.integers(0, 12))
            expected = brute_transition((0.3, 0.2), g.masses, lags, nxt)
            assert transition_probability(m, lags, nxt) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 0.45), min_size=1, max_size=2),
           st.lists(st.floats(0.01, 1), min_size=1, max_size=6),
           st.data())
    def test_rows_sum_to_one(self, alphas, w, data):
        g = Pmf(np.array(w) / np.sum(w))
        m = InarModel(tuple(alphas), g)
        lags = data.draw(st.lists(st.integers(0, 10), min_size=len(alphas), max_size=len(alphas)))
        total = math.fsum(transition_probability(m, lags, k) for k in range(sum(lags) + g.K + 1))
        assert abs(total - 1.0) <= 1e-10


class TestLoglik:
    def test_all_zero(self):
        m = InarModel((0.7,), Pmf.point_mass(0))
        assert conditional_loglik(m, [0, 0, 0, 0]) == 0.0

    def test_single_transition(self):
        m = InarModel((0.5,), Pmf([0.5, 0.5]))
        assert conditional_loglik(m, [0, 1]) == pytest.approx(math.log(0.5), abs=1e-15)

    def test_impossible_transition(self):
        m = InarModel((0.5,), Pmf([0.5, 0.5]))
        with pytest.raises(ZeroLikelihood) as info:
            conditional_loglik(m, [0, 1, 5, 1])
        assert info.value.t == 2
        assert conditional_loglik(m, [0, 1, 5, 1], strict=False) == -math.inf

    def test_against_brute_force(self, rng):
        x = rng.integers(0, 5, 30).tolist()
        g = np.full(5, 0.2)
        for alphas in [(0.4,), (0.3, 0.25)]:
            m = InarModel(alphas, Pmf(g))
            assert conditional_loglik(m, x) == pytest.approx(brute_loglik(alphas, g, x), rel=1e-12)


class TestYuleWalker:
    def test_white_noise_is_clamped(self, rng):
        x = rng.permutation(np.repeat([0, 1, 2, 3], 50))
        m = yule_walker_init(x, 1)
        assert 0.01 <= m.alphas[0] < 0.2

    def test_inar1(self):
        x = simulate(poi_inar(1, [0.5]), 10_000, RngStream(8).generator())
        assert 0.45 < yule_walker_init(x, 1).alphas[0] < 0.55

    def test_constant_series(self):
        with pytest.raises(DegenerateSeries):
            yule_walker_init([4, 4, 4, 4], 1)

    def test_support(self, rng):
        x = rng.integers(0, 7, 80)
        m = yule_walker_init(x, 2)
        assert m.innovations.K <= x.max()
        assert sum(m.alphas) < 0.99


class TestFit:
    def test_all_zero_is_degenerate(self):
        fit = fit_semiparametric([0] * 20, 1)
        assert fit.degenerate and fit.converged
        assert fit.model.alphas == (0.0,)
        assert fit.model.innovations.masses.tolist() == [1.0]

    def test_consistency(self):
        x = simulate(poi_inar(1, [0.5]), 2000, RngStream(9).generator())
        fit = fit_semiparametric(x, 1)
        assert fit.converged
        assert 0.40 < fit.model.alphas[0] < 0.60
        assert 0.85 < fit.model.innovations.mean() < 1.15

    @pytest.mark.parametrize("spec,p", [(poi_inar(1, [0.5]), 1), (inarch1(1, 0.75), 1), (poi_dar1(2, 0.5), 1),
                                        (poi_inar(1, [0.5, 0.3]), 2)])
    def test_ascent_and_invariants(self, spec, p):
        for seed in range(4):
            x = simulate(spec, 80, RngStream(seed).generator())
            fit = fit_semiparametric(x, p)
            h = np.array(fit.history)
            assert np.all(np.diff(h) >= -1e-12)
            init = yule_walker_init(x, p)
            assert fit.loglik >= conditional_loglik(init, x, strict=False) - 1e-9
            assert fit.model.innovations.K <= x.values.max()
            assert abs(fit.model.innovations.masses.sum() - 1) <= 1e-12
            assert sum(fit.model.alphas) < 1
            assert math.isfinite(fit.loglik)
            assert fit.loglik == pytest.approx(conditional_loglik(fit.model, x), abs=1e-9)

    def test_accelerated_reaches_plain_em_optimum(self):
        slow = FitOptions(tol=1e-11, max_iter=20_000, accelerate=False)
        for seed in range(6):
            x = simulate(poi_inar(1, [0.4]), 60, RngStream(100 + seed).generator())
            fast = fit_semiparametric(x, 1)
            ref = fit_semiparametric(x, 1, slow)
            assert fast.loglik >= ref.loglik - 1e-5

    def test_reproducible(self, rng):
        x = rng.integers(0, 6, 70)
        a, b = fit_semiparametric(x, 1), fit_semiparametric(x, 1)
        assert a.model == b.model and a.loglik == b.loglik and a.iterations == b.iterations

    def test_iteration_cap(self):
        x = simulate(inarch1(1, 0.75), 100, RngStream(3).generator())
        fit = fit_semiparametric(x, 1, FitOptions(max_iter=1))
        assert fit.iterations == 1 and not fit.converged

    def test_two_point_likelihood_is_maximal(self):
        # no small perturbation of the fitted parameters increases the likelihood
        x = simulate(poi_inar(1, [0.5]), 150, RngStream(12).generator())
        fit = fit_semiparametric(x, 1)
        a0, g0 = fit.model.alphas[0], fit.model.innovations.padded(int(x.values.max()) + 1)
        for da in (-1e-3, 1e-3):
            m = InarModel((a0 + da,), Pmf(g0))
            assert conditional_loglik(m, x, strict=False) <= fit.loglik + 1e-9
        for k in range(len(g0)):
            g = g0 * 0.999
            g[k] += 0.001
            m = InarModel((a0,), Pmf(g))
            assert conditional_loglik(m, x, strict=False) <= fit.loglik + 1e-7
