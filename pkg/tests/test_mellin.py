import math

import numpy as np
import pytest

from clutterstats import distributions as dist
from clutterstats.mellin import (LogStats, NonConvergenceError,
                                 QuadratureConfig, central_log_moments,
                                 cumulants_to_moments, log_moments_numeric,
                                 mellin_numeric, moments_to_cumulants,
                                 verify_convolution)
from clutterstats.specfun import digamma, polygamma


def exp1_density(x):
    return np.exp(-x)


class TestMellinNumeric:
    def test_exponential_normalization(self):
        assert mellin_numeric(exp1_density, 1.0) == pytest.approx(1.0,
                                                                  abs=1e-9)

    def test_exponential_mean(self):
        assert mellin_numeric(exp1_density, 2.0) == pytest.approx(1.0,
                                                                  abs=1e-9)

    def test_rayleigh_second_moment(self):
        f = lambda x: dist.pdf(dist.Rayleigh(1.0), x)
        assert mellin_numeric(f, 3.0) == pytest.approx(1.0, abs=1e-9)

    def test_window_auto_widens(self):
        # mass near x = e^45 sits outside the default [-40, 40] window
        spec = dist.GammaPower(4.0, math.exp(45.0))
        f = lambda x: dist.pdf(spec, x)
        assert mellin_numeric(f, 1.0) == pytest.approx(1.0, abs=1e-6)

    def test_non_convergence_carries_estimate(self):
        cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=1e-300,
                               max_subdivisions=20)
        f = lambda x: dist.pdf(dist.Weibull(1.0, 0.7), x)
        with pytest.raises(NonConvergenceError) as info:
            mellin_numeric(f, 1.0, cfg)
        assert info.value.estimate == pytest.approx(1.0, abs=1e-3)
        assert info.value.error_bound > 0.0

    def test_bit_for_bit_reproducible(self):
        f = lambda x: dist.pdf(dist.KAmplitude(2.0, 1.0), x)
        for s in (1.0, 2.5):
            assert mellin_numeric(f, s) == mellin_numeric(f, s)

    def test_agreement_below_s_equal_one(self):
        # the strip extends below s = 1 for every catalog family
        for spec in (dist.GammaPower(4.0, 1.0), dist.Weibull(1.0, 2.0),
                     dist.KAmplitude(2.0, 1.0), dist.Fisher(3.0, 4.0, 1.0)):
            f = lambda x: dist.pdf(spec, x)
            analytic = dist.chf2_analytic(spec, 0.5)
            assert mellin_numeric(f, 0.5) == pytest.approx(analytic, rel=1e-6)


class TestLogMomentsNumeric:
    def test_exponential_first_log_moment(self):
        stats = log_moments_numeric(exp1_density, 1)
        assert stats.log_moments[0] == pytest.approx(digamma(1.0), abs=1e-9)

    def test_exponential_log_variance(self):
        stats = log_moments_numeric(exp1_density, 2)
        assert stats.log_cumulants[1] == pytest.approx(polygamma(1, 1.0),
                                                       abs=1e-8)

    def test_narrow_spike_log_moments_vanish(self):
        # Nakagami with shape 1e4 approximates a point mass at x = 1
        spec = dist.Nakagami(1e4, 1.0)
        f = lambda x: dist.pdf(spec, x)
        stats = log_moments_numeric(f, 2)
        analytic = dist.log_cumulants_analytic(spec, 2)
        assert abs(stats.log_moments[0]) <= 1e-4
        assert abs(stats.log_moments[1]) <= 1e-4
        assert stats.log_cumulants[0] == pytest.approx(analytic[0], abs=1e-9)
        assert stats.log_cumulants[1] == pytest.approx(analytic[1], rel=1e-4)

    def test_matches_analytic_cumulants_across_catalog(self):
        specs = [dist.GammaPower(4.0, 1.0), dist.Weibull(1.0, 2.0),
                 dist.Maxwell(1.0), dist.GammaGamma(4.0, 2.0, 1.0),
                 dist.KAmplitude(2.0, 1.0), dist.Fisher(3.0, 4.0, 1.0),
                 dist.InverseGamma(3.0, 2.0)]
        for spec in specs:
            f = lambda x: dist.pdf(spec, x)
            stats = log_moments_numeric(f, 4)
            analytic = dist.log_cumulants_analytic(spec, 4)
            for n in range(4):
                gate = max(1e-6, 1e-4 * abs(analytic[n]))
                assert abs(stats.log_cumulants[n] - analytic[n]) <= gate, \
                    (spec, n + 1)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            log_moments_numeric(exp1_density, 5)


class TestCumulantAlgebra:
    def test_first_order_passthrough(self):
        assert moments_to_cumulants([0.37]) == [0.37]

    def test_gaussian_fourth_cumulant_vanishes(self):
        assert moments_to_cumulants((0.0, 1.0, 0.0, 3.0)) == [0.0, 1.0, 0.0, 0.0]

    def test_worked_example(self):
        # hand-computed: k4 = 24 - 4*6 - 3*4 + 12*2 - 6 = 6
        assert moments_to_cumulants((1.0, 2.0, 6.0, 24.0)) == [1.0, 1.0, 2.0, 6.0]
        assert cumulants_to_moments((1.0, 1.0, 2.0, 6.0)) == [1.0, 2.0, 6.0, 24.0]

    def test_printed_fourth_identity_is_central_moment(self):
        assert central_log_moments((1.0, 2.0, 6.0, 24.0)) == [1.0, 1.0, 2.0, 9.0]
        # central fourth moment = cumulant + 3 k2^2
        m = (0.3, 1.7, 2.9, 11.0)
        k = moments_to_cumulants(m)
        c = central_log_moments(m)
        assert c[3] == pytest.approx(k[3] + 3.0 * k[1] ** 2, rel=1e-12)

    def test_zeros_fixed_point(self):
        assert cumulants_to_moments((0.0, 0.0, 0.0, 0.0)) == [0.0, 0.0, 0.0, 0.0]

    def test_round_trip_random(self):
        rng = np.random.RandomState(11)
        for _ in range(1000):
            m = rng.uniform(-10.0, 10.0, size=4)
            k = np.array(moments_to_cumulants(m))
            back = np.array(cumulants_to_moments(k))
            scale = max(1.0, float(np.abs(m).max()), float(np.abs(k).max()))
            assert np.max(np.abs(back - m)) <= 1e-12 * scale

    def test_unsupported_order(self):
        with pytest.raises(ValueError, match="unsupported order"):
            moments_to_cumulants([1.0] * 5)
        with pytest.raises(ValueError, match="unsupported order"):
            cumulants_to_moments([])


class TestLogStats:
    def test_from_moments_consistency(self):
        stats = LogStats.from_moments((1.0, 2.0, 6.0, 24.0))
        assert stats.order == 4
        assert stats.log_cumulants == (1.0, 1.0, 2.0, 6.0)

    def test_from_cumulants_consistency(self):
        stats = LogStats.from_cumulants((1.0, 1.0, 2.0, 6.0))
        assert stats.log_moments == (1.0, 2.0, 6.0, 24.0)

    def test_length_validation(self):
        with pytest.raises(ValueError):
            LogStats((1.0, 2.0), (1.0,))
        with pytest.raises(ValueError):
            LogStats((), ())


class TestVerifyConvolution:
    def test_ggamma(self):
        err = verify_convolution(dist.GammaGamma(4.0, 2.0, 1.0),
                                 (1.5, 2.0, 2.5))
        assert err <= 1e-5

    def test_k_amplitude(self):
        err = verify_convolution(dist.KAmplitude(2.0, 1.0), (1.5, 2.0, 2.5))
        assert err <= 1e-5

    def test_simple_family_rejected(self):
        with pytest.raises(ValueError, match="simple family"):
            verify_convolution(dist.GammaPower(4.0, 1.0), (1.5,))


class TestQuadratureConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(log_domain_bounds=(10.0, -10.0))

    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.rel_tol == 1e-9
        assert cfg.abs_tol == 1e-12
        assert cfg.max_subdivisions == 2000
        assert cfg.log_domain_bounds == (-40.0, 40.0)
