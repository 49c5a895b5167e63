import math

import numpy as np
import pytest

from clutterstats import distributions as dist
from clutterstats._quad import adaptive_quad
from clutterstats.distributions import (Fisher, GammaGamma, GammaPower,
                                        InverseGamma, KAmplitude, Maxwell,
                                        MomentDoesNotExistError, Nakagami,
                                        Rayleigh, StripError, Weibull,
                                        WeibullNakagami)
from clutterstats.specfun import bessel_k, polygamma

ALL_SPECS = [
    GammaPower(4.0, 1.0), GammaPower(0.3, 2.0), GammaPower(1.0, 1.0),
    Nakagami(1.0, 1.0), Nakagami(5.5, 2.0),
    Maxwell(1.0), Maxwell(0.4),
    Weibull(1.0, 2.0), Weibull(2.0, 0.8),
    Rayleigh(1.0), Rayleigh(3.0),
    GammaGamma(4.0, 2.0, 1.0), GammaGamma(1.5, 1.5, 2.0),
    KAmplitude(2.0, 1.0), KAmplitude(0.6, 3.0),
    WeibullNakagami(2.0, 2.0, 1.0), WeibullNakagami(1.2, 0.9, 2.0),
    Fisher(3.0, 4.0, 1.0), Fisher(1.0, 2.5, 2.0),
    InverseGamma(3.0, 2.0),
]

SMOOTH_SHAPE_SPECS = [
    GammaPower(4.0, 1.0), GammaPower(1.0, 2.5), Nakagami(1.0, 1.0),
    Nakagami(5.5, 2.0), Maxwell(1.0), Weibull(1.0, 2.0), Weibull(1.5, 1.0),
    Rayleigh(2.0), GammaGamma(4.0, 2.0, 1.0), GammaGamma(1.0, 6.0, 2.0),
    KAmplitude(2.0, 1.0), KAmplitude(1.0, 0.5),
    WeibullNakagami(2.0, 2.0, 1.0), WeibullNakagami(1.0, 3.0, 0.7),
    Fisher(3.0, 4.0, 1.0), Fisher(1.0, 3.0, 1.0), InverseGamma(2.0, 3.0),
]


class TestSpecValidation:
    def test_positive_finite_required(self):
        for bad in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(ValueError):
                GammaPower(bad, 1.0)
            with pytest.raises(ValueError):
                Weibull(1.0, bad)

    def test_make_spec(self):
        spec = dist.make_spec("ggamma", {"L": 4.0, "M": 2.0, "mu": 1.0})
        assert spec == GammaGamma(4.0, 2.0, 1.0)
        with pytest.raises(ValueError, match="unknown family"):
            dist.make_spec("nope", {})
        with pytest.raises(ValueError, match="missing parameter"):
            dist.make_spec("gamma", {"L": 1.0})
        with pytest.raises(ValueError, match="unknown parameter"):
            dist.make_spec("gamma", {"L": 1.0, "mu": 1.0, "q": 2.0})


class TestPdf:
    def test_exponential_at_origin(self):
        assert dist.pdf(GammaPower(1.0, 2.0), 0.0) == 0.5

    def test_rayleigh_value(self):
        assert dist.pdf(Rayleigh(1.0), 1.0) == pytest.approx(
            2.0 * math.exp(-1.0), rel=1e-12)

    def test_k_amplitude_closed_form(self):
        # 4 K_1(2) for alpha=2, b=1 at x=1
        assert dist.pdf(KAmplitude(2.0, 1.0), 1.0) == pytest.approx(
            4.0 * bessel_k(1.0, 2.0), rel=1e-9)

    def test_k_amplitude_mixture_integral(self):
        # Rayleigh-with-gamma-mean-square mixture, integrated over log z
        alpha, b = 2.0, 1.0
        for r in (0.3, 1.0, 2.5):
            def integrand(u):
                z = np.exp(u)
                return (2.0 * r / z) * np.exp(-r * r / z) \
                    * b**alpha * z**alpha * np.exp(-b * z) / math.gamma(alpha)
            # z-integral of the conditional Rayleigh against the gamma texture
            oracle, _ = adaptive_quad(integrand, -40.0, 40.0, rel_tol=1e-10,
                                      abs_tol=1e-306, max_subdivisions=1000,
                                      initial_edges=np.linspace(-39, 39, 79))
            assert dist.pdf(KAmplitude(alpha, b), r) == pytest.approx(
                oracle, rel=1e-8)

    def test_wn_pdf_vs_direct_integral(self):
        c, alpha, b = 2.0, 2.0, 1.0
        spec = WeibullNakagami(c, alpha, b)
        for r in (0.4, 1.0, 2.0):
            def integrand(u):
                z = np.exp(u)
                return (2.0 * c * b**alpha / math.gamma(alpha) * r**(c - 1)
                        * z**(2 * alpha - c) * np.exp(-(r / z)**c - b * z * z)
                        / z) * z    # measure dz = z du
            oracle, _ = adaptive_quad(integrand, -40.0, 40.0, rel_tol=1e-10,
                                      abs_tol=1e-306, max_subdivisions=1000,
                                      initial_edges=np.linspace(-39, 39, 79))
            assert dist.pdf(spec, r) == pytest.approx(oracle, rel=1e-7)

    def test_zero_limits(self):
        assert dist.pdf(Weibull(2.0, 1.0), 0.0) == 0.5
        assert dist.pdf(Weibull(1.0, 0.5), 0.0) == math.inf
        assert dist.pdf(KAmplitude(0.5, 4.0), 0.0) == pytest.approx(4.0)
        assert dist.pdf(Maxwell(1.0), 0.0) == 0.0
        assert dist.pdf(Fisher(1.0, 3.0, 2.0), 0.0) == 0.5
        # GammaGamma limit at the L=1 boundary agrees with nearby evaluation
        spec = GammaGamma(1.0, 2.0, 2.0)
        limit = dist.pdf(spec, 0.0)
        assert limit == pytest.approx(1.0)
        assert dist.pdf(spec, 1e-9) == pytest.approx(limit, rel=1e-3)

    def test_array_and_scalar_agree(self):
        xs = np.array([0.0, 0.5, 1.0, 3.0])
        for spec in (GammaPower(4.0, 1.0), KAmplitude(2.0, 1.0)):
            arr = dist.pdf(spec, xs)
            assert arr.shape == xs.shape
            for x, v in zip(xs, arr):
                assert dist.pdf(spec, float(x)) == pytest.approx(v, rel=1e-12,
                                                                 abs=1e-300)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            dist.pdf(GammaPower(1.0, 1.0), -0.1)


class TestChf2:
    def test_normalized_at_one_exactly(self):
        for spec in ALL_SPECS:
            assert dist.chf2_analytic(spec, 1.0) == 1.0
            assert dist.log_chf2_analytic(spec, 1.0) == 0.0

    def test_gamma_mean(self):
        assert dist.chf2_analytic(GammaPower(4.0, 3.0), 2.0) == 3.0

    def test_weibull_example(self):
        assert dist.chf2_analytic(Weibull(1.0, 2.0), 3.0) == 1.0

    def test_ggamma_log_example(self):
        # (mu/LM) Gamma(5)Gamma(3) / (Gamma(4)Gamma(2)) = 1 at s=2
        assert abs(dist.log_chf2_analytic(GammaGamma(4.0, 2.0, 1.0), 2.0)) \
            <= 1e-12

    def test_fisher_log_example(self):
        assert dist.log_chf2_analytic(Fisher(1.0, 3.0, 1.0), 2.0) == \
            pytest.approx(math.log(1.5), rel=1e-12)

    def test_exp_of_log_form_matches(self):
        for spec in ALL_SPECS:
            lo, hi = dist.strip(spec)
            for s in (0.5, 1.0, 1.7, 2.5, 3.0):
                if not lo < s < hi:
                    continue
                phi = dist.chf2_analytic(spec, s)
                assert math.exp(dist.log_chf2_analytic(spec, s)) == \
                    pytest.approx(phi, rel=1e-12)

    def test_large_shapes_stay_finite(self):
        spec = GammaGamma(1e4, 1e4, 1.0)
        value = dist.log_chf2_analytic(spec, 3.0)
        assert math.isfinite(value)

    def test_strip_errors(self):
        with pytest.raises(StripError, match="strip"):
            dist.chf2_analytic(GammaPower(0.5, 1.0), 0.3)
        err = None
        try:
            dist.chf2_analytic(Fisher(1.0, 3.0, 1.0), 4.5)
        except StripError as exc:
            err = exc
        assert err is not None and err.hi == 4.0 and err.lo == 0.0

    def test_fisher_strip_is_two_sided(self):
        lo, hi = dist.strip(Fisher(2.0, 3.0, 1.0))
        assert lo == -1.0 and hi == 4.0


class TestClassicalMoments:
    def test_m0_is_one(self):
        for spec in ALL_SPECS:
            assert dist.classical_moment(spec, 0) == 1.0

    def test_exponential_moments_exact(self):
        for mu in (1.0, 2.0, 3.5):
            spec = GammaPower(1.0, mu)
            for n in range(7):
                assert dist.classical_moment(spec, n) == \
                    mu**n * math.factorial(n)

    def test_rayleigh_m2(self):
        assert dist.classical_moment(Rayleigh(1.0), 2) == 1.0

    def test_maxwell_m1(self):
        assert dist.classical_moment(Maxwell(1.0), 1) == pytest.approx(
            2.0 * math.sqrt(2.0 / math.pi), rel=1e-12)

    def test_fisher_existence_bound(self):
        with pytest.raises(MomentDoesNotExistError, match="n < 3"):
            dist.classical_moment(Fisher(1.0, 3.0, 1.0), 3)
        assert dist.classical_moment(Fisher(1.0, 3.0, 1.0), 2) > 0.0

    def test_matches_chf2_bitwise(self):
        for spec in ALL_SPECS:
            _, hi = dist.strip(spec)
            for n in range(4):
                if n + 1 >= hi:
                    continue
                assert dist.classical_moment(spec, n) == \
                    dist.chf2_analytic(spec, n + 1.0)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            dist.classical_moment(GammaPower(1.0, 1.0), -1)
        with pytest.raises(ValueError):
            dist.classical_moment(GammaPower(1.0, 1.0), 1.5)


def finite_difference_log_cumulants(spec, n_max=4):
    """Richardson-extrapolated central differences of the log transform.

    Step sizes grow with the order: the fourth-order stencil divides by h^4,
    so h = 1e-3 would put double-precision roundoff (~1e-14 in the stencil
    numerator) three orders of magnitude above the 1e-5 agreement gate.
    """
    psi = lambda s: dist.log_chf2_analytic(spec, s)

    def d_n(n, h):
        if n == 1:
            return (psi(1 + h) - psi(1 - h)) / (2 * h)
        if n == 2:
            return (psi(1 + h) - 2 * psi(1.0) + psi(1 - h)) / h**2
        if n == 3:
            return (psi(1 + 2 * h) - 2 * psi(1 + h) + 2 * psi(1 - h)
                    - psi(1 - 2 * h)) / (2 * h**3)
        return (psi(1 + 2 * h) - 4 * psi(1 + h) + 6 * psi(1.0)
                - 4 * psi(1 - h) + psi(1 - 2 * h)) / h**4

    out = []
    for n in range(1, n_max + 1):
        h = 1e-3 if n <= 2 else 2e-2
        out.append((4.0 * d_n(n, h / 2) - d_n(n, h)) / 3.0)
    return out


class TestLogCumulants:
    def test_exponential_first_orders(self):
        k = dist.log_cumulants_analytic(GammaPower(1.0, 1.0), 2)
        assert k[0] == pytest.approx(-0.5772156649, abs=1e-9)
        assert k[1] == pytest.approx(math.pi**2 / 6.0, rel=1e-12)

    def test_fisher_symmetric_k2(self):
        k = dist.log_cumulants_analytic(Fisher(1.0, 1.0, 1.0), 2)
        assert k[1] == pytest.approx(math.pi**2 / 3.0, rel=1e-12)

    def test_nakagami_third_order(self):
        k = dist.log_cumulants_analytic(Nakagami(1.0, 1.0), 3)
        assert k[2] == pytest.approx(polygamma(2, 1.0) / 8.0, rel=1e-12)
        assert k[2] == pytest.approx(-0.3005, abs=1e-4)

    def test_finite_difference_agreement(self):
        for spec in SMOOTH_SHAPE_SPECS:
            analytic = dist.log_cumulants_analytic(spec, 4)
            fd = finite_difference_log_cumulants(spec, 4)
            for n in range(4):
                assert analytic[n] == pytest.approx(fd[n], abs=1e-5), \
                    (spec, n + 1)

    def test_compound_additivity(self):
        for spec in ALL_SPECS:
            comps = dist.components(spec)
            if comps is None:
                continue
            speckle, texture = comps
            k_total = dist.log_cumulants_analytic(spec, 4)
            k_u = dist.log_cumulants_analytic(speckle, 4)
            k_z = dist.log_cumulants_analytic(texture, 4)
            for n in range(4):
                assert abs(k_total[n] - k_u[n] - k_z[n]) <= 1e-10, (spec, n)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            dist.log_cumulants_analytic(GammaPower(1.0, 1.0), 0)
        with pytest.raises(ValueError):
            dist.log_cumulants_analytic(GammaPower(1.0, 1.0), 7)

    def test_texture_only_variant(self):
        spec = KAmplitude(2.0, 1.0)
        full = dist.log_cumulants_analytic(spec, 4)
        reduced = dist.texture_only_log_cumulants(spec, 4)
        assert reduced[0] == full[0]
        for n in range(2, 5):
            assert reduced[n - 1] == pytest.approx(
                0.5**n * polygamma(n - 1, 2.0), rel=1e-12)
            # the full form carries the speckle polygamma term on top
            assert full[n - 1] == pytest.approx(
                reduced[n - 1] + 0.5**n * polygamma(n - 1, 1.0), rel=1e-12)
        with pytest.raises(ValueError):
            dist.texture_only_log_cumulants(GammaPower(1.0, 1.0), 2)


class TestRayleighWeibullIdentity:
    def test_all_operations_match(self):
        z = 1.7
        ray, wei = Rayleigh(z), Weibull(z, 2.0)
        xs = np.linspace(0.0, 6.0, 25)
        assert np.max(np.abs(dist.pdf(ray, xs) - dist.pdf(wei, xs))) <= 1e-14
        for s in (0.5, 1.0, 2.0, 3.0):
            assert abs(dist.chf2_analytic(ray, s)
                       - dist.chf2_analytic(wei, s)) <= 1e-14
        for n in range(5):
            assert abs(dist.classical_moment(ray, n)
                       - dist.classical_moment(wei, n)) <= \
                1e-14 * dist.classical_moment(wei, n)
        k_r = dist.log_cumulants_analytic(ray, 4)
        k_w = dist.log_cumulants_analytic(wei, 4)
        assert max(abs(a - b) for a, b in zip(k_r, k_w)) <= 1e-14


class TestComponents:
    def test_ggamma_factorization(self):
        speckle, texture = dist.components(GammaGamma(4.0, 2.0, 1.0))
        assert speckle == GammaPower(4.0, 1.0)
        assert texture == GammaPower(2.0, 1.0)

    def test_simple_families_have_none(self):
        for spec in (GammaPower(2.0, 1.0), Weibull(1.0, 2.0), Maxwell(1.0),
                     Rayleigh(1.0), Nakagami(2.0, 1.0), InverseGamma(2.0, 1.0)):
            assert dist.components(spec) is None

    def test_k_speckle_is_unit_rayleigh(self):
        speckle, texture = dist.components(KAmplitude(2.0, 1.0))
        assert speckle == Rayleigh(1.0)
        # unit mean square for the speckle factor
        assert dist.classical_moment(speckle, 2) == 1.0
        assert texture == Nakagami(2.0, math.sqrt(2.0))

    def test_factor_transforms_multiply(self):
        for spec in (GammaGamma(4.0, 2.0, 1.0), KAmplitude(2.0, 1.0),
                     WeibullNakagami(2.0, 2.0, 1.0), Fisher(3.0, 4.0, 1.0)):
            speckle, texture = dist.components(spec)
            for s in (1.0, 1.5, 2.0, 2.5):
                product = (dist.chf2_analytic(speckle, s)
                           * dist.chf2_analytic(texture, s))
                assert dist.chf2_analytic(spec, s) == pytest.approx(
                    product, rel=1e-12)
