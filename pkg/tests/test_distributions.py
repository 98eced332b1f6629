"""
확률 커널 검증: folded normal, 절단 정규, Gamma, 보조 커널, RNG 파생
"""
import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad
from scipy.special import ndtr

from foldnorm_sdk.distributions import (
    derive_rng,
    fn_cdf,
    fn_log_pdf,
    fn_mean,
    fn_pdf,
    fn_sample,
    fn_variance,
    folded_normal_logpdf,
    gamma_log_pdf,
    gamma_quantile,
    gamma_sample,
    inv_gamma_log_pdf,
    normal_cdf,
    seed_entropy,
    tn_log_pdf,
    tn_sample,
    truncated_normal_logpdf,
    uniform_log_pdf,
)
from foldnorm_sdk.errors import DomainError, ParameterError
from foldnorm_sdk.schema import FoldedNormalParams, GammaShapeScale, TruncatedNormalParams

MUS = [0.0, 0.5, -0.5, 2.0, -2.0]
SIGMAS = [0.05, 0.5, 1.0, 3.0]


def _fn(mu, sigma):
    return FoldedNormalParams(mu=mu, sigma=sigma)


class TestFoldedNormalDensity:
    """folded normal 로그 밀도"""

    def test_zero_mean_at_origin(self):
        assert fn_log_pdf(0.0, _fn(0.0, 1.0)) == pytest.approx(math.log(0.7978845608), abs=1e-9)
        assert fn_log_pdf(0.0, _fn(0.0, 1.0)) == pytest.approx(-0.2257914, abs=1e-7)

    def test_two_normal_terms(self):
        expected = math.log(stats.norm.pdf(1.0, 1.0, 1.0) + stats.norm.pdf(-1.0, 1.0, 1.0))
        assert fn_log_pdf(1.0, _fn(1.0, 1.0)) == pytest.approx(expected, abs=1e-12)
        assert math.exp(expected) == pytest.approx(0.4529333, abs=1e-7)

    @pytest.mark.parametrize("z", [0.0, 0.3, 2.0, 7.5, 40.0])
    @pytest.mark.parametrize("mu,sigma", [(3.0, 0.5), (0.2, 0.06), (1.0, 2.0)])
    def test_sign_symmetry_is_exact(self, z, mu, sigma):
        assert fn_log_pdf(z, _fn(mu, sigma)) == fn_log_pdf(z, _fn(-mu, sigma))

    def test_far_tail_is_finite(self):
        # 단순 합산이면 exp 언더플로로 -inf
        value = fn_log_pdf(100.0, _fn(0.0, 1.0))
        assert math.isfinite(value)
        assert value == pytest.approx(math.log(2.0) + stats.norm.logpdf(100.0), rel=1e-12)

    @pytest.mark.parametrize("mu", MUS)
    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_integrates_to_one(self, mu, sigma):
        p = _fn(mu, sigma)
        upper = abs(mu) + 40.0 * sigma
        total, _ = quad(
            lambda z: math.exp(fn_log_pdf(z, p)), 0.0, upper,
            points=[abs(mu)] if mu else None, limit=400, epsabs=1e-13, epsrel=1e-13,
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_vectorised_matches_scalar(self):
        z = np.array([0.0, 0.1, 0.5, 1.2])
        mu = np.array([0.2, -0.2, 0.5, 1.0])
        values = folded_normal_logpdf(z, mu, 0.3)
        for i in range(z.size):
            assert values[i] == pytest.approx(fn_log_pdf(z[i], _fn(mu[i], 0.3)), abs=1e-14)

    def test_small_sigma_normal_approximation(self):
        mu, sigma = 1.0, 0.1
        grid = np.linspace(0.0, 3.0, 3001)
        diff = [abs(fn_pdf(z, _fn(mu, sigma)) - stats.norm.pdf(z, mu, sigma)) for z in grid]
        assert max(diff) < 1e-4

    def test_negative_z_raises_domain_error(self):
        with pytest.raises(DomainError):
            fn_log_pdf(-0.1, _fn(0.0, 1.0))

    def test_nonpositive_sigma_raises_parameter_error(self):
        with pytest.raises(ParameterError):
            FoldedNormalParams(mu=0.0, sigma=0.0)
        with pytest.raises(ParameterError):
            fn_mean(FoldedNormalParams.model_construct(mu=0.0, sigma=-1.0))


class TestFoldedNormalCdf:
    """CDF = Phi((z-mu)/sigma) - Phi((-z-mu)/sigma)"""

    def test_examples(self):
        assert fn_cdf(1.959964, _fn(0.0, 1.0)) == pytest.approx(0.95, abs=1e-6)
        assert fn_cdf(0.0, _fn(0.7, 0.2)) == 0.0
        assert fn_cdf(1.0, _fn(1.0, 1.0)) == pytest.approx(0.4772499, abs=1e-7)

    def test_matches_integrated_density(self):
        p = _fn(1.0, 1.0)
        area, _ = quad(lambda z: fn_pdf(z, p), 0.0, 1.0, epsabs=1e-13)
        assert fn_cdf(1.0, p) == pytest.approx(area, abs=1e-10)

    def test_monotone_and_limit(self):
        p = _fn(-0.5, 0.8)
        values = [fn_cdf(z, p) for z in np.linspace(0.0, 10.0, 200)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("mu", MUS)
    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_derivative_matches_density(self, mu, sigma):
        p = _fn(mu, sigma)
        h = 1e-5 * sigma
        for z in np.linspace(0.1 * sigma, abs(mu) + 3.0 * sigma, 7):
            derivative = (fn_cdf(z + h, p) - fn_cdf(z - h, p)) / (2.0 * h)
            assert derivative == pytest.approx(fn_pdf(z, p), abs=1e-6)


class TestFoldedNormalSampling:
    """표본 추출과 평균/분산 닫힌 형태"""

    def test_half_normal_mean(self, rng):
        draws = fn_sample(_fn(0.0, 1.0), rng, size=100_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - math.sqrt(2.0 / math.pi)) < 3.0 * se
        assert fn_mean(_fn(0.0, 1.0)) == pytest.approx(math.sqrt(2.0 / math.pi), abs=1e-15)

    def test_negligible_fold(self, rng):
        draws = fn_sample(_fn(5.0, 0.1), rng, size=20_000)
        assert draws.mean() == pytest.approx(5.0, abs=0.005)
        assert abs(fn_mean(_fn(10.0, 1.0)) - 10.0) < 1e-10

    def test_mean_and_variance_match_monte_carlo(self, rng):
        p = _fn(1.0, 1.0)
        draws = fn_sample(p, rng, size=1_000_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - fn_mean(p)) < 4.0 * se
        assert draws.var(ddof=1) == pytest.approx(fn_variance(p), rel=0.01)
        assert fn_mean(p) >= abs(p.mu)

    def test_scalar_draw(self, rng):
        value = fn_sample(_fn(-1.0, 0.5), rng)
        assert isinstance(value, float) and value >= 0.0

    def test_ks_against_cdf(self):
        mu, sigma = 0.4, 0.7
        draws = fn_sample(_fn(mu, sigma), np.random.default_rng(7), size=100_000)
        result = stats.kstest(draws, lambda z: ndtr((z - mu) / sigma) - ndtr((-z - mu) / sigma))
        assert result.pvalue > 0.01

    def test_signed_normal_path_matches_folded_path(self):
        """|N(gamma mu, sigma^2)| 과 FN(mu, sigma^2)은 같은 분포"""
        mu, sigma = 0.15, 0.06
        rng = np.random.default_rng(11)
        signs = np.where(rng.random(50_000) < 0.6, -1.0, 1.0)
        signed = np.abs(signs * mu + sigma * rng.standard_normal(50_000))
        folded = fn_sample(_fn(mu, sigma), rng, size=50_000)
        assert stats.ks_2samp(signed, folded).pvalue > 0.01


class TestTruncatedNormal:
    """하한 0 절단 정규"""

    def test_half_mass_removed(self):
        p = TruncatedNormalParams(zeta=0.0, rho2=1.0)
        assert tn_log_pdf(0.5, p) == pytest.approx(math.log(2.0 * stats.norm.pdf(0.5)), abs=1e-12)

    def test_far_from_bound_is_untruncated(self):
        p = TruncatedNormalParams(zeta=3.0, rho2=0.01)
        for x in (2.8, 3.0, 3.25):
            assert tn_log_pdf(x, p) == pytest.approx(stats.norm.logpdf(x, 3.0, 0.1), abs=1e-10)

    def test_below_bound_is_minus_infinity(self):
        assert tn_log_pdf(-1e-9, TruncatedNormalParams()) == -math.inf
        values = truncated_normal_logpdf(np.array([-1.0, 1.0]), 0.0, 100.0, 0.0)
        assert values[0] == -math.inf and np.isfinite(values[1])

    def test_matches_quadrature_normalisation(self):
        zeta, rho2 = 0.5, 2.0
        area, _ = quad(lambda x: math.exp(float(truncated_normal_logpdf(x, zeta, rho2))), 0.0, np.inf)
        assert area == pytest.approx(1.0, abs=1e-9)

    def test_samples_respect_bound(self, rng):
        p = TruncatedNormalParams(zeta=-2.0, rho2=0.25)
        draws = tn_sample(p, rng, size=10_000)
        assert np.all(draws >= 0.0)
        assert stats.kstest(draws, stats.truncnorm(4.0, np.inf, loc=-2.0, scale=0.5).cdf).pvalue > 0.01

    def test_extreme_truncation_sampling(self, rng):
        p = TruncatedNormalParams(zeta=-3.0, rho2=0.25)
        draws = tn_sample(p, rng, size=1000)
        assert np.all(np.isfinite(draws)) and np.all(draws >= 0.0)

    def test_nonpositive_rho2(self):
        with pytest.raises(ParameterError):
            TruncatedNormalParams(rho2=0.0)


class TestGamma:
    """shape-scale Gamma"""

    def test_exponential_special_case(self, rng):
        draws = gamma_sample(GammaShapeScale(shape=1.0, scale=2.0), rng, size=100_000)
        assert abs(draws.mean() - 2.0) < 3.0 * 2.0 / math.sqrt(draws.size)

    def test_mean_is_shape_times_scale(self, rng):
        p = GammaShapeScale(shape=2.95, scale=9.75)
        draws = gamma_sample(p, rng, size=100_000)
        se = math.sqrt(p.shape) * p.scale / math.sqrt(draws.size)
        assert abs(draws.mean() - 28.7625) < 4.0 * se
        assert p.mean == pytest.approx(28.7625)

    def test_cdf_against_integrated_density(self, rng):
        p = GammaShapeScale(shape=3.56, scale=1.54)
        area, _ = quad(lambda t: math.exp(float(gamma_log_pdf(t, p))), 0.0, 6.0)
        assert area == pytest.approx(stats.gamma.cdf(6.0, 3.56, scale=1.54), abs=1e-9)
        draws = gamma_sample(p, rng, size=100_000)
        assert np.mean(draws <= 6.0) == pytest.approx(area, abs=0.005)

    def test_quantile_matches_scipy(self):
        u = np.array([0.01, 0.3, 0.5, 0.9, 0.999])
        np.testing.assert_allclose(
            gamma_quantile(u, 1.95, 4.75), stats.gamma.ppf(u, 1.95, scale=4.75), rtol=1e-10
        )

    def test_quantile_is_monotone_in_shape_and_scale(self):
        u = np.full(5, 0.37)
        shapes = np.array([1.1, 1.5, 2.0, 3.0, 5.0])
        values = gamma_quantile(u, shapes, 2.0 * shapes)
        assert np.all(np.diff(values) > 0)

    def test_log_pdf_outside_support(self):
        assert gamma_log_pdf(0.0, GammaShapeScale(shape=2.0, scale=1.0)) == -math.inf

    def test_nonpositive_parameters(self):
        with pytest.raises(ParameterError):
            GammaShapeScale(shape=0.0, scale=1.0)
        with pytest.raises(ParameterError):
            gamma_quantile(0.5, -1.0, 1.0)


class TestAuxiliaryKernels:
    """정규 CDF, 역감마, 균등"""

    def test_normal_cdf(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-7)

    def test_inverse_gamma_matches_scipy(self):
        for x in (0.001, 0.0036, 0.5, 3.0):
            assert inv_gamma_log_pdf(x, 0.01, 0.01) == pytest.approx(
                stats.invgamma.logpdf(x, 0.01, scale=0.01), rel=1e-10
            )
        assert inv_gamma_log_pdf(0.0, 0.01, 0.01) == -math.inf

    def test_uniform_open_interval(self):
        assert uniform_log_pdf(0.05, 0.0, 0.075) == pytest.approx(-math.log(0.075))
        assert uniform_log_pdf(0.075, 0.0, 0.075) == -math.inf
        assert uniform_log_pdf(0.0, 0.0, 0.075) == -math.inf
        assert uniform_log_pdf(0.01, 0.0, 0.0) == -math.inf


class TestRandomStreams:
    """(seed, *keys) 파생"""

    def test_same_keys_same_stream(self):
        a = derive_rng(5, "chain", 1).random(5)
        b = derive_rng(5, "chain", 1).random(5)
        np.testing.assert_array_equal(a, b)

    def test_distinct_keys_distinct_streams(self):
        a = derive_rng(5, "chain", 0).random(5)
        b = derive_rng(5, "chain", 1).random(5)
        c = derive_rng(6, "chain", 0).random(5)
        assert not np.array_equal(a, b) and not np.array_equal(a, c)

    def test_string_keys_are_hashed(self):
        entropy = seed_entropy(1, "sigma=0.06", 3)
        assert entropy[0] == 1 and entropy[2] == 3
        assert entropy[1] == seed_entropy(1, "sigma=0.06")[1]

    def test_negative_seed(self):
        with pytest.raises(ParameterError):
            derive_rng(-1)
