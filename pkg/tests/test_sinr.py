"""Per-hop SINR statistics against quadrature and limit oracles."""

import math

import numpy as np
import pytest

from oracles import integral_0_inf

from mmwrelay.sinr import (
    GaussianApprox,
    HopParams,
    NoInterference,
    SinrDistribution,
    diversity_gain,
    effective_sinr_cdf,
    effective_sinr_pdf,
    gaussian_approx_cdf,
    high_snr_cdf_asymptote,
    interference_snr_pdf,
    joint_outdated_updated_pdf,
    outdated_snr_cdf,
    outdated_snr_cdf_series,
    outdated_snr_pdf,
    sinr_moment,
)

P_INT = HopParams(
    antennas=2, m=2.0, rho=0.3, snr=10.0, interferers=2, m_r=1.5, interference_snr=2.0
)


class TestOutdatedSnr:
    def test_exponential_point(self):
        p = HopParams(antennas=1, m=1.0, rho=0.0, snr=1.0)
        assert outdated_snr_pdf(p, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert outdated_snr_cdf(p, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_pdf_mass_is_the_ceiling(self):
        p = HopParams(antennas=2, m=2.0, rho=0.5, snr=10.0)
        mass = integral_0_inf(lambda x: outdated_snr_pdf(p, x))
        assert mass == pytest.approx(0.5**4, rel=1e-9)

    def test_pdf_vanishes_at_origin(self):
        p = HopParams(antennas=3, m=2.0, rho=0.2, snr=5.0)
        assert outdated_snr_pdf(p, 1e-12) < 1e-60
        assert outdated_snr_pdf(p, 0.0) == 0.0

    def test_incomplete_gamma_equals_finite_sum(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            p = HopParams(
                antennas=int(rng.integers(1, 7)),
                m=float(rng.integers(1, 5)),
                rho=float(rng.uniform(0, 0.95)),
                snr=float(rng.uniform(0.1, 100.0)),
            )
            xs = rng.uniform(0.0, 5.0 * p.snr, 8)
            a = outdated_snr_cdf(p, xs)
            b = outdated_snr_cdf_series(p, xs)
            assert np.max(np.abs(a - b)) < 1e-12

    def test_series_rejects_non_integer(self):
        p = HopParams(antennas=3, m=0.7, rho=0.0, snr=1.0)
        with pytest.raises(ValueError):
            outdated_snr_cdf_series(p, 1.0)
        # the incomplete-gamma route stays valid
        assert 0.0 < outdated_snr_cdf(p, 1.0) < 1.0

    def test_renormalized_matches_plain_gamma(self):
        from mmwrelay.special.gammafn import reg_lower_gamma

        p = HopParams(antennas=2, m=2.0, rho=0.5, snr=10.0)
        assert outdated_snr_cdf(p, 5.0, "renormalized") == pytest.approx(
            reg_lower_gamma(4.0, 4.0 * 5.0 / 10.0), rel=1e-12
        )


class TestJointDensity:
    P = HopParams(antennas=2, m=1.0, rho=0.4, snr=3.0)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            x, y = rng.uniform(0.05, 15.0, 2)
            assert joint_outdated_updated_pdf(self.P, x, y) == pytest.approx(
                joint_outdated_updated_pdf(self.P, y, x), rel=1e-12
            )

    def test_total_mass(self):
        inner = lambda x: np.array(
            [integral_0_inf(lambda y: joint_outdated_updated_pdf(self.P, xi, y)) for xi in np.atleast_1d(x)]
        )
        mass = integral_0_inf(inner, n=2001)
        assert mass == pytest.approx(1.0, abs=1e-3)

    def test_marginal_is_plain_gamma(self):
        # the consistent marginal has mean snr (no correlation stretch)
        k, theta = 2.0, 1.5
        x0 = 1.7
        marg = integral_0_inf(lambda y: joint_outdated_updated_pdf(self.P, x0, y))
        want = math.exp(-k * math.log(theta) + (k - 1) * math.log(x0) - math.lgamma(k) - x0 / theta)
        assert marg == pytest.approx(want, rel=1e-6)

    def test_degenerate_rho_rejected(self):
        with pytest.raises(ValueError):
            joint_outdated_updated_pdf(HopParams(antennas=2, m=1.0, rho=0.0, snr=3.0), 1.0, 1.0)


class TestInterference:
    def test_exponential_point(self):
        p = HopParams(antennas=1, m=1.0, rho=0.0, snr=1.0, interferers=1, m_r=1.0, interference_snr=1.0)
        assert interference_snr_pdf(p, 0.5) == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_normalized(self):
        p = HopParams(antennas=1, m=1.0, rho=0.0, snr=1.0, interferers=7, m_r=3.0, interference_snr=2.0)
        assert integral_0_inf(lambda x: interference_snr_pdf(p, x)) == pytest.approx(1.0, rel=1e-10)

    def test_no_interference_signalled(self):
        p = HopParams(antennas=1, m=1.0, rho=0.0, snr=1.0)
        with pytest.raises(NoInterference):
            interference_snr_pdf(p, 1.0)


class TestEffectiveSinr:
    def test_cdf_at_zero(self):
        assert effective_sinr_cdf(SinrDistribution(P_INT), 0.0) == 0.0

    def test_vanishing_interference_limit(self):
        pl = HopParams(
            antennas=2, m=1.0, rho=0.2, snr=10.0, interferers=50, m_r=1.0, interference_snr=1e-6
        )
        pn = HopParams(antennas=2, m=1.0, rho=0.2, snr=10.0)
        for x in (0.5, 2.0, 8.0):
            a = effective_sinr_cdf(SinrDistribution(pl), x)
            b = effective_sinr_cdf(SinrDistribution(pn), x)
            assert a == pytest.approx(b, abs=1e-3)

    def test_monotone_in_x(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            p = HopParams(
                antennas=int(rng.integers(1, 6)),
                m=float(rng.integers(1, 5)),
                rho=float(rng.uniform(0, 0.9)),
                snr=float(rng.uniform(0.5, 200.0)),
                interferers=int(rng.integers(1, 8)),
                m_r=float(rng.uniform(0.5, 4.0)),
                interference_snr=float(rng.uniform(0.1, 10.0)),
            )
            mode = "published" if rng.random() < 0.5 else "renormalized"
            xs = np.linspace(0.0, 20.0 * p.snr, 1000)
            vals = effective_sinr_cdf(SinrDistribution(p, mode), xs)
            assert (np.diff(vals) >= -1e-12).all()

    def test_mode_consistency(self):
        dist = SinrDistribution(P_INT.__class__(**{**P_INT.__dict__, "rho": 0.6}), "renormalized")
        assert effective_sinr_cdf(dist, 0.0) == 0.0
        assert effective_sinr_cdf(dist, 1e9 * P_INT.snr) == pytest.approx(1.0, abs=1e-6)

    def test_published_ceiling(self):
        dist = SinrDistribution(P_INT, "published")
        ceiling = (1.0 - P_INT.rho) ** P_INT.nm
        assert effective_sinr_cdf(dist, 1e12) == pytest.approx(ceiling, abs=1e-6)

    def test_interference_ordering(self):
        base = dict(antennas=3, m=2.0, rho=0.1, snr=20.0, interferers=2, m_r=1.0)
        xs = np.linspace(0.1, 50.0, 50)
        prev = None
        for isnr in (0.1, 1.0, 10.0):
            p = HopParams(**base, interference_snr=isnr)
            vals = effective_sinr_cdf(SinrDistribution(p), xs)
            if prev is not None:
                assert (vals >= prev - 1e-12).all()
            prev = vals

    def test_quadrature_matches_series(self):
        dist = SinrDistribution(P_INT, "published")
        xs = np.array([0.5, 2.0, 10.0])
        a = effective_sinr_cdf(dist, xs, method="series")
        b = effective_sinr_cdf(dist, xs, method="quadrature")
        assert np.max(np.abs(a - b) / b) < 1e-8

    def test_non_integer_shape_rejected_with_interference(self):
        p = HopParams(antennas=3, m=0.7, rho=0.1, snr=5.0, interferers=1, m_r=1.0, interference_snr=1.0)
        with pytest.raises(ValueError):
            effective_sinr_cdf(SinrDistribution(p), 1.0)


class TestEffectivePdf:
    def test_vanishes_at_origin(self):
        assert effective_sinr_pdf(SinrDistribution(P_INT), 1e-14) < 1e-20

    def test_mass_at_rho_zero(self):
        p = HopParams(antennas=2, m=2.0, rho=0.0, snr=10.0, interferers=1, m_r=1.0, interference_snr=1.0)
        dist = SinrDistribution(p)
        mass = integral_0_inf(lambda x: effective_sinr_pdf(dist, x))
        assert mass == pytest.approx(1.0, abs=1e-4)

    def test_matches_cdf_derivative(self):
        p = HopParams(antennas=2, m=2.0, rho=0.0, snr=10.0, interferers=1, m_r=1.0, interference_snr=1.0)
        dist = SinrDistribution(p)
        h = 1e-5
        fd = (effective_sinr_cdf(dist, 1.0 + h) - effective_sinr_cdf(dist, 1.0 - h)) / (2 * h)
        assert fd == pytest.approx(effective_sinr_pdf(dist, 1.0), rel=1e-5)

    def test_published_derivative_consistency_nonzero_rho(self):
        # the printed pdf is exactly d/dx of the printed cdf at any rho
        dist = SinrDistribution(P_INT, "published")
        h = 1e-6
        for x0 in (0.4, 1.3, 6.0):
            fd = (effective_sinr_cdf(dist, x0 + h) - effective_sinr_cdf(dist, x0 - h)) / (2 * h)
            assert fd == pytest.approx(effective_sinr_pdf(dist, x0), rel=1e-6)


class TestMoments:
    def test_zeroth_moment(self):
        p = HopParams(antennas=3, m=2.0, rho=0.0, snr=7.0, interferers=2, m_r=1.0, interference_snr=1.0)
        assert sinr_moment(SinrDistribution(p), 0.0) == pytest.approx(1.0, abs=1e-6)
        pub = HopParams(**{**p.__dict__, "rho": 0.4})
        assert sinr_moment(SinrDistribution(pub, "published"), 0.0) == pytest.approx(
            0.6**6, rel=1e-8
        )

    def test_mean_no_interference(self):
        p = HopParams(antennas=3, m=2.0, rho=0.0, snr=7.0)
        assert sinr_moment(SinrDistribution(p), 1.0) == pytest.approx(7.0, rel=1e-4)

    def test_against_quadrature(self):
        p = HopParams(antennas=2, m=2.0, rho=0.3, snr=10.0, interferers=1, m_r=1.0, interference_snr=1.0)
        dist = SinrDistribution(p, "published")
        m1 = sinr_moment(dist, 1.0)
        oracle = integral_0_inf(lambda x: x * effective_sinr_pdf(dist, x))
        assert m1 == pytest.approx(oracle, rel=1e-4)
        m_half = sinr_moment(dist, 0.5)
        oracle_half = integral_0_inf(lambda x: np.sqrt(x) * effective_sinr_pdf(dist, x))
        assert m_half == pytest.approx(oracle_half, rel=1e-4)


class TestAsymptote:
    BASE = dict(antennas=5, m=4.0, snr=1e6, interferers=2, m_r=3.0, interference_snr=1.0)

    def test_ratio_to_exact(self):
        p = HopParams(rho=0.1, **self.BASE)
        exact = effective_sinr_cdf(SinrDistribution(p), 1.0, method="quadrature")
        assert high_snr_cdf_asymptote(p, 1.0) / exact == pytest.approx(1.0, abs=0.05)

    def test_rho_independent(self):
        a = high_snr_cdf_asymptote(HopParams(rho=0.1, **self.BASE), 1.0)
        b = high_snr_cdf_asymptote(HopParams(rho=0.9, **self.BASE), 1.0)
        assert a == b

    def test_power_law_in_snr(self):
        p1 = HopParams(rho=0.1, **self.BASE)
        p2 = HopParams(**{**self.BASE, "snr": 2e6}, rho=0.1)
        ratio = high_snr_cdf_asymptote(p1, 1.0) / high_snr_cdf_asymptote(p2, 1.0)
        assert ratio == pytest.approx(2.0**20, rel=1e-10)


class TestDiversityAndGaussian:
    def test_diversity_gain(self):
        assert diversity_gain(HopParams(antennas=5, m=4.0, rho=0.0, snr=1.0)) == 20
        assert diversity_gain(HopParams(antennas=1, m=1.0, rho=0.0, snr=1.0)) == 1
        assert diversity_gain(HopParams(antennas=10, m=0.5, rho=0.0, snr=1.0)) == 5.0

    def test_gaussian_median(self):
        p = HopParams(antennas=2, m=2.0, rho=0.5, snr=10.0)
        assert gaussian_approx_cdf(p, (1 - 0.5) * 10.0) == 0.5

    def test_gaussian_moments(self):
        approx = GaussianApprox.from_params(HopParams(antennas=5, m=4.0, rho=0.3, snr=10.0))
        assert approx.mu == pytest.approx(7.0)
        assert approx.sigma2 == pytest.approx(49.0 / 20.0)

    def test_gap_shrinks_with_antennas(self):
        xs = np.linspace(0.1, 30.0, 400)

        def sup_gap(n):
            p = HopParams(antennas=n, m=1.0, rho=0.0, snr=10.0)
            exact = effective_sinr_cdf(SinrDistribution(p, "renormalized"), xs)
            gauss = gaussian_approx_cdf(p, xs)
            return float(np.max(np.abs(exact - gauss)))

        assert sup_gap(150) < sup_gap(40)
