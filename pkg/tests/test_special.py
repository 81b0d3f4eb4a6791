"""Special-function layer against independent oracles."""

import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    bessel_i_series,
    gaussian_tail_quadrature,
    integral_0_inf,
    j0_series,
    lower_gamma_finite_sum,
)

from mmwrelay.special import (
    ContourConfig,
    ContourConvergenceError,
    FoxHBivariateSpec,
    IllPosedSpecError,
    MeijerGSpec,
    bessel_i,
    bessel_i_scaled,
    bessel_j0,
    erf,
    fox_h_bivariate,
    gaussian_q,
    integrate_value,
    lower_incomplete_gamma,
    meijer_g,
    meijer_g_estimate,
    reg_lower_gamma,
)

EXP_SPEC = MeijerGSpec(m=1, n=0, p=0, q=1, a=(), b=(0.0,))
LOG_SPEC = MeijerGSpec(m=1, n=2, p=2, q=2, a=(1.0, 1.0), b=(1.0, 0.0))


def binom_spec(a):
    return MeijerGSpec(m=1, n=1, p=1, q=1, a=(1.0 - a,), b=(0.0,))


class TestBesselJ0:
    def test_at_zero(self):
        assert bessel_j0(0.0) == 1.0

    def test_first_zero(self):
        # first root of J0, from the high-precision series oracle
        assert abs(bessel_j0(2.404825557695773)) < 1e-10

    def test_against_series_oracle(self):
        x = 8.2938
        assert bessel_j0(x) == pytest.approx(j0_series(x), abs=1e-10)

    def test_series_asymptotic_seam(self):
        # the float series oracle loses ~x/2 digits to cancellation, so it
        # only reaches a little past the branch switch
        for x in (13.9, 14.0, 14.1):
            assert bessel_j0(x) == pytest.approx(j0_series(x, terms=160), abs=1e-10)
        assert bessel_j0(20.0) == pytest.approx(j0_series(20.0, terms=160), abs=2e-9)

    def test_large_argument_reference(self):
        mp = pytest.importorskip("mpmath")
        for x in (50.0, 137.5, 1000.0):
            assert bessel_j0(x) == pytest.approx(float(mp.besselj(0, x)), abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_bounded_and_even(self, x):
        v = bessel_j0(x)
        assert abs(v) <= 1.0 + 1e-12
        assert v == bessel_j0(-x)


class TestBesselI:
    def test_boundaries(self):
        assert bessel_i(0, 0.0) == 1.0
        assert bessel_i(1, 0.0) == 0.0

    def test_against_series_oracle(self):
        assert bessel_i(3, 2.5) == pytest.approx(bessel_i_series(3, 2.5), rel=1e-10)
        assert bessel_i(0.5, 7.0) == pytest.approx(bessel_i_series(0.5, 7.0), rel=1e-10)

    def test_overflow_signalled(self):
        with pytest.raises(OverflowError):
            bessel_i(0, 800.0)
        # scaled variant stays finite and matches the asymptotic level
        v = bessel_i_scaled(0, 800.0)
        assert 0 < v < 1
        assert v == pytest.approx(1.0 / math.sqrt(2 * math.pi * 800.0), rel=1e-2)

    def test_branch_seam(self):
        for nu in (0.0, 2.0, 9.0):
            split = max(40.0, 1.5 * nu * nu)
            for x in (split * 0.98, split * 1.02):
                assert bessel_i_scaled(nu, x) == pytest.approx(
                    bessel_i_series(nu, x, terms=400) * math.exp(-x), rel=1e-9
                )


class TestIncompleteGamma:
    def test_at_zero(self):
        assert lower_incomplete_gamma(3.7, 0.0) == 0.0

    def test_exponential_case(self):
        assert lower_incomplete_gamma(1.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_against_finite_sum_oracle(self):
        assert lower_incomplete_gamma(5, 3.0) == pytest.approx(
            lower_gamma_finite_sum(5, 3.0), rel=1e-12
        )

    def test_bounds_and_monotone(self):
        s = 2.5
        xs = np.linspace(0.0, 30.0, 200)
        vals = lower_incomplete_gamma(s, xs)
        assert (np.diff(vals) >= -1e-12).all()
        assert vals.min() >= 0.0 and vals.max() <= math.gamma(s) + 1e-12


class TestGaussianQ:
    def test_at_zero(self):
        assert gaussian_q(0.0) == 0.5

    def test_deep_tail(self):
        assert gaussian_q(10.0) < 1e-23

    def test_against_tail_quadrature(self):
        # frozen from the trapezoid tail oracle
        assert gaussian_q(1.0) == pytest.approx(0.15865525393146, abs=1e-6)
        assert gaussian_tail_quadrature(1.0) == pytest.approx(0.15865525393146, abs=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=-8.0, max_value=8.0, allow_nan=False))
    def test_symmetry(self, x):
        assert gaussian_q(x) + gaussian_q(-x) == pytest.approx(1.0, abs=1e-12)

    def test_erf_consistency(self):
        xs = np.linspace(-4, 4, 41)
        assert np.allclose(erf(xs), [math.erf(v) for v in xs], atol=1e-14)


class TestMeijerG:
    def test_exponential_identity(self):
        for z in np.geomspace(1e-3, 20.0, 25):
            assert meijer_g(EXP_SPEC, float(z)) == pytest.approx(math.exp(-z), rel=1e-8)

    def test_binomial_identity(self):
        # Gamma(2) * (1 + 0.5)^-2 = 4/9
        assert meijer_g(binom_spec(2.0), 0.5) == pytest.approx(4.0 / 9.0, rel=1e-10)

    def test_binomial_against_defining_integral(self):
        # G^{1,1}_{1,1}(z|1-a;0) = Gamma(a)(1+z)^{-a} = int_0^inf t^{a-1} e^{-(1+z)t} dt
        a, z = 3.5, 1.7
        oracle = integral_0_inf(lambda t: t ** (a - 1.0) * np.exp(-(1.0 + z) * t))
        assert meijer_g(binom_spec(a), z) == pytest.approx(oracle, rel=1e-9)

    def test_log_identity(self):
        assert meijer_g(LOG_SPEC, 1.0) == pytest.approx(math.log(2.0), rel=1e-10)
        for z in np.geomspace(1e-3, 20.0, 25):
            assert meijer_g(LOG_SPEC, float(z)) == pytest.approx(math.log1p(z), rel=1e-8)

    def test_domain_errors(self):
        with pytest.raises(IllPosedSpecError):
            meijer_g(EXP_SPEC, 0.0)
        with pytest.raises(IllPosedSpecError):
            meijer_g(EXP_SPEC, -1.0)
        # pole on the contour: shift forced onto the right pole lattice
        with pytest.raises(IllPosedSpecError):
            meijer_g(binom_spec(2.0), 0.5, ContourConfig(shift=0.0))

    def test_nonconvergence_reported(self):
        # an unreachable tolerance must surface with the achieved estimate
        bad = ContourConfig(node_count=64, max_node_count=128, tolerance=1e-30)
        with pytest.raises(ContourConvergenceError) as err:
            meijer_g(EXP_SPEC, 17.0, bad)
        assert math.isfinite(err.value.estimate)

    def test_refinement_monotonicity(self):
        # shipped kernels: estimate non-increasing with node doubling (until
        # it bottoms out at the floating noise floor)
        kernels = [
            (EXP_SPEC, 1.5),
            (LOG_SPEC, 0.8),
            (MeijerGSpec(m=1, n=2, p=2, q=1, a=(-4.0, -20.0), b=(0.0,)), 0.25),  # moment kernel
            (MeijerGSpec(m=1, n=2, p=2, q=1, a=(0.5 - 3, 1.0 - 21.0), b=(0.0,)), 0.04),  # error kernel
        ]
        for spec, z in kernels:
            estimates = []
            for n in (64, 128, 256, 512, 1024):
                _, est = meijer_g_estimate(
                    spec, z, ContourConfig(node_count=n, max_node_count=n, tolerance=1e-30), strict=False
                )
                estimates.append(est)
            floor = 1e-13 * max(abs(meijer_g(spec, z)), 1e-30)
            for prev, nxt in zip(estimates, estimates[1:]):
                if prev < floor:
                    break
                assert nxt <= prev * (1.0 + 1e-9)

    def test_trapezoid_rule(self):
        cfg = ContourConfig(rule="trapezoid", node_count=1024)
        assert meijer_g(EXP_SPEC, 2.0, cfg) == pytest.approx(math.exp(-2.0), rel=1e-8)


class TestFoxHBivariate:
    def factorizable(self, a):
        # product kernel: binomial group x exponential group, empty outer
        return FoxHBivariateSpec(
            outer_orders=(0, 0),
            group1_orders=(1, 1),
            group1_a=((1.0 - a, 1.0),),
            group1_b=((0.0, 1.0),),
            group2_orders=(1, 0),
            group2_a=(),
            group2_b=((0.0, 1.0),),
        )

    def test_factorization(self):
        for a, z1, z2 in ((2.0, 0.5, 1.0), (5.5, 2.0, 0.2), (1.5, 0.05, 3.0)):
            want = meijer_g(binom_spec(a), z1) * math.exp(-z2)
            assert fox_h_bivariate(self.factorizable(a), z1, z2) == pytest.approx(want, rel=1e-6)

    def test_exponential_kernel_vanishing_argument(self):
        # z2 -> 0+ of the exponential group leaves the univariate value * 1
        spec = self.factorizable(2.0)
        got = fox_h_bivariate(spec, 0.5, 1e-8)
        assert got == pytest.approx(meijer_g(binom_spec(2.0), 0.5), rel=1e-4)

    def test_capacity_kernel_against_quadrature(self):
        # single-antenna Rayleigh with one Rayleigh interferer, unit SNRs:
        # the coupled kernel must reproduce E[log(1+x)] of the printed density
        def pdf(x):
            acc = (1.0 + x) ** -1.0 + 1.0 * (1.0 + x) ** -2.0
            return np.exp(-x) * acc

        oracle = integral_0_inf(lambda x: np.log1p(x) * pdf(x))
        total = 0.0
        for p in range(2):
            spec = FoxHBivariateSpec(
                outer_orders=(0, 1),
                outer_a=((0.0, 1.0, 1.0),),
                group1_orders=(1, 1),
                group1_a=((-p * 1.0, 1.0),),
                group1_b=((0.0, 1.0),),
                group2_orders=(1, 2),
                group2_a=((1.0, 1.0), (1.0, 1.0)),
                group2_b=((1.0, 1.0), (0.0, 1.0)),
            )
            total += math.comb(1, p) * fox_h_bivariate(spec, 1.0, 1.0)
        assert total == pytest.approx(oracle, rel=1e-4)

    def test_domain_errors(self):
        spec = self.factorizable(2.0)
        with pytest.raises(IllPosedSpecError):
            fox_h_bivariate(spec, -1.0, 1.0)
        with pytest.raises(IllPosedSpecError):
            fox_h_bivariate(spec, 1.0, 0.0)

    def test_weight_validation(self):
        with pytest.raises(IllPosedSpecError):
            FoxHBivariateSpec(
                outer_orders=(0, 0),
                group1_orders=(1, 0),
                group1_a=(),
                group1_b=((0.0, -1.0),),
                group2_orders=(1, 0),
                group2_a=(),
                group2_b=((0.0, 1.0),),
            )


class TestQuadrature:
    def test_endpoint_singularity(self):
        # int_0^inf x^-1/2 e^-x dx = Gamma(1/2)
        v = integrate_value(lambda x: np.exp(-x) / np.sqrt(x), 0.0, np.inf)
        assert v == pytest.approx(math.sqrt(math.pi), rel=1e-10)

    def test_finite_interval(self):
        v = integrate_value(lambda x: np.log1p(x), 0.0, 1.0)
        assert v == pytest.approx(2.0 * math.log(2.0) - 1.0, rel=1e-10)


@pytest.mark.skipif(
    subprocess.run(
        [sys.executable, "-c", "import mmwrelay._mbkernel"], capture_output=True
    ).returncode
    != 0,
    reason="compiled kernel not built",
)
def test_backend_twins_agree():
    code = (
        "import os, math; os.environ['MMWRELAY_BACKEND']=os.environ.get('FORCE','pure');"
        "from mmwrelay.special import MeijerGSpec, meijer_g;"
        "spec = MeijerGSpec(m=1, n=2, p=2, q=1, a=(-4.0, -20.0), b=(0.0,));"
        "print(repr(meijer_g(spec, 0.25)))"
    )
    vals = {}
    for backend in ("pure", "compiled"):
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={**__import__("os").environ, "FORCE": backend},
        )
        assert out.returncode == 0, out.stderr
        vals[backend] = float(out.stdout.strip())
    assert vals["pure"] == pytest.approx(vals["compiled"], rel=1e-12)
