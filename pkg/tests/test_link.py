"""Propagation layer: Doppler, Jakes, path gain, noise, blockage."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import j0_series

from mmwrelay import link
from mmwrelay.link import (
    BlockageModel,
    CarrierProfile,
    HopGeometry,
    NakagamiProfile,
    carrier_profile,
    coherence_time,
    db_to_linear,
    doppler_frequency,
    jakes_correlation,
    linear_to_db,
    los_probability,
    noise_power_dbm,
    path_gain_db,
)


class TestDoppler:
    def test_28ghz_reference(self):
        geom = HopGeometry(speed=10.0, angle=math.pi / 4)
        assert doppler_frequency(geom, 28e9) == pytest.approx(659.97, abs=0.01)

    def test_zero_speed(self):
        geom = HopGeometry(speed=0.0, angle=1.234)
        assert doppler_frequency(geom, 73e9) == 0.0

    def test_73ghz_reference(self):
        geom = HopGeometry(speed=30.0, angle=math.pi / 4)
        assert doppler_frequency(geom, 73e9) == pytest.approx(5161.9, abs=0.1)


class TestJakes:
    def test_zero_delay(self):
        geom = HopGeometry(speed=10.0, feedback_delay=0.0)
        assert jakes_correlation(geom, 28e9) == 1.0

    def test_against_bessel_oracle(self):
        # the published operating point: 28 GHz, 10 m/s, pi/4, 2 ms delay
        geom = HopGeometry(speed=10.0, angle=math.pi / 4, feedback_delay=2e-3)
        arg = 2.0 * math.pi * doppler_frequency(geom, 28e9) * 2e-3
        assert arg == pytest.approx(8.2938, abs=5e-4)
        assert jakes_correlation(geom, 28e9) == pytest.approx(j0_series(arg) ** 2, abs=1e-10)

    def test_first_bessel_zero(self):
        z0 = 2.404825557695773
        f_c, speed, angle = 28e9, 10.0, math.pi / 4
        f_d = f_c * speed * math.cos(angle) / link.SPEED_OF_LIGHT
        delay = z0 / (2.0 * math.pi * f_d)
        geom = HopGeometry(speed=speed, angle=angle, feedback_delay=delay)
        assert jakes_correlation(geom, f_c) == pytest.approx(0.0, abs=1e-18)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=60.0),
        st.floats(min_value=0.0, max_value=2 * math.pi),
        st.floats(min_value=0.0, max_value=0.1),
    )
    def test_unit_interval(self, speed, angle, delay):
        geom = HopGeometry(speed=speed, angle=angle, feedback_delay=delay)
        rho = jakes_correlation(geom, 60e9)
        assert 0.0 <= rho <= 1.0


class TestCoherenceTime:
    def test_half_convention_28ghz(self):
        geom = HopGeometry(speed=10.0, angle=math.pi / 4)
        f_d = doppler_frequency(geom, 28e9)
        assert coherence_time(f_d, "half") * 1e6 == pytest.approx(757.61, abs=0.01)

    def test_full_convention_73ghz(self):
        geom = HopGeometry(speed=30.0, angle=math.pi / 4)
        f_d = doppler_frequency(geom, 73e9)
        assert coherence_time(f_d, "full") * 1e6 == pytest.approx(193.73, abs=0.01)

    def test_trivial(self):
        assert coherence_time(1.0, "half") == 0.5

    def test_zero_doppler_rejected(self):
        with pytest.raises(ValueError):
            coherence_time(0.0)


class TestPathGain:
    def test_60ghz_reference(self):
        geom = HopGeometry(distance=50.0)
        prof = carrier_profile(60)
        # 44 + 44 - 101.98 - (3.2 + 0.44)/200 * 50
        assert path_gain_db(geom, prof, los=True) == pytest.approx(-14.89, abs=0.01)

    def test_gain_cancellation(self):
        # distance chosen so the free-space term equals the antenna gains
        prof = CarrierProfile(60e9, 0.0, 0.0, 0.0)
        L = link.SPEED_OF_LIGHT * 10 ** (88.0 / 20.0) / (4.0 * math.pi * 60e9)
        geom = HopGeometry(distance=L)
        assert path_gain_db(geom, prof, los=True) == pytest.approx(0.0, abs=1e-9)

    def test_nlos_rain_differential(self):
        geom = HopGeometry(distance=50.0)
        prof = carrier_profile(60)
        los = path_gain_db(geom, prof, los=True)
        nlos = path_gain_db(geom, prof, los=False)
        assert los - nlos == pytest.approx((2.0 - 0.44) / 200.0 * 50.0, rel=1e-12)

    def test_monotone_in_distance_and_frequency(self):
        prof = carrier_profile(28)
        gains = [path_gain_db(HopGeometry(distance=d), prof) for d in np.linspace(5, 500, 40)]
        assert all(a > b for a, b in zip(gains, gains[1:]))
        geom = HopGeometry(distance=50.0)
        by_freq = [
            path_gain_db(geom, CarrierProfile(f, 0.1, 0.5, 0.1)) for f in (28e9, 38e9, 60e9, 73e9)
        ]
        assert all(a > b for a, b in zip(by_freq, by_freq[1:]))


class TestNoise:
    def test_reference_value(self):
        assert noise_power_dbm(HopGeometry()) == pytest.approx(-53.55, abs=0.005)

    def test_unit_bandwidth(self):
        geom = HopGeometry(bandwidth=1.0, noise_density_dbm=0.0, noise_figure_db=0.0)
        assert noise_power_dbm(geom) == 0.0

    def test_noise_figure_linearity(self):
        base = noise_power_dbm(HopGeometry())
        assert noise_power_dbm(HopGeometry(noise_figure_db=3.0)) == pytest.approx(base + 3.0)


class TestBlockage:
    def test_exponential_at_zero(self):
        assert los_probability(BlockageModel("exponential", 120.0), 0.0) == 1.0

    def test_threepart_saturation(self):
        model = BlockageModel("threepart")
        for d in (0.0, 5.0, 18.0):
            assert los_probability(model, d) == 1.0

    def test_threepart_reference(self):
        # min(18/63, 1)(1 - e^-1) + e^-1
        assert los_probability(BlockageModel("threepart"), 63.0) == pytest.approx(0.5485, abs=5e-4)

    def test_non_increasing(self):
        for model in (BlockageModel("exponential", 63.0), BlockageModel("threepart")):
            grid = np.linspace(0.0, 500.0, 400)
            probs = [los_probability(model, d) for d in grid]
            assert all(a >= b - 1e-15 for a, b in zip(probs, probs[1:]))
            assert all(0.0 <= p <= 1.0 for p in probs)


class TestTables:
    def test_carrier_table_roundtrip(self):
        rows = {
            28: (0.18, 0.9, 0.04),
            38: (0.26, 1.4, 0.03),
            60: (0.44, 2.0, 3.2),
            73: (0.6, 2.4, 0.09),
        }
        for ghz, (rl, rn, ox) in rows.items():
            prof = carrier_profile(ghz)
            assert (prof.alpha_rain_los, prof.alpha_rain_nlos, prof.alpha_ox) == (rl, rn, ox)
            assert prof.f_c == ghz * 1e9
            assert prof.reference_distance == 200.0

    def test_unknown_carrier(self):
        with pytest.raises(KeyError):
            carrier_profile(39.5)

    def test_nakagami_defaults_and_severe(self):
        nak = NakagamiProfile()
        assert (nak.m_los, nak.m_nlos, nak.m_r_los, nak.m_r_nlos) == (4.0, 2.0, 3.0, 1.0)
        severe = NakagamiProfile.severe_scattering()
        assert (severe.m_los, severe.m_nlos) == (1.0, 0.5)


def test_db_roundtrip():
    for v in (1e-6, 0.5, 1.0, 42.0, 1e9):
        assert db_to_linear(linear_to_db(v)) == pytest.approx(v, rel=1e-12)
