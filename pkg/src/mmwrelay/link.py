"""Deterministic propagation layer.

Doppler/Jakes correlation, free-space path gain with oxygen and rain
attenuation, thermal noise, LOS blockage probabilities, and the built-in
parameter tables for the supported mmWave carriers.
"""

import math
from dataclasses import dataclass, replace

from mmwrelay.special.bessel import bessel_j0

SPEED_OF_LIGHT = 3.0e8  # m/s, fixed by the system parameter table


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    if x <= 0:
        raise ValueError(f"cannot convert non-positive value {x} to dB")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class CarrierProfile:
    """Carrier frequency plus attenuation coefficients.

    Attenuations are totals over ``reference_distance`` meters (the
    measurement convention of the propagation table: rain at 5 mm/h, oxygen
    evaluated at 200 m) and are converted to dB/m inside path_gain_db.
    """

    f_c: float  # Hz
    alpha_rain_los: float  # dB per reference distance
    alpha_rain_nlos: float
    alpha_ox: float
    reference_distance: float = 200.0

    def __post_init__(self):
        if self.f_c <= 0 or self.reference_distance <= 0:
            raise ValueError("carrier frequency and reference distance must be positive")
        if min(self.alpha_rain_los, self.alpha_rain_nlos, self.alpha_ox) < 0:
            raise ValueError("attenuations must be non-negative")


# measured mmWave propagation parameters per band (dB over 200 m)
CARRIER_TABLE = {
    28: CarrierProfile(28e9, 0.18, 0.9, 0.04),
    38: CarrierProfile(38e9, 0.26, 1.4, 0.03),
    60: CarrierProfile(60e9, 0.44, 2.0, 3.2),
    73: CarrierProfile(73e9, 0.6, 2.4, 0.09),
}


def carrier_profile(f_c_ghz):
    """Built-in table row for 28/38/60/73 GHz."""
    key = int(round(f_c_ghz))
    if key not in CARRIER_TABLE or abs(f_c_ghz - key) > 1e-9:
        raise KeyError(f"no built-in carrier profile at {f_c_ghz} GHz; supply overrides")
    return CARRIER_TABLE[key]


@dataclass(frozen=True)
class HopGeometry:
    """Physical layout and radio parameters of one hop (defaults = system table)."""

    distance: float = 50.0  # m
    speed: float = 10.0  # m/s
    angle: float = math.pi / 4  # rad between velocity and hop direction
    feedback_delay: float = 2e-3  # s
    tx_gain_db: float = 44.0
    rx_gain_db: float = 44.0
    bandwidth: float = 700e6  # Hz
    noise_density_dbm: float = -142.0  # dBm/Hz
    noise_figure_db: float = 0.0

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError("distance must be positive")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.feedback_delay < 0:
            raise ValueError("feedback delay must be non-negative")

    def with_(self, **kw):
        return replace(self, **kw)


@dataclass(frozen=True)
class BlockageModel:
    """Distance-dependent LOS probability model."""

    kind: str = "exponential"  # exponential | threepart
    delta: float = 200.0  # m, exponential decay constant (suburban default)

    def __post_init__(self):
        if self.kind not in ("exponential", "threepart"):
            raise ValueError(f"unknown blockage kind {self.kind!r}")
        if self.kind == "exponential" and self.delta <= 0:
            raise ValueError("delta must be positive for the exponential model")


@dataclass(frozen=True)
class NakagamiProfile:
    """Fading shapes for signal and interference in LOS/NLOS states."""

    m_los: float = 4.0
    m_nlos: float = 2.0
    m_r_los: float = 3.0
    m_r_nlos: float = 1.0

    def __post_init__(self):
        if min(self.m_los, self.m_nlos, self.m_r_los, self.m_r_nlos) <= 0:
            raise ValueError("Nakagami shapes must be positive")

    @classmethod
    def severe_scattering(cls):
        """Rayleigh / worst-Rayleigh alternates for heavy blockage."""
        return cls(m_los=1.0, m_nlos=0.5, m_r_los=3.0, m_r_nlos=1.0)


def doppler_frequency(geom, f_c):
    """f_d = f_c * v * cos(angle) / c."""
    return f_c * geom.speed * math.cos(geom.angle) / SPEED_OF_LIGHT


def jakes_correlation(geom, f_c):
    """Squared zero-order Bessel autocorrelation of the outdated CSI."""
    f_d = doppler_frequency(geom, f_c)
    return bessel_j0(2.0 * math.pi * f_d * geom.feedback_delay) ** 2


def coherence_time(f_d, convention="half"):
    """Coherence time from the Doppler frequency.

    Both 1/(2 f_d) ("half") and 1/f_d ("full") are exposed: the two quoted
    reference values (757.61 us at 28 GHz/10 m/s; 193.73 us at 73 GHz/30 m/s)
    imply different conventions, so neither is endorsed.
    """
    if f_d <= 0:
        raise ValueError("coherence time undefined for non-positive Doppler frequency")
    if convention == "half":
        return 1.0 / (2.0 * f_d)
    if convention == "full":
        return 1.0 / f_d
    raise ValueError(f"unknown convention {convention!r}")


def path_gain_db(geom, profile, los=True):
    """Average power gain of the hop in dB: antenna gains minus free-space
    loss minus oxygen and rain attenuation over the hop length."""
    fspl = 20.0 * math.log10(4.0 * math.pi * geom.distance * profile.f_c / SPEED_OF_LIGHT)
    rain = profile.alpha_rain_los if los else profile.alpha_rain_nlos
    atten_per_m = (profile.alpha_ox + rain) / profile.reference_distance
    return geom.tx_gain_db + geom.rx_gain_db - fspl - atten_per_m * geom.distance


def noise_power_dbm(geom):
    """Thermal noise power: 10 log10(B) + N0 + Nf, in dBm."""
    return 10.0 * math.log10(geom.bandwidth) + geom.noise_density_dbm + geom.noise_figure_db


def los_probability(model, d):
    """Probability the link of length d is line-of-sight."""
    if d < 0:
        raise ValueError("distance must be non-negative")
    if model.kind == "exponential":
        return math.exp(-d / model.delta)
    if d == 0:
        return 1.0
    return min(18.0 / d, 1.0) * (1.0 - math.exp(-d / 63.0)) + math.exp(-d / 63.0)


def average_snr(power_dbm, geom, profile, los=True):
    """Linear mean SNR from transmit power through the link budget."""
    snr_db = power_dbm + path_gain_db(geom, profile, los) - noise_power_dbm(geom)
    return db_to_linear(snr_db)
