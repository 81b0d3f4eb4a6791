"""Per-hop SINR statistics under outdated CSI and co-channel interference.

Every distribution object evaluates in one of two modes:

* ``published``: the printed closed forms, which carry a (1-rho)^(N m) total
  mass deficit (their CDFs saturate at that ceiling, not at 1) and a signal
  scale of (1-rho)*gbar. This mode reproduces the published curves.
* ``renormalized``: the proper distribution implied by the bivariate SNR law
  and realized by the Monte Carlo sampler - a Gamma(N m, gbar/(N m)) signal
  marginal divided by interference-plus-one. Equivalent to evaluating the
  published forms at rho = 0.

The two coincide at rho = 0. Interference typo repairs (the aggregate-shape
exponent and the per-hop error-kernel argument) follow the internally
consistent reading; the verbatim prints contradict the F(0) = 0 boundary
and the quadrature of their own definitions.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from mmwrelay.special.bessel import log_bessel_i
from mmwrelay.special.gammafn import erf, lgamma, reg_lower_gamma
from mmwrelay.special.mellin import ContourConfig, MeijerGSpec, meijer_g_log

MODES = ("published", "renormalized")


class NoInterference(ValueError):
    """Raised where an interference-bearing form is evaluated with M_r = 0."""


@dataclass(frozen=True)
class HopParams:
    """Statistical parameters of one hop.

    antennas: MRC/MRT branch count N; m: signal Nakagami shape; the product
    N*m must be an integer for the finite-sum forms. interferers: M_r;
    m_r: interference shape; rho: Jakes correlation of the outdated CSI;
    snr: mean signal SNR (linear); interference_snr: mean aggregate
    interference SNR (linear).
    """

    antennas: int
    m: float
    rho: float
    snr: float
    interferers: int = 0
    m_r: float = 1.0
    interference_snr: float = 1.0

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError("antennas must be >= 1")
        if self.m <= 0 or self.m_r <= 0:
            raise ValueError("Nakagami shapes must be positive")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.snr <= 0:
            raise ValueError("snr must be positive (linear scale)")
        if self.interferers < 0:
            raise ValueError("interferers must be >= 0")
        if self.interferers > 0 and self.interference_snr <= 0:
            raise ValueError("interference_snr must be positive when interferers > 0")

    @property
    def nm(self):
        return self.antennas * self.m

    @property
    def nm_int(self):
        k = self.nm
        ki = int(round(k))
        if abs(k - ki) > 1e-9:
            raise ValueError(f"N*m = {k} is not an integer; finite-sum forms unavailable")
        return ki

    @property
    def mm(self):
        return self.interferers * self.m_r

    @property
    def has_interference(self):
        return self.interferers > 0

    def signal_rate(self, mode):
        """Exponential rate of the signal marginal: N m / (scale of the mode)."""
        if mode == "published":
            return self.nm / ((1.0 - self.rho) * self.snr)
        if mode == "renormalized":
            return self.nm / self.snr
        raise ValueError(f"unknown mode {mode!r}")

    def mass(self, mode):
        """Total probability mass of the mode's distribution."""
        return (1.0 - self.rho) ** self.nm if mode == "published" else 1.0

    @property
    def interference_rate(self):
        if not self.has_interference:
            raise NoInterference("hop has no interferers")
        return self.mm / self.interference_snr


@dataclass(frozen=True)
class SinrDistribution:
    """Evaluable effective-SINR distribution for one hop in a fixed mode."""

    params: HopParams
    mode: str = "published"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def cdf(self, x):
        return effective_sinr_cdf(self, x)

    def pdf(self, x):
        return effective_sinr_pdf(self, x)

    def moment(self, n):
        return sinr_moment(self, n)


# ---------------------------------------------------------------------------
# signal marginal (outdated SNR)


def outdated_snr_pdf(params, x):
    """Printed density of the outdated-CSI SNR (published normalization:
    integrates to (1-rho)^(N m), not 1)."""
    k = params.nm
    c = params.signal_rate("published")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    logf = (
        k * math.log(params.nm / params.snr)
        + (k - 1.0) * np.log(xp)
        - math.lgamma(k)
        - c * xp
    )
    out[pos] = np.exp(logf)
    if np.ndim(x) == 0:
        return float(out)
    return out


def outdated_snr_cdf(params, x, mode="published"):
    """CDF of the outdated-CSI SNR via the incomplete-gamma form."""
    k = params.nm
    c = params.signal_rate(mode)
    x = np.asarray(x, dtype=float)
    if (x < 0).any() if x.ndim else x < 0:
        raise ValueError("x must be non-negative")
    return params.mass(mode) * reg_lower_gamma(k, c * x)


def outdated_snr_cdf_series(params, x, mode="published"):
    """Finite-sum CDF (integer N m): mass * (1 - e^{-cx} sum (cx)^n / n!)."""
    k = params.nm_int
    c = params.signal_rate(mode)
    x = np.asarray(x, dtype=float)
    cx = c * x
    n = np.arange(k)
    lgf = np.array([math.lgamma(v + 1.0) for v in n])
    with np.errstate(divide="ignore", invalid="ignore"):
        logt = n * np.log(cx)[..., None] - lgf - cx[..., None]
        logt = np.where(np.isnan(logt), -np.inf, logt)
    total = np.exp(logt).sum(axis=-1)
    out = params.mass(mode) * (1.0 - np.where(cx > 0, total, 1.0))
    return float(out) if np.ndim(x) == 0 else out


def joint_outdated_updated_pdf(params, x, y):
    """Bivariate (Kibble) density of outdated and updated SNRs.

    Rejects rho in {0, 1}: the printed form degenerates at both ends.
    Evaluated in log space so large antenna counts stay finite.
    """
    if params.rho <= 0.0 or params.rho >= 1.0:
        raise ValueError("joint density requires 0 < rho < 1")
    k = params.nm
    rho = params.rho
    theta = params.snr / k
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if (np.minimum(x, y) <= 0).any() if x.ndim or y.ndim else min(x, y) <= 0:
        raise ValueError("x and y must be positive")
    bess_arg = 2.0 * np.sqrt(rho * x * y) / ((1.0 - rho) * theta)
    logf = (
        -(k + 1.0) * math.log(theta)
        + 0.5 * (k - 1.0) * (np.log(x * y) - math.log(rho))
        - math.log1p(-rho)
        - math.lgamma(k)
        - (x + y) / ((1.0 - rho) * theta)
        + log_bessel_i(k - 1.0, bess_arg)
    )
    out = np.exp(logf)
    return float(out) if np.ndim(x) == 0 and np.ndim(y) == 0 else out


def interference_snr_pdf(params, x):
    """Density of the aggregate interference SNR: Gamma(M_r m_r, gbar_r / (M_r m_r))."""
    if not params.has_interference:
        raise NoInterference("aggregate interference undefined for M_r = 0")
    mm = params.mm
    d = params.interference_rate
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = np.exp(mm * math.log(d) + (mm - 1.0) * np.log(xp) - math.lgamma(mm) - d * xp)
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# effective SINR


@lru_cache(maxsize=256)
def _cdf_term_table(k, mm):
    """(n, p) double-sum coefficients of the effective-SINR CDF bracket."""
    ns, ps, logc = [], [], []
    for n in range(k):
        for p in range(n + 1):
            ns.append(n)
            ps.append(p)
            logc.append(
                math.log(math.comb(n, p))
                - math.lgamma(n + 1.0)
                + math.lgamma(mm + p)
                - math.lgamma(mm)
            )
    return np.array(ns, dtype=float), np.array(ps, dtype=float), np.array(logc)


def _bracket_sum(x, k, c, d, mm):
    """S(x) with F = mass*(1 - S); S(0) = 1, S(inf) = 0. Vectorized over x."""
    ns, ps, logc = _cdf_term_table(k, mm)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    chunk = max(1, int(4e6 // max(len(ns), 1)))
    for i in range(0, len(x), chunk):
        xi = x[i : i + chunk, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logt = (
                logc
                + ns * np.log(c * xi)
                + mm * math.log(d)
                - (mm + ps) * np.log(d + c * xi)
                - c * xi
            )
            logt = np.where(np.isnan(logt), -np.inf, logt)
        out[i : i + chunk] = np.exp(logt).sum(axis=1)
    out[x == 0.0] = 1.0
    return out


@lru_cache(maxsize=256)
def _gamma_mixture_nodes(mm, d, level=7):
    """Tanh-sinh nodes against the interference Gamma(mm, 1/d) density."""
    from mmwrelay.special.quad import _nodes, _transform_halfline

    t, h = _nodes(level)
    y, w = _transform_halfline(t)
    ok = np.isfinite(y) & np.isfinite(w) & (y > 0)
    y, w = y[ok], w[ok]
    dens = np.exp(mm * math.log(d) + (mm - 1.0) * np.log(y) - math.lgamma(mm) - d * y)
    weights = h * w * dens
    keep = weights > 1e-320
    return y[keep], weights[keep]


def _cdf_quadrature(x_values, k, c, d, mm):
    """Exact mixture form F/mass = E_y[P(k, c x (1+y))]; no cancellation."""
    y, w = _gamma_mixture_nodes(mm, d)
    out = np.empty(len(x_values))
    chunk = max(1, int(2e6 // len(y)))
    for i in range(0, len(x_values), chunk):
        xi = x_values[i : i + chunk]
        grid = reg_lower_gamma(k, c * np.multiply.outer(xi, 1.0 + y))
        out[i : i + chunk] = grid @ w
    out[np.asarray(x_values) <= 0] = 0.0
    return out


def effective_sinr_cdf(dist, x, method="auto"):
    """CDF of the per-hop effective SINR gammahat / (gamma_r + 1).

    method: "series" (finite double sum), "quadrature" (gamma-mixture
    integral, exact and cancellation-free), or "auto" (series, with the deep
    lower tail recomputed by quadrature where 1 - S loses precision).
    """
    params, mode = dist.params, dist.mode
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if (x < 0).any():
        raise ValueError("x must be non-negative")
    if not params.has_interference:
        out = params.mass(mode) * reg_lower_gamma(params.nm, params.signal_rate(mode) * x)
        return float(out[0]) if scalar else out

    k = params.nm_int
    c = params.signal_rate(mode)
    d = params.interference_rate
    mm = params.mm
    mass = params.mass(mode)
    if method == "quadrature":
        out = mass * _cdf_quadrature(x, k, c, d, mm)
        return float(out[0]) if scalar else out
    s = _bracket_sum(x, k, c, d, mm)
    out = mass * (1.0 - s)
    if method == "auto":
        tiny = (s > 1.0 - 1e-9) & (x > 0)
        if tiny.any():
            out[tiny] = mass * _cdf_quadrature(x[tiny], k, c, d, mm)
    out = np.clip(out, 0.0, mass)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=256)
def _pdf_term_table(k, mm):
    ps = np.arange(k + 1, dtype=float)
    logc = np.array(
        [math.log(math.comb(k, p)) + math.lgamma(mm + p) - math.lgamma(mm) for p in range(k + 1)]
    )
    return ps, logc


def effective_sinr_pdf(dist, x):
    """Density of the effective SINR (the derivative of the CDF; carries the
    mode's total mass)."""
    params, mode = dist.params, dist.mode
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k_f = params.nm
    c = params.signal_rate(mode)
    mass = params.mass(mode)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    if not params.has_interference:
        logf = k_f * math.log(c) + (k_f - 1.0) * np.log(xp) - math.lgamma(k_f) - c * xp
        out[pos] = mass * np.exp(logf)
        return float(out[0]) if scalar else out

    k = params.nm_int
    d = params.interference_rate
    mm = params.mm
    ps, logc = _pdf_term_table(k, mm)
    acc = np.zeros_like(xp)
    for p, lc in zip(ps, logc):
        acc += np.exp(lc - (mm + p) * np.log(d + c * xp))
    logpref = (
        math.log(mass)
        + k * math.log(c)
        + mm * math.log(d)
        + (k - 1.0) * np.log(xp)
        - math.lgamma(k)
        - c * xp
    )
    out[pos] = np.exp(logpref) * acc
    return float(out[0]) if scalar else out


def sinr_moment(dist, n, contour=None):
    """n-th moment of the effective SINR (n >= 0 real).

    Closed form: a Meijer-G sum for interference-bearing hops, a gamma ratio
    otherwise. In published mode the n = 0 "moment" equals the mass ceiling
    (1-rho)^(N m), quantifying the normalization gap.
    """
    if n < 0:
        raise ValueError("moment order must be non-negative")
    params, mode = dist.params, dist.mode
    mass = params.mass(mode)
    c = params.signal_rate(mode)
    if not params.has_interference:
        k = params.nm
        return mass * math.exp(math.lgamma(k + n) - math.lgamma(k) - n * math.log(c))
    k = params.nm_int
    d = params.interference_rate
    mm = params.mm
    z = 1.0 / d
    contour = contour or ContourConfig()
    total = 0.0
    logpref = math.log(mass) - n * math.log(c) - math.lgamma(k) - math.lgamma(mm)
    for p in range(k + 1):
        spec = MeijerGSpec(m=1, n=2, p=2, q=1, a=(1.0 - n - k, 1.0 - mm - p), b=(0.0,))
        sign, logg, _ = meijer_g_log(spec, z, contour)
        term = sign * math.exp(
            logpref + math.log(math.comb(k, p)) + p * math.log(z) + logg
        )
        total += term
    return total


def high_snr_cdf_asymptote(params, x):
    """Leading small-outage term of the effective-SINR CDF.

    Mode-independent: the mass ceiling and the (1-rho) scale stretch cancel
    exactly, which is why outage curves for different rho merge at high SNR.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = params.nm
    out = np.zeros_like(x)
    pos = x > 0
    logbase = k * (np.log(x[pos]) + math.log(k / params.snr)) - math.lgamma(k + 1.0)
    if params.has_interference:
        mm = params.mm
        z = 1.0 / params.interference_rate
        terms = [
            math.log(math.comb(params.nm_int, p)) + math.lgamma(mm + p) - math.lgamma(mm) + p * math.log(z)
            for p in range(params.nm_int + 1)
        ]
        peak = max(terms)
        logbase = logbase + peak + math.log(sum(math.exp(t - peak) for t in terms))
    out[pos] = np.exp(logbase)
    return float(out[0]) if scalar else out


def diversity_gain(params):
    """High-SNR log-log slope of the per-hop outage: N*m."""
    return params.nm


@dataclass(frozen=True)
class GaussianApprox:
    """Central-limit approximation of the effective SINR for large N m."""

    mu: float
    sigma2: float

    @classmethod
    def from_params(cls, params):
        mu = (1.0 - params.rho) * params.snr
        sigma2 = mu * mu / params.nm
        return cls(mu=mu, sigma2=sigma2)


def gaussian_approx_cdf(params, x):
    """Gaussian CDF with the large-array mean and variance."""
    approx = GaussianApprox.from_params(params)
    arg = (np.asarray(x, dtype=float) - approx.mu) / math.sqrt(2.0 * approx.sigma2)
    out = 0.5 * (1.0 + erf(arg))
    return float(out) if np.ndim(x) == 0 else out
