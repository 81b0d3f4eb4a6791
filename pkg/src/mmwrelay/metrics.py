"""Per-hop and end-to-end reliability metrics.

Closed forms (Meijer-G / bivariate Fox-H) and independent quadrature routes
are both implemented for every metric that has a printed expression; the
quadrature side is the arbiter whenever contour evaluation degrades or the
high-SNR bracket cancels. Blockage enters by mixing LOS/NLOS states: CDFs
mix directly, expectations (error, capacity) mix linearly, and end-to-end
error enumerates the four state pairs.

Printed-formula repairs applied here (each verified against quadrature of
the defining integrals): the per-hop error kernel argument is divided, not
multiplied, by (beta/2 + rate); interference power ratios carry the full
aggregate shape M_r*m_r; the end-to-end error's quadruple sum enters with a
minus sign and its lambda excludes the interference scale factors.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from mmwrelay import mc
from mmwrelay.mc import HopChannel
from mmwrelay.sinr import (
    HopParams,
    SinrDistribution,
    effective_sinr_cdf,
    effective_sinr_pdf,
    sinr_moment,
)
from mmwrelay.special.foxh import FoxHBivariateSpec, fox_h_bivariate_log
from mmwrelay.special.gammafn import gaussian_q
from mmwrelay.special.mellin import ContourConvergenceError, MeijerGSpec, meijer_g_log
from mmwrelay.special.quad import bisect_increasing, integrate_value

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ModulationScheme:
    """alpha * Q(sqrt(beta * sinr)) symbol-error family."""

    name: str
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")

    @classmethod
    def bpsk(cls):
        return cls("bpsk", 1.0, 2.0)

    @classmethod
    def qpsk(cls):
        return cls("qpsk", 2.0, 1.0)

    @classmethod
    def mqam(cls, order):
        if order < 4 or int(math.isqrt(order)) ** 2 != order:
            raise ValueError("square M-QAM requires a perfect-square order >= 4")
        return cls(f"{order}qam", 4.0 * (1.0 - 1.0 / math.sqrt(order)), 3.0 / (order - 1.0))

    @classmethod
    def parse(cls, name):
        key = name.strip().lower().replace("-", "")
        if key == "bpsk":
            return cls.bpsk()
        if key == "qpsk":
            return cls.qpsk()
        if key.endswith("qam"):
            return cls.mqam(int(key[:-3]))
        raise ValueError(f"unknown modulation {name!r}")


@dataclass(frozen=True)
class RelaySystem:
    """Both hops (possibly blockage-mixed), shared bandwidth, and the mode."""

    hop1: HopChannel
    hop2: HopChannel
    bandwidth: float = 700e6
    mode: str = "published"

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")

    def hop(self, index):
        if index == 1:
            return self.hop1
        if index == 2:
            return self.hop2
        raise ValueError("hop index must be 1 or 2")


@dataclass(frozen=True)
class OutageCapacityQuery:
    """Outage fraction for the epsilon-capacity metric."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class MetricValue:
    """A metric with its evaluation route; degraded marks a fallback taken
    after the primary route failed (value comes from the fallback)."""

    value: float
    route: str
    degraded: bool = False

    def __float__(self):
        return self.value


class QuantileInversionError(RuntimeError):
    """CDF never reaches the requested outage level (published-mode ceiling)."""

    def __init__(self, message, ceiling):
        super().__init__(message)
        self.ceiling = ceiling


# ---------------------------------------------------------------------------
# per-hop symbol error


def _ser_closed_pure(dist, mod):
    """Per-hop symbol error closed form (finite Meijer-G sum)."""
    params, mode = dist.params, dist.mode
    k = params.nm_int
    c = params.signal_rate(mode)
    mass = params.mass(mode)
    alpha, beta = mod.alpha, mod.beta
    b = 0.5 * beta + c
    head = math.exp(math.lgamma(0.5)) * math.sqrt(2.0 / beta)
    acc = 0.0
    if params.has_interference:
        d = params.interference_rate
        mm = params.mm
        z = (c / d) / b
        for n in range(k):
            for p in range(n + 1):
                spec = MeijerGSpec(m=1, n=2, p=2, q=1, a=(0.5 - n, 1.0 - mm - p), b=(0.0,))
                sign, logg, _ = meijer_g_log(spec, z)
                acc += sign * math.exp(
                    logg
                    + math.log(math.comb(n, p))
                    - math.lgamma(n + 1.0)
                    - p * math.log(d)
                    - math.lgamma(mm)
                    + n * math.log(c)
                    - (n + 0.5) * math.log(b)
                )
    else:
        for n in range(k):
            acc += math.exp(
                n * math.log(c)
                - math.lgamma(n + 1.0)
                + math.lgamma(n + 0.5)
                - (n + 0.5) * math.log(b)
            )
    bracket = head - acc
    value = alpha * math.sqrt(beta) * mass / (2.0 * math.sqrt(2.0 * math.pi)) * bracket
    cancelled = bracket < 1e-8 * head
    return value, cancelled


def _ser_quadrature_pure(dist, mod):
    """alpha * E[Q(sqrt(beta * sinr))] by direct quadrature (no cancellation)."""
    alpha, beta = mod.alpha, mod.beta

    def integrand(x):
        return alpha * gaussian_q(np.sqrt(beta * x)) * effective_sinr_pdf(dist, x)

    return integrate_value(integrand, 0.0, np.inf, rel_tol=1e-9)


def hop_symbol_error_info(channel, mod, mode="published", method="auto"):
    """Symbol error of one hop (LOS/NLOS states mix linearly)."""
    if isinstance(channel, SinrDistribution):
        channel, mode = HopChannel(los=channel.params), channel.mode
    if isinstance(channel, HopParams):
        channel = HopChannel(los=channel)
    total = 0.0
    route = "closed"
    degraded = False
    for w, state in channel.states():
        dist = SinrDistribution(state, mode)
        if method == "quadrature":
            total += w * _ser_quadrature_pure(dist, mod)
            route = "quadrature"
            continue
        try:
            value, cancelled = _ser_closed_pure(dist, mod)
        except ContourConvergenceError:
            value, cancelled = _ser_quadrature_pure(dist, mod), False
            route, degraded = "quadrature", True
        if method == "auto" and cancelled:
            value = _ser_quadrature_pure(dist, mod)
            route = "quadrature"
        total += w * value
    return MetricValue(total, route, degraded)


def hop_symbol_error(channel, mod, mode="published", method="auto"):
    return hop_symbol_error_info(channel, mod, mode, method).value


def hop_error_asymptote(params, mod):
    """High-SNR symbol-error asymptote of one hop (mode- and rho-free)."""
    k = params.nm
    logv = (
        math.log(mod.alpha)
        + math.lgamma(k + 0.5)
        - math.log(2.0)
        - 0.5 * math.log(math.pi)
        - math.lgamma(k + 1.0)
        + k * (math.log(2.0 * k) - math.log(mod.beta * params.snr))
    )
    return math.exp(logv + _interference_asym_logsum(params))


def _interference_asym_logsum(params):
    if not params.has_interference:
        return 0.0
    mm = params.mm
    z = 1.0 / params.interference_rate
    terms = [
        math.log(math.comb(params.nm_int, p)) + math.lgamma(mm + p) - math.lgamma(mm) + p * math.log(z)
        for p in range(params.nm_int + 1)
    ]
    peak = max(terms)
    return peak + math.log(sum(math.exp(t - peak) for t in terms))


def coding_gain(params, mod):
    """Horizontal shift G_c of the asymptote P_e ~ (G_c * snr)^(-N m)."""
    k = params.nm
    log_inner = (
        math.log(mod.alpha)
        + math.lgamma(k + 0.5)
        - math.log(2.0)
        - 0.5 * math.log(math.pi)
        - math.lgamma(k + 1.0)
        + _interference_asym_logsum(params)
    )
    return 0.5 * mod.beta / k * math.exp(-log_inner / k)


# ---------------------------------------------------------------------------
# per-hop capacity


def _capacity_closed_pure(dist, bandwidth):
    params, mode = dist.params, dist.mode
    c = params.signal_rate(mode)
    mass = params.mass(mode)
    k = params.nm if not params.has_interference else params.nm_int
    if not params.has_interference:
        # E[log(1+x)] for a Gamma signal: univariate Meijer-G reduction
        spec = MeijerGSpec(m=1, n=3, p=3, q=2, a=(1.0 - k, 1.0, 1.0), b=(1.0, 0.0))
        sign, logg, _ = meijer_g_log(spec, 1.0 / c)
        return bandwidth * mass / LOG2 * sign * math.exp(logg - math.lgamma(k))
    d = params.interference_rate
    mm = params.mm
    z1 = 1.0 / d
    z2 = 1.0 / c
    total = 0.0
    for p in range(k + 1):
        spec = FoxHBivariateSpec(
            outer_orders=(0, 1),
            outer_a=((1.0 - k, 1.0, 1.0),),
            group1_orders=(1, 1),
            group1_a=((1.0 - mm - p, 1.0),),
            group1_b=((0.0, 1.0),),
            group2_orders=(1, 2),
            group2_a=((1.0, 1.0), (1.0, 1.0)),
            group2_b=((1.0, 1.0), (0.0, 1.0)),
        )
        sign, logh, _ = fox_h_bivariate_log(spec, z1, z2)
        total += sign * math.exp(
            logh + math.log(math.comb(k, p)) + p * math.log(z1) - math.lgamma(k) - math.lgamma(mm)
        )
    return bandwidth * mass / LOG2 * total


def _capacity_quadrature_pure(dist, bandwidth):
    def integrand(x):
        return np.log1p(x) * effective_sinr_pdf(dist, x)

    return bandwidth / LOG2 * integrate_value(integrand, 0.0, np.inf, rel_tol=1e-9)


def hop_capacity_info(channel, bandwidth, mode="published", method="auto"):
    """Mean rate of one hop in bit/s (Gaussian signaling).

    method "closed" uses the bivariate Fox-H sum (N m + 1 double contours);
    "quadrature" integrates the density; "auto" picks the closed route only
    where it is cheap (the no-interference univariate reduction) since both
    routes agree to the contour tolerance anyway.
    """
    if isinstance(channel, SinrDistribution):
        channel, mode = HopChannel(los=channel.params), channel.mode
    if isinstance(channel, HopParams):
        channel = HopChannel(los=channel)
    total = 0.0
    route = "closed"
    degraded = False
    for w, state in channel.states():
        dist = SinrDistribution(state, mode)
        use_closed = method == "closed" or (method == "auto" and not state.has_interference)
        if use_closed:
            try:
                total += w * _capacity_closed_pure(dist, bandwidth)
                continue
            except ContourConvergenceError:
                degraded = True
        total += w * _capacity_quadrature_pure(dist, bandwidth)
        route = "quadrature"
    return MetricValue(total, route, degraded)


def hop_capacity(channel, bandwidth, mode="published", method="auto"):
    return hop_capacity_info(channel, bandwidth, mode, method).value


def _moment_mixed(channel, mode, n):
    return sum(w * sinr_moment(SinrDistribution(s, mode), n) for w, s in channel.states())


def capacity_low_power(channel, bandwidth, mode="published"):
    """First-moment linearization B log2(e) E[sinr]; tight only at low power."""
    channel = _as_channel(channel)
    return bandwidth / LOG2 * _moment_mixed(channel, mode, 1.0)


def capacity_high_power(channel, bandwidth, mode="published"):
    """High-power expansion B log2(e) E[log sinr] (numerical integration;
    no closed form exists for the log-moment)."""
    channel = _as_channel(channel)
    total = 0.0
    for w, state in channel.states():
        dist = SinrDistribution(state, mode)

        def integrand(x):
            return np.log(x) * effective_sinr_pdf(dist, x)

        total += w * integrate_value(integrand, 0.0, np.inf, rel_tol=1e-9)
    return bandwidth / LOG2 * total


def capacity_jensen_bound(channel, bandwidth, mode="published"):
    """B log2(1 + E[sinr]); an upper bound in both modes."""
    channel = _as_channel(channel)
    return bandwidth * math.log1p(_moment_mixed(channel, mode, 1.0)) / LOG2


def _as_channel(obj):
    if isinstance(obj, SinrDistribution):
        return HopChannel(los=obj.params)
    if isinstance(obj, HopParams):
        return HopChannel(los=obj)
    return obj


# ---------------------------------------------------------------------------
# blockage mixing and end-to-end combinations


def mixed_los_cdf(system, hop, x, method="auto"):
    """Blockage-averaged CDF of one hop: P_los F_los + (1 - P_los) F_nlos."""
    channel = system.hop(hop)
    return hop_cdf(channel, x, system.mode, method)


def hop_cdf(channel, x, mode="published", method="auto"):
    channel = _as_channel(channel)
    total = 0.0
    for w, state in channel.states():
        total = total + w * effective_sinr_cdf(SinrDistribution(state, mode), x, method=method)
    return total


def hop_pdf(channel, x, mode="published"):
    channel = _as_channel(channel)
    total = 0.0
    for w, state in channel.states():
        total = total + w * effective_sinr_pdf(SinrDistribution(state, mode), x)
    return total


def e2e_outage(system, x, method="auto"):
    """P[min(hop SINRs) < x] = F1 + F2 - F1 F2 over the mixed CDFs."""
    f1 = hop_cdf(system.hop1, x, system.mode, method)
    f2 = hop_cdf(system.hop2, x, system.mode, method)
    return f1 + f2 - f1 * f2


def e2e_cdf_gaussian(system, x):
    """End-to-end CDF with the large-array Gaussian approximation per hop."""
    from mmwrelay.sinr import gaussian_approx_cdf

    def mix(channel):
        return sum(w * gaussian_approx_cdf(s, x) for w, s in channel.states())

    f1, f2 = mix(system.hop1), mix(system.hop2)
    return f1 + f2 - f1 * f2


def e2e_capacity(system, method="auto"):
    """DF bottleneck: min of the two hop capacities."""
    c1 = hop_capacity(system.hop1, system.bandwidth, system.mode, method)
    c2 = hop_capacity(system.hop2, system.bandwidth, system.mode, method)
    return min(c1, c2)


# ---------------------------------------------------------------------------
# end-to-end symbol error


@lru_cache(maxsize=4096)
def _e2e_h_log(n12, mm1p, mm2p, nu1, nu2):
    spec = FoxHBivariateSpec(
        outer_orders=(0, 1),
        outer_a=((0.5 - n12, 1.0, 1.0),),
        group1_orders=(1, 1),
        group1_a=((1.0 - mm1p, 1.0),),
        group1_b=((0.0, 1.0),),
        group2_orders=(1, 1),
        group2_a=((1.0 - mm2p, 1.0),),
        group2_b=((0.0, 1.0),),
    )
    return fox_h_bivariate_log(spec, nu1, nu2)


def _e2e_ser_closed(state1, state2, mod, mode, variant="corrected"):
    """End-to-end symbol error for one (state1, state2) pair, closed form.

    variant "corrected" follows the appendix derivation (minus sign on the
    coupled sum; lambda = beta/2 + rate1 + rate2); "printed" evaluates the
    published reading (plus sign; lambda with interference scale factors)
    for deviation logging.
    """
    alpha, beta = mod.alpha, mod.beta
    d1 = SinrDistribution(state1, mode)
    d2 = SinrDistribution(state2, mode)
    p1, _ = _ser_closed_pure(d1, mod)
    p2, _ = _ser_closed_pure(d2, mod)
    m1 = state1.mass(mode)
    m2 = state2.mass(mode)
    c1 = state1.signal_rate(mode)
    c2 = state2.signal_rate(mode)
    k1, k2 = state1.nm_int, state2.nm_int

    both_interf = state1.has_interference and state2.has_interference
    if variant == "printed" and not both_interf:
        return math.nan

    if variant == "printed":
        lam = 0.5 * beta + c1 / state1.interference_rate + c2 / state2.interference_rate
    else:
        lam = 0.5 * beta + c1 + c2
    sign_cross = 1.0 if variant == "printed" else -1.0

    def hop_terms(state, c):
        """(n, p, log-coef, mm+p or None) expansion of the hop's tail factor."""
        out = []
        k = state.nm_int
        if state.has_interference:
            d = state.interference_rate
            mm = state.mm
            for n in range(k):
                for p in range(n + 1):
                    lc = (
                        math.log(math.comb(n, p))
                        - math.lgamma(n + 1.0)
                        + n * math.log(c)
                        - p * math.log(d)
                        - math.lgamma(mm)
                    )
                    out.append((n, p, lc, mm + p))
        else:
            for n in range(k):
                out.append((n, 0, n * math.log(c) - math.lgamma(n + 1.0), None))
        return out

    terms1 = hop_terms(state1, c1)
    terms2 = hop_terms(state2, c2)
    nu1 = (c1 / state1.interference_rate) / lam if state1.has_interference else None
    nu2 = (c2 / state2.interference_rate) / lam if state2.has_interference else None

    cross = 0.0
    for n1, pp1, lc1, mm1p in terms1:
        for n2, pp2, lc2, mm2p in terms2:
            logw = lc1 + lc2 - (n1 + n2 + 0.5) * math.log(lam)
            if mm1p is not None and mm2p is not None:
                hsign, logh, _ = _e2e_h_log(n1 + n2, mm1p, mm2p, nu1, nu2)
                cross += hsign * math.exp(logw + logh)
            elif mm1p is not None:
                # single interference-bearing hop: univariate kernel
                spec = MeijerGSpec(m=1, n=2, p=2, q=1, a=(0.5 - n1 - n2, 1.0 - mm1p), b=(0.0,))
                gsign, logg, _ = meijer_g_log(spec, (c1 / state1.interference_rate) / lam)
                cross += gsign * math.exp(logw + logg)
            elif mm2p is not None:
                spec = MeijerGSpec(m=1, n=2, p=2, q=1, a=(0.5 - n1 - n2, 1.0 - mm2p), b=(0.0,))
                gsign, logg, _ = meijer_g_log(spec, (c2 / state2.interference_rate) / lam)
                cross += gsign * math.exp(logw + logg)
            else:
                cross += math.exp(logw + math.lgamma(n1 + n2 + 0.5))
    cross *= m1 * m2 * alpha * math.sqrt(beta) / (2.0 * math.sqrt(2.0 * math.pi))
    return (
        (1.0 - m2) * p1
        + (1.0 - m1) * p2
        + m1 * m2 * 0.5 * alpha
        + sign_cross * cross
    )


def _e2e_ser_quadrature(system, mod):
    """alpha * E[Q(sqrt(beta * min))] via the min-density
    f1 (1 - F2) + f2 (1 - F1); stable in both modes."""
    alpha, beta = mod.alpha, mod.beta
    mode = system.mode

    def integrand(x):
        f1 = hop_pdf(system.hop1, x, mode)
        f2 = hop_pdf(system.hop2, x, mode)
        F1 = hop_cdf(system.hop1, x, mode, method="series")
        F2 = hop_cdf(system.hop2, x, mode, method="series")
        dens = f1 * (1.0 - F2) + f2 * (1.0 - F1)
        return alpha * gaussian_q(np.sqrt(beta * x)) * dens

    return integrate_value(integrand, 0.0, np.inf, rel_tol=1e-9)


def e2e_symbol_error_info(system, mod, method="auto", variant="corrected"):
    """Overall relay symbol error.

    Closed route enumerates the LOS/NLOS state pairs of the two hops and sums
    the per-pair closed form; quadrature integrates against the min-SINR
    density. "auto" switches to quadrature for large antenna counts, where
    the quadruple closed sum costs thousands of double contours.
    """
    if method == "quadrature" or (
        method == "auto" and max(s.nm for _, s in system.hop1.states()) *
        max(s.nm for _, s in system.hop2.states()) > 64
    ):
        return MetricValue(_e2e_ser_quadrature(system, mod), "quadrature")
    total = 0.0
    degraded = False
    for w1, s1 in system.hop1.states():
        for w2, s2 in system.hop2.states():
            try:
                total += w1 * w2 * _e2e_ser_closed(s1, s2, mod, system.mode, variant)
            except ContourConvergenceError:
                sub = RelaySystem(HopChannel(los=s1), HopChannel(los=s2), system.bandwidth, system.mode)
                total += w1 * w2 * _e2e_ser_quadrature(sub, mod)
                degraded = True
    return MetricValue(total, "closed", degraded)


def e2e_symbol_error(system, mod, method="auto"):
    return e2e_symbol_error_info(system, mod, method).value


def e2e_error_asymptote(system, mod):
    """Sum of the per-hop high-SNR asymptotes (blockage states mix linearly,
    each state weighted by its LOS probability)."""
    total = 0.0
    for channel in (system.hop1, system.hop2):
        for w, state in channel.states():
            total += w * hop_error_asymptote(state, mod)
    return total


# ---------------------------------------------------------------------------
# system gains


def _channel_gains(channel, mod):
    """(G_d, G_c) of one hop; with blockage the shallowest state dominates,
    its weight absorbed into the coding gain."""
    states = channel.states()
    w, state = min(states, key=lambda ws: ws[1].nm)
    gd = state.nm
    gc = coding_gain(state, mod) * w ** (-1.0 / gd)
    return gd, gc


def system_gains(system, mod):
    """Overall diversity and coding gain of the relay.

    G_d = min of the hop diversity gains; G_c follows the three-way case
    split, with equal diversities combining as a -G_d power mean.
    """
    gd1, gc1 = _channel_gains(system.hop1, mod)
    gd2, gc2 = _channel_gains(system.hop2, mod)
    gd = min(gd1, gd2)
    if gd1 < gd2:
        gc = gc1
    elif gd1 > gd2:
        gc = gc2
    else:
        gc = (gc1 ** (-gd) + gc2 ** (-gd)) ** (-1.0 / gd)
    return gd, gc


# ---------------------------------------------------------------------------
# outage capacity and block fading


def _e2e_quantile(system, epsilon, method="auto"):
    ceiling = e2e_outage(system, 1e12, method="series")
    if epsilon >= ceiling:
        raise QuantileInversionError(
            f"requested outage {epsilon} exceeds the CDF ceiling {ceiling:.6g} "
            "(published-mode normalization gap)",
            ceiling=ceiling,
        )
    hi = max(s.snr for ch in (system.hop1, system.hop2) for _, s in ch.states())
    while e2e_outage(system, hi, method) < epsilon:
        hi *= 4.0
        if hi > 1e30:
            raise QuantileInversionError("quantile bracket diverged", ceiling=ceiling)
    return bisect_increasing(lambda x: e2e_outage(system, x, method), epsilon, 0.0, hi, rel_tol=1e-10)


def block_fading_average(evaluator, blocks, seed, stream=7):
    """Mean of evaluator(rng_k) over k = 0..blocks-1 with per-block
    deterministic counter-based generators."""
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    vals = [evaluator(mc.block_generator(seed, stream, k)) for k in range(blocks)]
    return float(np.mean(vals))


def outage_capacity(system, query, blocks=1, seed=0):
    """Epsilon-outage capacity averaged over block-fading realizations.

    Each block draws an independent LOS/NLOS state per hop (the blockage
    weights), inverts that block's end-to-end CDF at epsilon, and contributes
    (1 - eps) * B * log2(1 + quantile); the result is the block average.
    """
    eps = query.epsilon

    def one_block(rng):
        hops = []
        for channel in (system.hop1, system.hop2):
            if channel.mixed:
                state = channel.los if rng.random() < channel.p_los else channel.nlos
            else:
                state = channel.los if channel.p_los == 1.0 else channel.nlos
            hops.append(HopChannel(los=state))
        block_system = RelaySystem(hops[0], hops[1], system.bandwidth, system.mode)
        q = _e2e_quantile(block_system, eps)
        return math.log1p(q) / LOG2

    avg_log = block_fading_average(one_block, blocks, seed)
    return (1.0 - eps) * system.bandwidth * avg_log
