"""Bessel functions needed by the Jakes correlation and the bivariate SNR law.

J0 switches from the ascending power series to the Hankel asymptotic
expansion at |x| = 12. The modified Bessel I_nu is exposed in log form so the
Kibble joint density stays finite for the antenna counts the relay models
reach; the plain value raises on overflow per the module contract.
"""

import math

import numpy as np

_J0_SPLIT = 14.0
_I_OVERFLOW = 709.0  # log of the largest double


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    scalar = np.ndim(x) == 0
    x = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    out = np.empty_like(x)
    small = x <= _J0_SPLIT
    if small.any():
        out[small] = _j0_series(x[small])
    if (~small).any():
        out[~small] = _j0_asymptotic(x[~small])
    return float(out[0]) if scalar else out


def _j0_series(x):
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 40):
        term = term * q / (k * k)
        total = total + term
    return total


def _j0_asymptotic(x):
    # Hankel expansion: J0(x) = sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
    # with b_k = prod_{j<=k}(2j-1)^2 / (k! (8x)^k), truncated near its smallest term.
    p = np.ones_like(x)
    q = np.zeros_like(x)
    b = np.ones_like(x)
    for k in range(1, 19):
        b = b * (2 * k - 1) ** 2 / (8.0 * k * x)
        if k % 2 == 1:
            q = q + (-1.0 if (k + 1) // 2 % 2 else 1.0) * b
        else:
            p = p + (-1.0 if (k // 2) % 2 else 1.0) * b
    chi = x - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _log_i_series(order, xp):
    half = xp / 2.0
    kmax = int(np.ceil(np.max(half) + 12.0 * np.sqrt(np.max(half) + 4.0) + 20.0))
    k = np.arange(kmax)
    lg_k = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, kmax)))))  # log k!
    lg_nk = np.array([math.lgamma(order + kk + 1.0) for kk in k])
    logt = (2 * k + order)[None, :] * np.log(half)[:, None] - lg_k[None, :] - lg_nk[None, :]
    peak = logt.max(axis=1, keepdims=True)
    return peak[:, 0] + np.log(np.sum(np.exp(logt - peak), axis=1))


def _log_i_asymptotic(order, xp):
    # I_nu(x) ~ e^x / sqrt(2 pi x) * sum_j t_j, valid for x >> nu^2
    mu = 4.0 * order * order
    total = np.ones_like(xp)
    term = np.ones_like(xp)
    for j in range(1, 30):
        term = -term * (mu - (2 * j - 1) ** 2) / (j * 8.0 * xp)
        total += term
        if np.max(np.abs(term)) < 1e-17:
            break
    return xp - 0.5 * np.log(2.0 * math.pi * xp) + np.log(total)


def log_bessel_i(order, x):
    """log I_nu(x) for nu >= 0, x >= 0.

    Ascending series (log-summed, positive terms) up to the point where the
    large-argument expansion takes over; finite for arbitrarily large x, in
    particular for the arguments the joint SNR density produces.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if (x < 0).any():
        raise ValueError("x must be non-negative")
    out = np.full(x.shape, -np.inf)
    if order == 0:
        out[x == 0] = 0.0
    split = max(40.0, 1.5 * order * order)
    small = (x > 0) & (x <= split)
    large = x > split
    if small.any():
        out[small] = _log_i_series(order, x[small])
    if large.any():
        out[large] = _log_i_asymptotic(order, x[large])
    return float(out[0]) if scalar else out


def bessel_i(order, x):
    """Modified Bessel I_nu(x). Raises OverflowError where e^x is out of range."""
    logv = log_bessel_i(order, x)
    if np.any(np.asarray(logv) > _I_OVERFLOW):
        raise OverflowError(
            "bessel_i overflows for this argument; use bessel_i_scaled instead"
        )
    return np.exp(logv) if np.ndim(x) else float(np.exp(logv))


def bessel_i_scaled(order, x):
    """exp(-x) * I_nu(x), finite for all x >= 0."""
    return np.exp(log_bessel_i(order, x) - np.asarray(x, dtype=float))
