"""Univariate Meijer-G evaluation by vertical-line Mellin-Barnes quadrature.

A spec G^{m,n}_{p,q}(z | a; b) is translated into gamma factors
Gamma(c + d*s) (numerator and denominator); the integral runs over
s = shift + i*t. The shift sits midway between the two pole sets when the
strip is finite; when one side is pole-free the shift moves to the t=0
magnitude minimum (saddle), which kills the cancellation that otherwise
ruins small results like e^{-z} at large z.

Values are also exposed in (sign, log|value|) form so downstream closed
forms can combine enormous gamma prefactors without overflow.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from mmwrelay import backends


class IllPosedSpecError(ValueError):
    """Contour cannot separate the two pole sets (or domain violation)."""


class ContourConvergenceError(RuntimeError):
    """Refinement exhausted with the estimate still above tolerance."""

    def __init__(self, message, value=float("nan"), estimate=float("inf")):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


@dataclass(frozen=True)
class ContourConfig:
    """Quadrature controls for one Mellin-Barnes evaluation."""

    node_count: int = 512
    half_length: float = 60.0
    shift: float | None = None  # None -> automatic placement
    rule: str = "gauss-legendre"  # or "trapezoid"
    max_node_count: int = 4096
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.node_count < 64:
            raise ValueError("node_count must be at least 64")
        if self.half_length <= 0:
            raise ValueError("half_length must be positive")
        if self.rule not in ("gauss-legendre", "trapezoid"):
            raise ValueError(f"unknown rule {self.rule!r}")


@dataclass(frozen=True)
class MeijerGSpec:
    """Parameter block of G^{m,n}_{p,q}(z | a_1..a_p ; b_1..b_q)."""

    m: int
    n: int
    p: int
    q: int
    a: tuple = field(default_factory=tuple)
    b: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise IllPosedSpecError(f"orders out of range: {self}")
        if len(self.a) != self.p or len(self.b) != self.q:
            raise IllPosedSpecError("parameter list lengths must match (p, q)")

    def gamma_factors(self):
        """(numerator, denominator) lists of (c, d) meaning Gamma(c + d*s)."""
        num = [(bj, -1.0) for bj in self.b[: self.m]]
        num += [(1.0 - ak, 1.0) for ak in self.a[: self.n]]
        den = [(1.0 - bj, 1.0) for bj in self.b[self.m :]]
        den += [(ak, -1.0) for ak in self.a[self.n :]]
        return num, den


def pole_bounds(num_factors):
    """Feasible open interval (lo, hi) for the contour real part."""
    lo, hi = -math.inf, math.inf
    for c, d in num_factors:
        if d > 0:
            lo = max(lo, -c / d)
        elif d < 0:
            hi = min(hi, c / (-d))
    return lo, hi


def _lgamma_abs(x):
    # log|Gamma(x)| for real x (reflection below zero); +inf at the poles
    if x > 0:
        return math.lgamma(x)
    try:
        return math.log(math.pi) - math.log(abs(math.sin(math.pi * x))) - math.lgamma(1.0 - x)
    except ValueError:
        return math.inf


def _magnitude_at(sigma, num, den, logz):
    total = sigma * logz
    for c, d in num:
        total += _lgamma_abs(c + d * sigma)
    for c, d in den:
        total -= _lgamma_abs(c + d * sigma)
    return total


def select_shift(num, den, logz, margin=0.05):
    """Contour real part: strip midpoint, or the saddle when one side is open.

    On a half-infinite strip the t=0 magnitude minimum is the steepest-descent
    point, where the phase is stationary; placing the line there makes the
    quadrature converge fast even when log(z) is large.
    """
    lo, hi = pole_bounds(num)
    if hi - lo <= 2e-9:
        raise IllPosedSpecError(
            f"gamma pole sets are not separable (strip [{lo}, {hi}])"
        )
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if not math.isfinite(lo) and not math.isfinite(hi):
        return 0.0
    # one-sided strip: scan for the t=0 magnitude minimum
    if math.isfinite(hi):
        grid = hi - margin - np.geomspace(1e-4, 400.0, 200)
    else:
        grid = lo + margin + np.geomspace(1e-4, 400.0, 200)
    vals = [_magnitude_at(s, num, den, logz) for s in grid]
    return float(grid[int(np.argmin(vals))])


def effective_half_length(num, den, contour):
    """Truncation point of the imaginary axis, shrunk to the integrand decay.

    Each numerator gamma contributes exp(-(pi/2)|d||t|) decay along the line
    (denominators the opposite); truncating where the envelope is ~e^-80 buys
    node density without measurable truncation error. contour.half_length
    stays the upper bound.
    """
    rate = 0.5 * math.pi * (
        sum(abs(d) for _, d in num) - sum(abs(d) for _, d in den)
    )
    if rate <= 0:
        return contour.half_length
    return min(contour.half_length, max(12.0, 80.0 / rate))


@lru_cache(maxsize=64)
def _line_nodes(rule, count, half_length):
    """Nodes/weights on t in (-half_length, half_length) via t = sinh(u).

    The sinh map concentrates nodes near t = 0, where saddle-adjacent
    integrands spike, while still covering the slowly decaying tails; the
    requested rule is applied in the u variable.
    """
    umax = math.asinh(half_length)
    if rule == "gauss-legendre":
        x, w = np.polynomial.legendre.leggauss(count)
        u = x * umax
        wu = w * umax
    else:
        h = 2.0 * umax / (count - 1)
        u = np.linspace(-umax, umax, count)
        wu = np.full(count, h)
        wu[0] = wu[-1] = 0.5 * h
    return np.sinh(u), wu * np.cosh(u)


def _line_value(shift, num, den, logz, contour, count):
    nodes, weights = _line_nodes(contour.rule, count, effective_half_length(num, den, contour))
    cnum = [c for c, _ in num]
    dnum = [d for _, d in num]
    cden = [c for c, _ in den]
    dden = [d for _, d in den]
    total, offset = backends.mb_line_sum(shift, nodes, weights, cnum, dnum, cden, dden, logz)
    return total / (2.0 * math.pi), offset


def meijer_g_log(spec, z, contour=None, strict=True):
    """Returns (sign, log|G|, estimate). See meijer_g for semantics."""
    if z <= 0:
        raise IllPosedSpecError(f"argument must be positive, got z={z}")
    contour = contour or ContourConfig()
    num, den = spec.gamma_factors()
    logz = math.log(z)
    shift = contour.shift if contour.shift is not None else select_shift(num, den, logz)
    lo, hi = pole_bounds(num)
    if not (lo < shift < hi):
        raise IllPosedSpecError(f"shift {shift} lies outside the pole-free strip ({lo}, {hi})")

    count = contour.node_count // 2
    prev, prev_off = _line_value(shift, num, den, logz, contour, count)
    value, offset = prev, prev_off
    estimate = math.inf
    converged = False
    while count < contour.max_node_count:
        count *= 2
        value, offset = _line_value(shift, num, den, logz, contour, count)
        # compare on a common scale
        estimate = abs(value.real - prev.real * math.exp(prev_off - offset)) * math.exp(offset)
        scale = abs(value.real) * math.exp(offset)
        if estimate <= contour.tolerance * max(scale, 1e-30):
            converged = True
            break
        prev, prev_off = value, offset
    if not converged and strict:
        raise ContourConvergenceError(
            f"contour quadrature stalled at {count} nodes (estimate {estimate:.3e})",
            value=value.real * math.exp(offset),
            estimate=estimate,
        )
    sign = 1.0 if value.real >= 0 else -1.0
    logmag = offset + math.log(abs(value.real)) if value.real != 0.0 else -math.inf
    return sign, logmag, estimate


def meijer_g(spec, z, contour=None):
    """Numerical value of the Meijer-G function G(z | spec) on z > 0.

    Raises IllPosedSpecError when the pole sets cannot be separated (or the
    shift hits a pole), ContourConvergenceError when adaptive node doubling
    exhausts max_node_count above tolerance.
    """
    sign, logmag, _ = meijer_g_log(spec, z, contour)
    return sign * math.exp(logmag)


def meijer_g_estimate(spec, z, contour=None, strict=True):
    """Value plus the self-refinement convergence estimate."""
    sign, logmag, estimate = meijer_g_log(spec, z, contour, strict=strict)
    return sign * math.exp(logmag), estimate
