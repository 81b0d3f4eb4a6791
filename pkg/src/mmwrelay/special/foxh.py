"""Bivariate Fox-H evaluation by double Mellin-Barnes quadrature.

Convention (matching the printed layout of the capacity and end-to-end error
kernels): with three parameter groups

    H( (a_j; A1_j, A2_j) / (b_j; B1_j, B2_j)    <- outer, couples s and t
       (c_j, C_j) / (d_j, D_j)                  <- group 1, variable z1
       (e_j, E_j) / (f_j, F_j)                  <- group 2, variable z2
       | z1, z2 )

the value is (1/(2*pi*i)^2) * integral of

    Phi(s,t) * Theta1(s) * Theta2(t) * z1^s * z2^t

over two vertical contours, where the first m (resp. n) entries of each
group contribute numerator gammas Gamma(b - B.s), Gamma(1 - a + A.s) and the
remaining entries contribute the reciprocal gammas, exactly as for Meijer-G.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from mmwrelay import backends
from mmwrelay.special.mellin import (
    ContourConfig,
    ContourConvergenceError,
    IllPosedSpecError,
    _line_nodes,
    effective_half_length,
    pole_bounds,
    select_shift,
)

DEFAULT_BIVARIATE_CONTOUR = ContourConfig(
    node_count=384, half_length=40.0, max_node_count=1536, tolerance=1e-7
)


@dataclass(frozen=True)
class FoxHBivariateSpec:
    """Parameter block of H^{m1,n1:m2,n2:m3,n3}_{p1,q1:p2,q2:p3,q3}.

    outer_a/outer_b hold (coeff, weight_s, weight_t) triples; the per-variable
    groups hold (coeff, weight) pairs. All weights must be positive.
    """

    outer_orders: tuple  # (m1, n1)
    outer_a: tuple = field(default_factory=tuple)
    outer_b: tuple = field(default_factory=tuple)
    group1_orders: tuple = (0, 0)  # (m2, n2)
    group1_a: tuple = field(default_factory=tuple)
    group1_b: tuple = field(default_factory=tuple)
    group2_orders: tuple = (0, 0)  # (m3, n3)
    group2_a: tuple = field(default_factory=tuple)
    group2_b: tuple = field(default_factory=tuple)

    def __post_init__(self):
        m1, n1 = self.outer_orders
        if not (0 <= m1 <= len(self.outer_b) and 0 <= n1 <= len(self.outer_a)):
            raise IllPosedSpecError("outer orders exceed parameter list lengths")
        for grp, orders in ((1, self.group1_orders), (2, self.group2_orders)):
            a = self.group1_a if grp == 1 else self.group2_a
            b = self.group1_b if grp == 1 else self.group2_b
            m, n = orders
            if not (0 <= m <= len(b) and 0 <= n <= len(a)):
                raise IllPosedSpecError(f"group {grp} orders exceed list lengths")
        for coeff_w in self.outer_a + self.outer_b:
            if len(coeff_w) != 3 or coeff_w[1] <= 0 or coeff_w[2] <= 0:
                raise IllPosedSpecError("outer entries need (coeff, w_s, w_t) with positive weights")
        for coeff_w in self.group1_a + self.group1_b + self.group2_a + self.group2_b:
            if len(coeff_w) != 2 or coeff_w[1] <= 0:
                raise IllPosedSpecError("group entries need (coeff, weight) with positive weight")

    def axis_factors(self, which):
        """Univariate-style (numerator, denominator) lists of (c, d) for one axis."""
        if which == 1:
            (m, n), a, b = self.group1_orders, self.group1_a, self.group1_b
        else:
            (m, n), a, b = self.group2_orders, self.group2_a, self.group2_b
        num = [(dj, -Dj) for dj, Dj in b[:m]]
        num += [(1.0 - cj, Cj) for cj, Cj in a[:n]]
        den = [(1.0 - dj, Dj) for dj, Dj in b[m:]]
        den += [(cj, -Cj) for cj, Cj in a[n:]]
        return num, den

    def coupled_factors(self):
        """(numerator, denominator) lists of (c, e_s, e_t) meaning Gamma(c + e_s*s + e_t*t)."""
        m1, n1 = self.outer_orders
        num = [(bj, -B1, -B2) for bj, B1, B2 in self.outer_b[:m1]]
        num += [(1.0 - aj, A1, A2) for aj, A1, A2 in self.outer_a[:n1]]
        den = [(1.0 - bj, B1, B2) for bj, B1, B2 in self.outer_b[m1:]]
        den += [(aj, -A1, -A2) for aj, A1, A2 in self.outer_a[n1:]]
        return num, den


def _joint_shifts(spec, logz1, logz2):
    """Contour real parts satisfying both axis strips and the coupled pole planes.

    Starts from the per-axis placement, then pushes along the feasible wedge
    toward the midpoint between a violated coupled plane and the strip edges.
    """
    ax1 = spec.axis_factors(1)
    ax2 = spec.axis_factors(2)
    s1 = select_shift(ax1[0], ax1[1], logz1)
    s2 = select_shift(ax2[0], ax2[1], logz2)
    lo1, hi1 = pole_bounds(ax1[0])
    lo2, hi2 = pole_bounds(ax2[0])
    big = 1e6
    cnum, _ = spec.coupled_factors()
    for c, e1, e2 in cnum:
        if e1 > 0 and e2 > 0:
            current = e1 * s1 + e2 * s2
            if current <= -c:
                sup = e1 * (hi1 if math.isfinite(hi1) else big) + e2 * (
                    hi2 if math.isfinite(hi2) else big
                )
                if sup <= -c:
                    raise IllPosedSpecError("coupled pole constraint cannot be satisfied")
                target = -c + min(0.25, 0.5 * (sup + c))
                head1 = (hi1 if math.isfinite(hi1) else big) - s1
                head2 = (hi2 if math.isfinite(hi2) else big) - s2
                t = (target - current) / (e1 * head1 + e2 * head2)
                s1 += t * head1
                s2 += t * head2
        elif e1 < 0 and e2 < 0:
            current = e1 * s1 + e2 * s2
            if current >= c:
                inf_ = e1 * (lo1 if math.isfinite(lo1) else -big) + e2 * (
                    lo2 if math.isfinite(lo2) else -big
                )
                if inf_ >= c:
                    raise IllPosedSpecError("coupled pole constraint cannot be satisfied")
                target = c - min(0.25, 0.5 * (c - inf_))
                head1 = s1 - (lo1 if math.isfinite(lo1) else -big)
                head2 = s2 - (lo2 if math.isfinite(lo2) else -big)
                t = (current - target) / (-e1 * head1 - e2 * head2)
                s1 -= t * head1
                s2 -= t * head2
        elif e1 != 0 and e2 != 0:
            raise IllPosedSpecError("mixed-sign contour coupling is not supported")
    return s1, s2


def _grid_value(spec, shifts, logz1, logz2, contour, count):
    ax1num, ax1den = spec.axis_factors(1)
    ax2num, ax2den = spec.axis_factors(2)
    n1, w1 = _line_nodes(contour.rule, count, effective_half_length(ax1num, ax1den, contour))
    n2, w2 = _line_nodes(contour.rule, count, effective_half_length(ax2num, ax2den, contour))
    s = shifts[0] + 1j * n1
    t = shifts[1] + 1j * n2

    def axis_log(num, den, svec, logz):
        out = svec * logz
        for c, d in num:
            out = out + backends.clgamma(c + d * svec)
        for c, d in den:
            out = out - backends.clgamma(c + d * svec)
        return out

    log1 = axis_log(ax1num, ax1den, s, logz1)
    log2 = axis_log(ax2num, ax2den, t, logz2)
    grid = log1[:, None] + log2[None, :]
    cnum, cden = spec.coupled_factors()
    for c, e1, e2 in cnum:
        grid = grid + backends.clgamma(c + e1 * s[:, None] + e2 * t[None, :])
    for c, e1, e2 in cden:
        grid = grid - backends.clgamma(c + e1 * s[:, None] + e2 * t[None, :])

    offset = float(np.max(grid.real))
    if not math.isfinite(offset):
        offset = 0.0
    total = np.einsum("i,j,ij->", w1, w2, np.exp(grid - offset))
    # ds dt = (i du)(i dv) against 1/(2*pi*i)^2 leaves +1/(4*pi^2)
    return complex(total / (4.0 * math.pi**2)), offset


def fox_h_bivariate_log(spec, z1, z2, contour=None, strict=True):
    """Returns (sign, log|H|, estimate) for H(spec | z1, z2)."""
    if z1 <= 0 or z2 <= 0:
        raise IllPosedSpecError(f"arguments must be positive, got ({z1}, {z2})")
    contour = contour or DEFAULT_BIVARIATE_CONTOUR
    logz1, logz2 = math.log(z1), math.log(z2)
    if contour.shift is not None:
        shifts = (contour.shift, contour.shift)
    else:
        shifts = _joint_shifts(spec, logz1, logz2)

    count = contour.node_count // 2
    prev, prev_off = _grid_value(spec, shifts, logz1, logz2, contour, count)
    value, offset = prev, prev_off
    estimate = math.inf
    converged = False
    while count < contour.max_node_count:
        count *= 2
        value, offset = _grid_value(spec, shifts, logz1, logz2, contour, count)
        estimate = abs(value.real - prev.real * math.exp(prev_off - offset)) * math.exp(offset)
        scale = abs(value.real) * math.exp(offset)
        if estimate <= contour.tolerance * max(scale, 1e-30):
            converged = True
            break
        prev, prev_off = value, offset
    if not converged and strict:
        raise ContourConvergenceError(
            f"double contour stalled at {count} nodes per axis (estimate {estimate:.3e})",
            value=value.real * math.exp(offset),
            estimate=estimate,
        )
    sign = 1.0 if value.real >= 0 else -1.0
    logmag = offset + math.log(abs(value.real)) if value.real != 0.0 else -math.inf
    return sign, logmag, estimate


def fox_h_bivariate(spec, z1, z2, contour=None):
    """Numerical value of the bivariate Fox-H function at (z1, z2), both > 0."""
    sign, logmag, _ = fox_h_bivariate_log(spec, z1, z2, contour)
    return sign * math.exp(logmag)


def fox_h_bivariate_estimate(spec, z1, z2, contour=None, strict=True):
    sign, logmag, estimate = fox_h_bivariate_log(spec, z1, z2, contour, strict=strict)
    return sign * math.exp(logmag), estimate
