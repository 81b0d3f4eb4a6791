"""Double-exponential (tanh-sinh) quadrature.

Used as the independent arbiter for every Meijer-G / Fox-H closed form and as
the evaluation route for metrics the paper leaves without closed form. The
integrand callable must accept numpy arrays. Endpoint singularities like
x^(-1/2) at 0 are handled by the transform itself.
"""

import math

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive refinement stopped above the requested tolerance."""

    def __init__(self, message, value=float("nan"), estimate=float("inf")):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


_T_MAX = 6.0


def _nodes(level):
    n = 8 << level  # nodes per side
    h = _T_MAX / n
    t = np.arange(-n, n + 1, dtype=float) * h
    return t, h


def _transform_finite(a, b, t):
    with np.errstate(over="ignore"):
        u = 0.5 * math.pi * np.sinh(t)
        x = 0.5 * (a + b) + 0.5 * (b - a) * np.tanh(u)
        w = 0.5 * (b - a) * (0.5 * math.pi * np.cosh(t)) / np.cosh(u) ** 2
    return x, w


def _transform_halfline(t):
    with np.errstate(over="ignore"):
        u = 0.5 * math.pi * np.sinh(t)
        x = np.exp(u)
        w = x * 0.5 * math.pi * np.cosh(t)
    return x, w


def integrate(f, a, b, rel_tol=1e-10, abs_tol=1e-300, max_level=8):
    """Integrate f over (a, b); b may be numpy.inf (with finite a).

    Returns (value, estimate); estimate is |delta| between the last two
    refinement levels. Raises QuadratureError if refinement stalls above
    max(rel_tol*|value|, abs_tol).
    """
    infinite = np.isinf(b)
    if infinite and a != 0.0:
        return integrate(lambda x: f(x + a), 0.0, np.inf, rel_tol, abs_tol, max_level)

    prev = None
    value = math.nan
    estimate = math.inf
    for level in range(0, max_level + 1):
        t, h = _nodes(level)
        if infinite:
            x, w = _transform_halfline(t)
        else:
            x, w = _transform_finite(a, b, t)
        ok = np.isfinite(x) & np.isfinite(w) & (w != 0.0)
        if not infinite:
            ok &= (x > min(a, b)) & (x < max(a, b))
        fx = np.zeros_like(t)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            vals = np.asarray(f(x[ok]), dtype=float)
        fx[ok] = np.where(np.isfinite(vals), vals, 0.0)
        value = h * float(np.sum(fx * w))
        if prev is not None:
            estimate = abs(value - prev)
            if estimate <= max(rel_tol * abs(value), abs_tol):
                return value, estimate
        prev = value
    raise QuadratureError(
        f"quadrature did not converge (estimate {estimate:.3e}, value {value:.6e})",
        value=value,
        estimate=estimate,
    )


def integrate_value(f, a, b, rel_tol=1e-10, abs_tol=1e-300, max_level=8):
    value, _ = integrate(f, a, b, rel_tol=rel_tol, abs_tol=abs_tol, max_level=max_level)
    return value


def bisect_increasing(f, target, lo, hi, rel_tol=1e-10, max_iter=200):
    """Solve f(x) = target for a non-decreasing f on [lo, hi] by bisection."""
    flo, fhi = f(lo), f(hi)
    if flo > target or fhi < target:
        raise ValueError(f"target {target} outside bracket values [{flo}, {fhi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * max(abs(lo), abs(hi), 1e-300):
            break
    return 0.5 * (lo + hi)
