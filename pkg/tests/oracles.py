"""Independent oracles for the numerical test suite.

Everything here is deliberately separate from the package implementation:
plain power series, finite-sum identities, and a trapezoid integrator on a
log grid. Oracle values asserted in the tests were computed by these
routines (or are closed-form constants) and then frozen.
"""

import math

import numpy as np


def j0_series(x, terms=40):
    """Ascending power series of J0; accurate to ~1e-12 for |x| <= 10."""
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    for k in range(1, terms):
        term *= q / (k * k)
        total += term
    return total


def bessel_i_series(order, x, terms=80):
    """Ascending series sum (x/2)^(nu+2k) / (k! Gamma(nu+k+1))."""
    total = 0.0
    for k in range(terms):
        total += math.exp(
            (2 * k + order) * math.log(x / 2.0) - math.lgamma(k + 1.0) - math.lgamma(order + k + 1.0)
        ) if x > 0 else (1.0 if k == 0 and order == 0 else 0.0)
        if x == 0:
            break
    return total


def gaussian_tail_quadrature(x, n=200001, span=40.0):
    """Q(x) by direct trapezoid integration of the normal density."""
    t = np.linspace(x, x + span, n)
    dens = np.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    return float(np.trapezoid(dens, t))


def lower_gamma_finite_sum(s, x):
    """gamma(s, x) for integer s via the finite-sum identity
    gamma(s,x) = (s-1)! (1 - e^-x sum_{n<s} x^n/n!)."""
    if s != int(s) or s < 1:
        raise ValueError("integer s only")
    s = int(s)
    acc = sum(x**n / math.factorial(n) for n in range(s))
    return math.factorial(s - 1) * (1.0 - math.exp(-x) * acc)


def integral_0_inf(f, n=40001, lo=-35.0, hi=35.0):
    """Trapezoid on a log grid: integral of f over (0, inf).

    Independent of the package quadrature; good to ~1e-9 relative for the
    smooth, exponentially decaying integrands used in the tests.
    """
    u = np.linspace(lo, hi, n)
    x = np.exp(u)
    y = np.asarray(f(x), dtype=float) * x
    y[~np.isfinite(y)] = 0.0
    return float(np.trapezoid(y, u))


def slope_loglog(x, y):
    """Least-squares slope of log10(y) against log10(x)."""
    lx, ly = np.log10(x), np.log10(y)
    return float(np.polyfit(lx, ly, 1)[0])
