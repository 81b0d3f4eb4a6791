"""Pure-numpy Mellin-Barnes kernels.

This is the fallback backend; `mmwrelay._mbkernel` is the compiled twin with
identical signatures. Both operate on vertical-line contours s = shift + i*t
and return sums in offset-scaled form so callers can combine huge gamma
products in log space.
"""

import numpy as np

_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.9189385332046727
_LOG_2 = 0.6931471805599453


def _log_sin_pi(z):
    """log(sin(pi z)) up to a multiple of 2*pi*i, overflow-safe for large |Im z|."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    im = z.imag
    up = im > 0
    dn = im < 0
    mid = ~(up | dn)
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z > 0
    zu = z[up]
    out[up] = (-np.log(2.0) + 0.5j * np.pi) - 1j * np.pi * zu + np.log1p(-np.exp(2j * np.pi * zu))
    zd = z[dn]
    out[dn] = (-np.log(2.0) - 0.5j * np.pi) + 1j * np.pi * zd + np.log1p(-np.exp(-2j * np.pi * zd))
    out[mid] = np.log(np.sin(np.pi * z[mid]) + 0j)
    return out


def clgamma(z):
    """Complex log-gamma (Lanczos approximation, reflection for Re z < 0.5).

    The imaginary part is only consistent modulo 2*pi; callers exponentiate
    differences, so the branch does not matter.
    """
    z = np.asarray(z, dtype=np.complex128)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    refl = z.real < 0.5
    zz = np.where(refl, 1.0 - z, z)

    w = zz - 1.0
    x = np.full(zz.shape, _LANCZOS[0], dtype=np.complex128)
    for i in range(1, len(_LANCZOS)):
        x = x + _LANCZOS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    lg = _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(x)

    if refl.any():
        # log Gamma(z) = log(pi) - log(sin(pi z)) - log Gamma(1 - z)
        lg = np.where(refl, np.log(np.pi) - _log_sin_pi(z) - lg, lg)
    out[...] = lg
    return out[0] if scalar else out


def mb_line_sum(shift, nodes, weights, cnum, dnum, cden, dden, logz):
    """Offset-scaled contour sum for a univariate Mellin-Barnes integrand.

    Evaluates sum_k w_k * f(shift + i*nodes_k) with
    f(s) = exp( sum_j lgamma(cnum_j + dnum_j*s) - sum_j lgamma(cden_j + dden_j*s)
                + s*logz )
    and returns ``(total, offset)`` where the true (complex) sum equals
    ``total * exp(offset)``. The offset keeps exp() in range for huge gamma
    products.
    """
    s = shift + 1j * np.asarray(nodes)
    logf = np.zeros_like(s)
    for c, d in zip(cnum, dnum):
        logf = logf + clgamma(c + d * s)
    for c, d in zip(cden, dden):
        logf = logf - clgamma(c + d * s)
    logf = logf + s * logz
    offset = float(np.max(logf.real))
    if not np.isfinite(offset):
        offset = 0.0
    total = np.sum(np.asarray(weights) * np.exp(logf - offset))
    return complex(total), offset
