"""Special-function layer: gamma family, Bessel, Gaussian tail, Meijer-G and
bivariate Fox-H via Mellin-Barnes contours, plus the tanh-sinh quadrature the
closed-form cross-checks rely on."""

from mmwrelay.special.bessel import bessel_i, bessel_i_scaled, bessel_j0, log_bessel_i
from mmwrelay.special.foxh import (
    DEFAULT_BIVARIATE_CONTOUR,
    FoxHBivariateSpec,
    fox_h_bivariate,
    fox_h_bivariate_estimate,
    fox_h_bivariate_log,
)
from mmwrelay.special.gammafn import (
    erf,
    erfc,
    gamma,
    gaussian_q,
    lgamma,
    lower_incomplete_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
)
from mmwrelay.special.mellin import (
    ContourConfig,
    ContourConvergenceError,
    IllPosedSpecError,
    MeijerGSpec,
    meijer_g,
    meijer_g_estimate,
    meijer_g_log,
)
from mmwrelay.special.quad import QuadratureError, bisect_increasing, integrate, integrate_value

__all__ = [
    "bessel_j0",
    "bessel_i",
    "bessel_i_scaled",
    "log_bessel_i",
    "lgamma",
    "gamma",
    "lower_incomplete_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "erf",
    "erfc",
    "gaussian_q",
    "ContourConfig",
    "MeijerGSpec",
    "meijer_g",
    "meijer_g_estimate",
    "meijer_g_log",
    "IllPosedSpecError",
    "ContourConvergenceError",
    "FoxHBivariateSpec",
    "DEFAULT_BIVARIATE_CONTOUR",
    "fox_h_bivariate",
    "fox_h_bivariate_estimate",
    "fox_h_bivariate_log",
    "QuadratureError",
    "integrate",
    "integrate_value",
    "bisect_increasing",
]
