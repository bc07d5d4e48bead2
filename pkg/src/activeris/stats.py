"""Gamma moment matching of SNR samples and MGF-based error probabilities."""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DegenerateDistributionError, DomainError, QuadratureError

__all__ = [
    "GammaFit",
    "fit_gamma_moments",
    "gamma_pdf",
    "gamma_mgf",
    "sep_mpsk",
    "bep_bpsk",
    "bep_from_sep",
]

_EPSABS = 1e-10
_LIMIT = 200
_X_FLOOR = 1e-12


@dataclass(frozen=True)
class GammaFit:
    """Gamma law with shape ``k`` and scale ``nu``."""

    k: float
    nu: float

    def __post_init__(self):
        if not (np.isfinite(self.k) and np.isfinite(self.nu) and self.k > 0 and self.nu > 0):
            raise DegenerateDistributionError(f"need finite positive shape and scale, got k={self.k}, nu={self.nu}")

    @property
    def mean(self):
        return self.k * self.nu

    @property
    def variance(self):
        return self.k * self.nu**2


def fit_gamma_moments(samples):
    """Moment-matched Gamma fit, ``k = m^2/v`` and ``nu = v/m``.

    Parameters
    ----------
    samples : array_like
        Non-negative observations, at least two.

    Returns
    -------
    GammaFit
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateDistributionError("need at least two samples")
    if np.any(x < 0):
        raise ValueError("samples must be non-negative")
    mean = x.mean()
    var = x.var()
    if not var > 0:
        raise DegenerateDistributionError("samples have zero variance")
    return GammaFit(mean**2 / var, var / mean)


def gamma_pdf(x, fit):
    """Gamma density, evaluated in log space for large shapes."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    logpdf = special.xlogy(fit.k - 1.0, safe) - safe / fit.nu - fit.k * np.log(fit.nu) - special.gammaln(fit.k)
    at_zero = 1.0 / fit.nu if fit.k == 1.0 else (0.0 if fit.k > 1.0 else np.inf)
    out = np.where(x > 0, np.exp(logpdf), np.where(x == 0, at_zero, 0.0))
    return out if out.ndim else float(out)


def gamma_mgf(s, fit):
    """Moment generating function ``(1 - nu s)^(-k)`` for ``s < 1/nu``."""
    s = np.asarray(s, dtype=float)
    if np.any(s >= 1.0 / fit.nu):
        raise DomainError(f"MGF undefined for s >= 1/nu = {1.0 / fit.nu}")
    out = np.exp(-fit.k * np.log1p(-fit.nu * s))
    return out if out.ndim else float(out)


def _quad(f, a, b):
    value, abserr, info, *rest = integrate.quad(f, a, b, epsabs=_EPSABS, epsrel=1e-10, limit=_LIMIT, full_output=1)
    if rest and abserr > 1e3 * _EPSABS:
        raise QuadratureError(f"quadrature did not converge: {rest[0]}", abserr=abserr)
    return value


def sep_mpsk(fit, M):
    """Average M-PSK symbol error probability under a Gamma SNR.

    Parameters
    ----------
    fit : GammaFit
    M : int
        Constellation size, a power of two.

    Returns
    -------
    float
    """
    if M < 2 or int(M) & (int(M) - 1):
        raise ValueError(f"M must be a power of two >= 2, got {M}")
    g = np.sin(np.pi / M) ** 2

    def integrand(x):
        x = max(x, _X_FLOOR)
        return gamma_mgf(-g / np.sin(x) ** 2, fit)

    value = _quad(integrand, 0.0, (M - 1) * np.pi / M) / np.pi
    return float(np.clip(value, 0.0, 1.0))


def bep_bpsk(fit):
    """Average BPSK bit error probability under a Gamma SNR."""
    return sep_mpsk(fit, 2)


def bep_from_sep(sep, M):
    """Gray-coded bit error probability from a symbol error probability."""
    if M < 2:
        raise ValueError("M must be at least 2")
    return sep / np.log2(M)
