"""One-parameter Mittag-Leffler function ``E_s(z)`` for real ``-5 <= z <= 0``.

The power series is summed with Neumaier compensation whenever its largest term is
moderate.  For small orders the series terms grow enormous before they decay (and for
``s -> 0`` the number of terms explodes), so those cases fall back to the Laplace
representation of the completely monotone function ``E_s(-x)``.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DomainError

Z_MIN = -5.0
_SERIES_PEAK_LIMIT = 1e2
_MAX_TERMS = 10_000


def _check(sigma: float, z: float) -> None:
    if not 0.0 < sigma <= 1.0:
        raise DomainError(f"order must lie in (0, 1], got {sigma}")
    if not Z_MIN <= z <= 0.0:
        raise DomainError(f"argument must lie in [{Z_MIN}, 0], got {z}")


def _log_peak_term(sigma: float, x: float) -> float:
    """log of the largest series term ``x^k / Gamma(sigma k + 1)``."""
    k = np.arange(_MAX_TERMS)
    logs = k * math.log(x) - gammaln(sigma * k + 1.0)
    return float(logs.max())


def _series(sigma: float, z: float, max_terms: int) -> tuple[float, bool]:
    total = 0.0
    comp = 0.0
    small = 0
    for k in range(max_terms):
        if z == 0.0 and k > 0:
            break
        if k == 0:
            term = 1.0
        else:
            arg = sigma * k + 1.0
            if arg < 170.0 and k * math.log(abs(z)) < 700.0:
                # direct pow/gamma keep each term within a few ulps; exp(log) would not
                term = z**k / math.gamma(arg)
            else:
                term = (-1.0 if z < 0 else 1.0) ** k * math.exp(k * math.log(abs(z)) - math.lgamma(arg))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        small = small + 1 if abs(term) < 1e-16 else 0
        if small >= 3:
            return total + comp, True
    return total + comp, z == 0.0


def ml_series(sigma: float, z: float, max_terms: int = _MAX_TERMS) -> float:
    """Compensated partial sums, stopped after three consecutive terms below 1e-16."""
    return _series(sigma, z, max_terms)[0]


def ml_laplace(sigma: float, z: float) -> float:
    """``E_s(-x) = sin(s pi)/(s pi) * int_0^inf exp(-x^(1/s) u^(1/s)) / (u^2 + 2u cos(s pi) + 1) du``."""
    x = -z
    if x == 0.0:
        return 1.0
    c = math.cos(sigma * math.pi)
    pref = math.sin(sigma * math.pi) / (sigma * math.pi)
    t = x ** (1.0 / sigma)
    inv = 1.0 / sigma

    def f(u):
        return math.exp(-t * u**inv) / (u * u + 2.0 * u * c + 1.0)

    peak = max(-c, 0.0)
    pieces = [0.0, peak, 1.0] if 0.0 < peak < 1.0 else [0.0, 1.0]
    val = 0.0
    with warnings.catch_warnings():
        # quad flags roundoff once it is already at machine precision
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            val += integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-14, limit=200)[0]
        val += integrate.quad(f, 1.0, np.inf, epsabs=1e-15, epsrel=1e-14, limit=200)[0]
    return pref * val


def ml(sigma: float, z: float) -> float:
    """``E_sigma(z) = sum_k z^k / Gamma(sigma k + 1)``."""
    sigma = float(sigma)
    z = float(z)
    _check(sigma, z)
    if z == 0.0:
        return 1.0
    if sigma == 1.0:
        return math.exp(z)
    log_peak = _log_peak_term(sigma, -z)
    if log_peak <= math.log(_SERIES_PEAK_LIMIT):
        value, converged = _series(sigma, z, _MAX_TERMS)
        if converged:
            return value
    return ml_laplace(sigma, z)
