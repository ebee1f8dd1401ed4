"""p-trigonometric special functions.

The generalized half-period ``pi_p`` and generalized sine ``sin_p`` govern the
one dimensional p-Laplacian eigenvalue problem: on an interval of length L the
first nontrivial eigenvalue (Neumann or Dirichlet alike) is ``(pi_p/L)**p``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, ToleranceError

__all__ = ["PExponent", "pi_p", "pi_p_quad", "sin_p", "sharp_constant_1d"]


@dataclass(frozen=True)
class PExponent:
    """Exponent of the p-Laplacian; must satisfy p > 1."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        if not self.p > 1.0:
            raise DomainError(f"p must be > 1, got {self.p!r}")


def _pval(p) -> float:
    """Accept a PExponent or a bare number, validating either way."""
    if isinstance(p, PExponent):
        return p.p
    return PExponent(p).p


def pi_p(p) -> float:
    """Generalized pi: half-period of sin_p.

    Closed form 2*pi*(p-1)**(1/p) / (p*sin(pi/p)); reduces to pi at p = 2.
    """
    pv = _pval(p)
    return 2.0 * math.pi * (pv - 1.0) ** (1.0 / pv) / (pv * math.sin(math.pi / pv))


def pi_p_quad(p, tol: float = 1e-10) -> float:
    """pi_p via its defining singular integral, to absolute tolerance tol.

    Integrates 2*int_0^{(p-1)^{1/p}} (1 - t^p/(p-1))^{-1/p} dt.  After the
    substitution t = (p-1)^{1/p} s the integrand factors as a smooth function
    times the algebraic endpoint weight (1-s)^{-1/p}, which QUADPACK's QAWS
    handles directly.
    """
    pv = _pval(p)
    if not 0.0 < tol < 1e-3:
        raise DomainError(f"tol must lie in (0, 1e-3), got {tol!r}")

    def smooth_part(s: float) -> float:
        # ((1 - s^p)/(1 - s))^(-1/p); series near s = 1 to dodge the 0/0
        w = 1.0 - s
        if w < 1e-6:
            ratio = pv - pv * (pv - 1.0) / 2.0 * w + pv * (pv - 1.0) * (pv - 2.0) / 6.0 * w * w
        else:
            ratio = (1.0 - s**pv) / w
        return ratio ** (-1.0 / pv)

    val, err = integrate.quad(smooth_part, 0.0, 1.0, weight="alg", wvar=(0.0, -1.0 / pv))
    scale = 2.0 * (pv - 1.0) ** (1.0 / pv)
    if scale * err > tol:
        raise ToleranceError(
            f"pi_p quadrature error estimate {scale * err:.3e} exceeds tol {tol:.3e}"
        )
    return scale * val


@lru_cache(maxsize=128)
def _sin_p_setup(pv: float):
    ymax = (pv - 1.0) ** (1.0 / pv)
    half = pi_p(pv) / 2.0
    return ymax, half


def _arc_length(pv: float, y: float) -> float:
    """F(y) = int_0^y (1 - s^p/(p-1))^(-1/p) ds for y in [0, (p-1)^(1/p)].

    Hypergeometric closed form: F(y) = y * 2F1(1/p, 1/p; 1 + 1/p; (y/ymax)^p).
    """
    ymax, half = _sin_p_setup(pv)
    if y <= 0.0:
        return 0.0
    z = y / ymax
    if z >= 1.0:
        return half
    a = 1.0 / pv
    return y * float(special.hyp2f1(a, a, 1.0 + a, z**pv))


def sin_p(p, x):
    """Generalized sine: inverse of the arc-length integral on [0, pi_p/2].

    Normalization: increasing from 0 to (p-1)**(1/p) over [0, pi_p/2], then
    extended by the reflection sin_p(pi_p - x) = sin_p(x) and by odd
    2*pi_p-periodicity.  The increasing branch solves
    y' = (1 - y**p/(p-1))**(1/p).  At p = 2 this is the circular sine.
    Accepts scalar or array x.
    """
    pv = _pval(p)
    if np.ndim(x) > 0:
        return np.array([_sin_p_scalar(pv, float(t)) for t in np.ravel(x)]).reshape(np.shape(x))
    return _sin_p_scalar(pv, float(x))


def _sin_p_scalar(pv: float, x: float) -> float:
    ymax, half = _sin_p_setup(pv)
    period = 4.0 * half
    t = math.fmod(x, period)
    if t < 0.0:
        t += period
    sign = 1.0
    if t > 2.0 * half:  # odd half of the period
        sign = -1.0
        t -= 2.0 * half
    if t > half:  # reflect about the quarter period
        t = 2.0 * half - t
    if t <= 0.0:
        return 0.0 * sign
    if t >= half:
        return sign * ymax
    y = optimize.brentq(lambda s: _arc_length(pv, s) - t, 0.0, ymax, xtol=1e-14, rtol=8.9e-16)
    return sign * y


def sharp_constant_1d(p, L: float) -> float:
    """Sharp interval constant (pi_p/L)**p: the first nontrivial 1D eigenvalue."""
    pv = _pval(p)
    if not L > 0.0:
        raise DomainError(f"L must be positive, got {L!r}")
    return (pi_p(pv) / L) ** pv
