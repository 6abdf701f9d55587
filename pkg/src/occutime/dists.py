"""Closed-form densities and constants for occupation-time statistics.

Everything here is cheap pointwise arithmetic: the free Gaussian propagator,
its first-passage density, forward-recurrence densities for Brownian motion
and for heavy-tailed two-state renewal processes, the classical arcsine law,
the Lamperti (generalized arcsine) law, the atom masses that aged occupation
distributions place at fractions 0 and 1, and the asymmetry parameter of the
skew intermittent interval map.

Densities reject boundary points where they diverge; CDFs accept the closed
interval.  All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "TailIndex",
    "AsymmetryParams",
    "AgingRatio",
    "MapParams",
    "arccot",
    "propagator",
    "fpt_density",
    "frt_density_bm",
    "arcsine_cdf",
    "arcsine_pdf",
    "lamperti_pdf",
    "lamperti_cdf",
    "frt_density_renewal",
    "atom_q_bm",
    "atom_q_renewal",
    "beta_of_map",
]


def arccot(y: float) -> float:
    """Inverse cotangent on the (0, pi) branch.

    This branch makes s -> arccot(cot(pi*a) + ((1-s)/s)**a / ...) monotone,
    which is what the Lamperti CDF needs; the principal arctan branch would
    put a jump in the middle of the unit interval.
    """
    return math.pi / 2.0 - math.atan(y)


# ---------------------------------------------------------------------------
# parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailIndex:
    """Power-law tail exponent of the duration distributions, 0 < alpha < 1.

    The boundary values are rejected: alpha = 1 means finite mean durations
    and alpha = 0 is degenerate; every formula in this package assumes the
    strict interior.
    """

    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not (isinstance(a, (int, float)) and math.isfinite(a) and 0.0 < a < 1.0):
            raise DomainError(f"tail index must satisfy 0 < alpha < 1, got {a!r}")


@dataclass(frozen=True)
class AsymmetryParams:
    """Asymmetry of a two-state process: beta = p_minus / p_plus.

    Either ``beta`` or ``p_plus`` may be given; the other is derived.  When
    both are given they must be consistent.
    """

    beta: float
    p_plus: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise DomainError(f"beta must be finite and > 0, got {self.beta!r}")
        if not (0.0 < self.p_plus < 1.0):
            raise DomainError(f"p_plus must lie in (0, 1), got {self.p_plus!r}")
        implied = self.p_minus / self.p_plus
        if abs(implied - self.beta) > 1e-9 * max(1.0, self.beta):
            raise DomainError(
                f"inconsistent asymmetry: beta={self.beta!r} but "
                f"p_minus/p_plus={implied!r}"
            )

    @property
    def p_minus(self) -> float:
        return 1.0 - self.p_plus

    @classmethod
    def from_beta(cls, beta: float) -> "AsymmetryParams":
        if not (isinstance(beta, (int, float)) and math.isfinite(beta) and beta > 0.0):
            raise DomainError(f"beta must be finite and > 0, got {beta!r}")
        return cls(beta=float(beta), p_plus=1.0 / (1.0 + beta))

    @classmethod
    def from_p_plus(cls, p_plus: float) -> "AsymmetryParams":
        if not (0.0 < p_plus < 1.0):
            raise DomainError(f"p_plus must lie in (0, 1), got {p_plus!r}")
        return cls(beta=(1.0 - p_plus) / p_plus, p_plus=float(p_plus))


@dataclass(frozen=True)
class AgingRatio:
    """Ratio of aging time to measurement time, r = t_a / t_m; r = 0 means no aging."""

    r: float

    def __post_init__(self):
        if not (isinstance(self.r, (int, float)) and math.isfinite(self.r) and self.r >= 0.0):
            raise DomainError(f"aging ratio must be finite and >= 0, got {self.r!r}")


@dataclass(frozen=True)
class MapParams:
    """Skew intermittent interval map parameters: branch point c in (0,1) and tail index."""

    c: float
    alpha: TailIndex

    def __post_init__(self):
        if not (isinstance(self.c, (int, float)) and 0.0 < self.c < 1.0):
            raise DomainError(f"map skewness c must lie in (0, 1), got {self.c!r}")


# ---------------------------------------------------------------------------
# Brownian building blocks
# ---------------------------------------------------------------------------

def propagator(s: float, x: float) -> float:
    """Free Gaussian propagator (2*pi*s)**-0.5 * exp(-x**2 / (2*s)) for s > 0."""
    if not s > 0.0:
        raise DomainError(f"propagator needs s > 0, got s={s!r}")
    return math.exp(-x * x / (2.0 * s)) / math.sqrt(2.0 * math.pi * s)


def fpt_density(x: float, s: float) -> float:
    """Density of the first time a unit Brownian motion started at x > 0 hits zero."""
    if not x > 0.0:
        raise DomainError(f"fpt_density needs x > 0, got x={x!r}")
    if not s > 0.0:
        raise DomainError(f"fpt_density needs s > 0, got s={s!r}")
    return (x / s) * propagator(s, x)


def frt_density_bm(t: float, s: float) -> float:
    """Density of the waiting time after t until a Brownian motion next hits zero.

    psi_t(s) = sqrt(t) / (pi * sqrt(s) * (s + t)); it depends on t, which is
    the aging of the forward recurrence time.
    """
    if not t > 0.0:
        raise DomainError(f"frt_density_bm needs t > 0, got t={t!r}")
    if not s > 0.0:
        raise DomainError(f"frt_density_bm needs s > 0, got s={s!r}")
    return math.sqrt(t) / (math.pi * math.sqrt(s) * (s + t))


# ---------------------------------------------------------------------------
# classical occupation-fraction laws
# ---------------------------------------------------------------------------

def arcsine_cdf(s: float) -> float:
    """Classical arcsine CDF (2/pi) * arcsin(sqrt(s)) on [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"arcsine_cdf needs s in [0, 1], got {s!r}")
    return (2.0 / math.pi) * math.asin(math.sqrt(s))


def arcsine_pdf(s: float) -> float:
    """Classical arcsine density 1 / (pi * sqrt(s*(1-s))), open interval only."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"arcsine_pdf diverges outside (0, 1), got s={s!r}")
    return 1.0 / (math.pi * math.sqrt(s * (1.0 - s)))


def _lamperti_pdf_uv(alpha: float, beta: float, u: float, v: float) -> float:
    # u and v are s and 1-s supplied separately so callers near the endpoints
    # can pass exact complements instead of losing precision to 1.0 - s.
    ua = u ** alpha
    va = v ** alpha
    denom = beta * beta * ua * ua + 2.0 * beta * ua * va * math.cos(math.pi * alpha) + va * va
    return (beta * math.sin(math.pi * alpha) / math.pi) * (ua / u) * (va / v) / denom


def lamperti_pdf(alpha: TailIndex | float, beta: float, s: float) -> float:
    """Lamperti (generalized arcsine) density on (0, 1).

    Parameters
    ----------
    alpha : tail index in (0, 1); alpha = 1/2 with beta = 1 recovers the
        classical arcsine density.
    beta : asymmetry, ratio of minus-state to plus-state tail amplitudes.
    s : occupation fraction, strictly inside (0, 1).
    """
    a = alpha.alpha if isinstance(alpha, TailIndex) else TailIndex(alpha).alpha
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"beta must be finite and > 0, got {beta!r}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"lamperti_pdf diverges outside (0, 1), got s={s!r}")
    return _lamperti_pdf_uv(a, beta, s, 1.0 - s)


def lamperti_cdf(alpha: TailIndex | float, beta: float, s: float) -> float:
    """Lamperti CDF via the arccot form, monotone from 0 to 1 on [0, 1]."""
    a = alpha.alpha if isinstance(alpha, TailIndex) else TailIndex(alpha).alpha
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"beta must be finite and > 0, got {beta!r}")
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"lamperti_cdf needs s in [0, 1], got {s!r}")
    if s == 0.0:
        return 0.0
    if s == 1.0:
        return 1.0
    pa = math.pi * a
    arg = ((1.0 - s) / s) ** a / (beta * math.sin(pa)) + math.cos(pa) / math.sin(pa)
    return arccot(arg) / pa


# ---------------------------------------------------------------------------
# aged renewal-process pieces
# ---------------------------------------------------------------------------

def frt_density_renewal(alpha: TailIndex | float, p: float, r: float, tau: float) -> float:
    """Scaled forward-recurrence density of an aged heavy-tailed renewal process.

    psi_r(tau) = p * (sin(pi*alpha)/pi) * r**alpha / (tau**alpha * (tau + r)),
    where p is the probability of occupying the corresponding state at the
    start of the window and r the aging ratio.  With alpha = p = 1/2 this is
    half the Brownian forward-recurrence density.
    """
    a = alpha.alpha if isinstance(alpha, TailIndex) else TailIndex(alpha).alpha
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"state probability must lie in [0, 1], got {p!r}")
    if not r > 0.0:
        raise DomainError(f"frt_density_renewal needs aging ratio r > 0, got {r!r}")
    if not tau > 0.0:
        raise DomainError(f"frt_density_renewal needs tau > 0, got {tau!r}")
    return p * (math.sin(math.pi * a) / math.pi) * r ** a / (tau ** a * (tau + r))


def atom_q_bm(r: float) -> float:
    """Mass the aged Brownian occupation law puts at each of the fractions 0 and 1.

    q(r) = arccot(1/sqrt(r)) / pi on the (0, pi/2] branch; q(0) = 0 and
    q -> 1/2 as r -> infinity.
    """
    if not (isinstance(r, (int, float)) and math.isfinite(r) and r >= 0.0):
        raise DomainError(f"atom_q_bm needs finite r >= 0, got {r!r}")
    # arccot(1/sqrt(r)) on (0, pi/2] equals arctan(sqrt(r))
    return math.atan(math.sqrt(r)) / math.pi


def atom_q_renewal(alpha: TailIndex | float, p: float, r: float) -> float:
    """Sticking probability of an aged renewal process: integral of psi_r over (1, inf).

    Evaluated by quadrature after the substitution tau = 1/u followed by
    u = w**(1/alpha), which leaves a smooth bounded integrand on (0, 1).
    Always lies in (0, p).
    """
    a = alpha.alpha if isinstance(alpha, TailIndex) else TailIndex(alpha).alpha
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"state probability must lie in [0, 1], got {p!r}")
    if not r > 0.0:
        raise DomainError(f"atom_q_renewal needs aging ratio r > 0, got {r!r}")
    # int_1^inf r^a tau^-a / (tau + r) dtau  ==  int_0^1 r^a u^(a-1) / (1 + r u) du
    #                                        ==  (1/a) int_0^1 r^a / (1 + r w^(1/a)) dw
    from scipy.integrate import quad  # local import keeps module import light

    ra = r ** a
    inv_a = 1.0 / a

    def integrand(w: float) -> float:
        return ra / (1.0 + r * w ** inv_a)

    # the integrand decays over w ~ r**-a when r is large; give quad the knee
    points = None
    if r > 1.0:
        knee = min(0.5, r ** -a)
        points = [knee]
    val, _ = quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=200, points=points)
    return p * (math.sin(math.pi * a) / (math.pi * a)) * val


# ---------------------------------------------------------------------------
# intermittent map parameter
# ---------------------------------------------------------------------------

def beta_of_map(params: MapParams) -> float:
    """Asymmetry of the generalized arcsine law obeyed by the skew intermittent map.

    beta = (alpha + c) / (alpha + 1 - c) * ((1-c)/c)**(2*alpha); c = 1/2 gives
    the symmetric value 1 for every tail index.
    """
    c = params.c
    a = params.alpha.alpha
    return (a + c) / (a + 1.0 - c) * ((1.0 - c) / c) ** (2.0 * a)
