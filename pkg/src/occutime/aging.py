"""Aged occupation-fraction laws evaluated by singularity-aware quadrature.

Two families live here.  The aged arcsine law of Brownian motion has a
density given by an integral over (0, 1/r) whose integrand carries inverse
square-root singularities at both ends; the substitution v = sin(theta)^2 / r
removes both at once and leaves a smooth integrand on (0, pi/2).  The aged
generalized arcsine law of a heavy-tailed two-state renewal process is a pair
of convolution integrals whose integrands blow up like s'**(-alpha) at zero
and like (endpoint - s')**(alpha - 1) at the moving endpoint; each integral
is split at its midpoint and the exact power substitutions
u = s'**(1 - alpha) and w = (endpoint - s')**alpha absorb the singular
factors analytically, so the transformed integrands stay bounded.

CDFs are tabulated once per parameter set (cumulative panel quadrature on a
sin^2-spaced grid, monotone interpolation) because a single KS comparison
evaluates them thousands of times.  Tables are immutable and cached.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .dists import (
    AsymmetryParams,
    TailIndex,
    atom_q_bm,
    atom_q_renewal,
)
from .errors import DomainError
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    TheoreticalCdf,
    adaptive_quad,
    adaptive_quad_multiscale,
    tabulate_cdf,
)

__all__ = [
    "aging_arcsine_pdf",
    "aging_arcsine_cdf",
    "aging_arcsine_table",
    "tail_constant_c",
    "aging_lamperti_pdf",
    "aging_lamperti_cdf",
    "aging_lamperti_table",
]

_HALF_PI = math.pi / 2.0


def _check_r(r: float) -> float:
    if not (isinstance(r, (int, float)) and math.isfinite(r) and r > 0.0):
        raise DomainError(f"aging ratio must be finite and > 0, got {r!r}")
    return float(r)


# ---------------------------------------------------------------------------
# aged arcsine law (Brownian motion)
# ---------------------------------------------------------------------------

def _arcsine_knees(r: float, s: float, cs: float):
    # the theta-integrand 1/(1 + k sin^2) turns over at sin(theta) ~ 1/sqrt(k);
    # hand those corners to the adaptive engine when they are sharp
    pts = []
    for k in (s / r, cs / r):
        if k > 16.0:
            pts.append(math.asin(1.0 / math.sqrt(k)))
    return sorted(set(pts)) or None


def _aging_arcsine_pdf2(r: float, s: float, cs: float, cfg: QuadratureConfig) -> float:
    # s and cs = 1 - s are passed separately for endpoint accuracy
    rs = math.sqrt(s)
    rcs = math.sqrt(cs)
    inv_r = 1.0 / r

    def integrand(theta: float) -> float:
        st = math.sin(theta)
        v = st * st * inv_r
        return 1.0 / (rcs * (1.0 + s * v)) + 1.0 / (rs * (1.0 + cs * v))

    val = adaptive_quad(
        integrand, 0.0, _HALF_PI, cfg,
        points=_arcsine_knees(r, s, cs),
        what=f"aged arcsine density at r={r}, s={s}",
    )
    return val / (math.pi * math.pi * math.sqrt(r))


def aging_arcsine_pdf(r: float, s: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Density of the aged Brownian occupation fraction at aging ratio r > 0.

    Symmetric about 1/2 and integrating to 1 - 2*q(r) over (0, 1); recovers
    the classical arcsine density as r -> 0.
    """
    r = _check_r(r)
    if not 0.0 < s < 1.0:
        raise DomainError(f"aging_arcsine_pdf diverges outside (0, 1), got s={s!r}")
    return _aging_arcsine_pdf2(r, s, 1.0 - s, cfg)


@lru_cache(maxsize=64)
def aging_arcsine_table(r: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> TheoreticalCdf:
    """Tabulated aged arcsine CDF with atoms q(r) at both 0 and 1."""
    r = _check_r(r)
    q = atom_q_bm(r)

    def pdf2(s, cs):
        s = min(max(s, 1e-300), 1.0)
        cs = min(max(cs, 1e-300), 1.0)
        return _aging_arcsine_pdf2(r, s, cs, cfg)

    return tabulate_cdf(
        pdf2, 0.5, 0.5, q, q,
        params={"family": "aging-arcsine", "r": r},
        cfg=cfg,
    )


def aging_arcsine_cdf(r: float, s: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Aged arcsine CDF: q(r) + integral of the density up to s, and 1 at s = 1."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"aging_arcsine_cdf needs s in [0, 1], got {s!r}")
    return float(aging_arcsine_table(r, cfg).cdf(s))


def tail_constant_c(r: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Ratio of the aged arcsine density to the classical one near 0 and 1.

    Decreasing in r, with limits 1/2 as r -> 0 and 0 as r -> infinity; note
    the r -> 0 limit is 1/2, not 1, because the endpoint limit and the
    no-aging limit do not commute.
    """
    r = _check_r(r)
    inv_r = 1.0 / r

    def integrand(theta: float) -> float:
        st = math.sin(theta)
        return 1.0 / (1.0 + st * st * inv_r)

    points = [math.asin(math.sqrt(r))] if r < 1.0 / 16.0 else None
    val = adaptive_quad(integrand, 0.0, _HALF_PI, cfg, points=points,
                        what=f"tail constant at r={r}")
    return val / (math.pi * math.sqrt(r))


# ---------------------------------------------------------------------------
# aged generalized arcsine law (renewal processes)
# ---------------------------------------------------------------------------

def _alpha_value(alpha) -> float:
    return alpha.alpha if isinstance(alpha, TailIndex) else TailIndex(alpha).alpha


def _convolution_integral(a: float, beta: float, p: float, r: float,
                          span: float, fixed: float, sing_is_argument: bool,
                          cfg: QuadratureConfig, side: str) -> float:
    """One of the two aged-law convolution integrals over s' in (0, span).

    In both integrals 1 - s' = fixed + d with d = span - s', the stationary
    density's two arguments are d/(fixed+d) and fixed/(fixed+d), and the one
    involving d vanishes at s' = span, producing a (span - s')**(alpha - 1)
    singularity there; ``sing_is_argument`` says whether that vanishing side
    is the density's main argument (plus-state piece) or its complement
    (minus-state piece), which decides where beta**2 sits in the denominator.
    Everything is written in terms of d supplied exactly by the substitution,
    never recovered from a rounded s'.
    """
    K = math.sin(math.pi * a) / math.pi
    cos_pa = math.cos(math.pi * a)
    ra = r ** a
    bK = beta * K
    mid = 0.5 * span

    def phi_denominator(arg_a: float, comp_a: float) -> float:
        return beta * beta * arg_a * arg_a + 2.0 * beta * arg_a * comp_a * cos_pa + comp_a * comp_a

    # s' in (0, mid]: substitute s' = u_var**(1/(1-a)); the jacobian cancels
    # the s'**(-a) of the recurrence density exactly, leaving 1/(1-a).
    expo = 1.0 / (1.0 - a)

    def near_zero(u_var: float) -> float:
        sp = u_var ** expo
        d = span - sp                      # safe: sp <= span/2
        om = fixed + d
        moving = d / om
        still = fixed / om
        arg, comp = (moving, still) if sing_is_argument else (still, moving)
        arg_a = arg ** a
        comp_a = comp ** a
        phi = bK * (arg_a / arg) * (comp_a / comp) / phi_denominator(arg_a, comp_a)
        return (p * K * ra / (sp + r)) * phi / om / (1.0 - a)

    # the recurrence density turns over where s' ~ r
    left = adaptive_quad_multiscale(near_zero, mid ** (1.0 - a), cfg,
                                    knees=[r ** (1.0 - a)],
                                    what=f"{side} convolution near s'=0")

    # s' in [mid, span): substitute d = span - s' = w**(1/a); the jacobian
    # cancels d**(a-1) of the vanishing density factor, leaving 1/a.
    inv_a = 1.0 / a

    def near_end(w: float) -> float:
        d = w ** inv_a
        sp = span - d                      # safe: only feeds the smooth psi factor
        om = fixed + d
        sing_a = w / om ** a               # (d/om)**a without the power round trip
        other = fixed / om
        other_a = other ** a
        if sing_is_argument:
            denom = phi_denominator(sing_a, other_a)
        else:
            denom = phi_denominator(other_a, sing_a)
        psi = p * K * ra / (sp ** a * (sp + r))
        return psi * bK * (other_a / other) / (denom * om ** a) / a

    # knees: the stationary density's arguments turn over where d ~ fixed,
    # and the recurrence density where s' ~ r (d ~ span - r)
    knees = [fixed ** a]
    if span > r:
        knees.append((span - r) ** a)
    right = adaptive_quad_multiscale(near_end, mid ** a, cfg, knees=knees,
                                     what=f"{side} convolution near s'={span}")
    return left + right


def _aging_lamperti_pdf2(a: float, beta: float, p_plus: float, r: float,
                         s: float, cs: float, cfg: QuadratureConfig) -> float:
    # plus-state piece: recurrence time s' spent +, stationary law on the
    # rest; density argument (s - s')/(1 - s') vanishes at s' = s
    plus = _convolution_integral(a, beta, p_plus, r, span=s, fixed=cs,
                                 sing_is_argument=True, cfg=cfg, side="plus-state")
    # minus-state piece: argument s/(1 - s'); its complement vanishes at s' = 1 - s
    minus = _convolution_integral(a, beta, 1.0 - p_plus, r, span=cs, fixed=s,
                                  sing_is_argument=False, cfg=cfg, side="minus-state")
    return plus + minus


def aging_lamperti_pdf(alpha, params: AsymmetryParams, r: float, s: float,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Density of the aged renewal occupation fraction on (0, 1).

    With alpha = 1/2 and a symmetric process this coincides with the aged
    arcsine density; as r -> 0 it collapses onto the stationary generalized
    arcsine density.
    """
    a = _alpha_value(alpha)
    if not isinstance(params, AsymmetryParams):
        raise DomainError("params must be an AsymmetryParams instance")
    r = _check_r(r)
    if not 0.0 < s < 1.0:
        raise DomainError(f"aging_lamperti_pdf diverges outside (0, 1), got s={s!r}")
    return _aging_lamperti_pdf2(a, params.beta, params.p_plus, r, s, 1.0 - s, cfg)


@lru_cache(maxsize=32)
def _lamperti_table_cached(a: float, beta: float, p_plus: float, r: float,
                           cfg: QuadratureConfig) -> TheoreticalCdf:
    atom0 = atom_q_renewal(a, 1.0 - p_plus, r)  # stuck in the minus state
    atom1 = atom_q_renewal(a, p_plus, r)        # stuck in the plus state

    def pdf2(s, cs):
        s = min(max(s, 1e-300), 1.0)
        cs = min(max(cs, 1e-300), 1.0)
        return _aging_lamperti_pdf2(a, beta, p_plus, r, s, cs, cfg)

    return tabulate_cdf(
        pdf2, a, a, atom0, atom1,
        params={"family": "aging-lamperti", "alpha": a, "beta": beta,
                "p_plus": p_plus, "r": r},
        cfg=cfg,
    )


def aging_lamperti_table(alpha, params: AsymmetryParams, r: float,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> TheoreticalCdf:
    """Tabulated aged generalized arcsine CDF; atom q_minus at 0, q_plus at 1."""
    a = _alpha_value(alpha)
    if not isinstance(params, AsymmetryParams):
        raise DomainError("params must be an AsymmetryParams instance")
    return _lamperti_table_cached(a, params.beta, params.p_plus, _check_r(r), cfg)


def aging_lamperti_cdf(alpha, params: AsymmetryParams, r: float, s: float,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Aged generalized arcsine CDF on [0, 1], including both endpoint atoms."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"aging_lamperti_cdf needs s in [0, 1], got {s!r}")
    return float(aging_lamperti_table(alpha, params, r, cfg).cdf(s))


# ---------------------------------------------------------------------------
# no-aging laws wrapped in the same table interface
# ---------------------------------------------------------------------------

def arcsine_table() -> TheoreticalCdf:
    """Classical arcsine law as a TheoreticalCdf (closed form, no atoms)."""
    import numpy as np

    def continuous(s):
        return (2.0 / math.pi) * np.arcsin(np.sqrt(np.asarray(s, dtype=float)))

    from .dists import arcsine_pdf

    return TheoreticalCdf(continuous, 0.0, 0.0, {"family": "arcsine"}, pdf=arcsine_pdf)


def lamperti_table(alpha, beta: float) -> TheoreticalCdf:
    """Stationary generalized arcsine law as a TheoreticalCdf (closed form, no atoms)."""
    import numpy as np

    a = _alpha_value(alpha)
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"beta must be finite and > 0, got {beta!r}")
    pa = math.pi * a
    cot_pa = math.cos(pa) / math.sin(pa)
    bsin = beta * math.sin(pa)

    def continuous(s):
        arr = np.asarray(s, dtype=float)
        interior = np.clip(arr, 1e-300, 1.0)
        ratio = (1.0 - interior) / interior
        arg = ratio ** a / bsin + cot_pa
        vals = (math.pi / 2.0 - np.arctan(arg)) / pa
        vals = np.where(arr <= 0.0, 0.0, vals)
        vals = np.where(arr >= 1.0, 1.0, vals)
        return vals if arr.ndim else float(vals)

    from .dists import lamperti_pdf

    return TheoreticalCdf(
        continuous, 0.0, 0.0,
        {"family": "lamperti", "alpha": a, "beta": beta},
        pdf=lambda s: lamperti_pdf(a, beta, s),
    )
