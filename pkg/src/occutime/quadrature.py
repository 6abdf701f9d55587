"""Quadrature plumbing: tolerance config, adaptive wrapper, CDF tabulation.

The adaptive 1-D engine is scipy's QUADPACK; what this module adds is the
error-contract wrapper (non-convergence raises instead of warning), fixed
Gauss-Legendre panel rules for cumulative tabulation, and the
``TheoreticalCdf`` container that pairs a tabulated continuous CDF with the
point masses an aged occupation law carries at fractions 0 and 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, QuadratureError

__all__ = [
    "QuadratureConfig",
    "DEFAULT_CONFIG",
    "adaptive_quad",
    "adaptive_quad_multiscale",
    "TheoreticalCdf",
    "tabulate_cdf",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Error budget for the quadrature engines.

    ``grid_size`` is the panel count used when tabulating a CDF; acceptance
    tolerances downstream are set an order of magnitude above ``abs_tol`` so
    the quadrature budget never dominates a comparison.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_subdivisions: int = 200
    grid_size: int = 1024

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be at least 10")
        if self.grid_size < 8:
            raise DomainError("grid_size must be at least 8")


DEFAULT_CONFIG = QuadratureConfig()


def adaptive_quad(f, a, b, cfg: QuadratureConfig = DEFAULT_CONFIG, points=None, what: str = "integral"):
    """Adaptive quadrature of ``f`` on [a, b] honoring the config's budget.

    Raises :class:`QuadratureError` (carrying the achieved error estimate)
    when the subdivision limit is hit or round-off stalls convergence, rather
    than silently returning a flagged value.
    """
    out = quad(
        f,
        a,
        b,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        points=points,
        full_output=1,
    )
    value, estimate = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(
            f"{what} did not converge within {cfg.max_subdivisions} subdivisions: {out[3]}",
            estimate=estimate,
        )
    return value


def adaptive_quad_multiscale(f, upper: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                             knees=(), what: str = "integral"):
    """Quadrature of ``f`` on (0, upper) robust to knees far below upper.

    A power-law decay spanning many decades defeats plain interval bisection;
    when the integrand's first turnover sits well below the upper limit, the
    head is integrated linearly and the remainder in log coordinates, which
    turns the decay into something exponentially localized.
    """
    pts = sorted(k for k in knees if 0.0 < k < upper)
    if not pts or pts[0] > upper / 16.0:
        return adaptive_quad(f, 0.0, upper, cfg, points=pts or None, what=what)
    split = pts[0]
    head = adaptive_quad(f, 0.0, split, cfg, what=f"{what} (head)")
    log_span = math.log(upper / split)
    log_pts = [math.log(k / split) for k in pts[1:]]
    tail = adaptive_quad(
        lambda t: (lambda w: f(w) * w)(split * math.exp(t)),
        0.0, log_span, cfg, points=log_pts or None, what=f"{what} (log tail)",
    )
    return head + tail


_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached by order."""
    rule = _GAUSS_CACHE.get(order)
    if rule is None:
        rule = np.polynomial.legendre.leggauss(order)
        _GAUSS_CACHE[order] = rule
    return rule


def _gauss_panel(f, a: float, b: float, order: int = 8) -> float:
    nodes, weights = gauss_rule(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * sum(w * f(mid + half * x) for x, w in zip(nodes, weights))


class TheoreticalCdf:
    """Continuous CDF on [0, 1] plus point masses at the endpoints.

    ``cdf`` is the full right-continuous distribution function: it jumps by
    ``atom_at_0`` at 0 and by ``atom_at_1`` at 1.  The continuous part is
    either closed form or a monotone interpolant of a quadrature table.
    """

    def __init__(self, continuous_cdf, atom_at_0: float, atom_at_1: float, params: dict,
                 pdf=None, check_tol: float = 1e-5):
        if atom_at_0 < 0.0 or atom_at_1 < 0.0:
            raise DomainError("atom masses must be nonnegative")
        self._cont = continuous_cdf
        self.atom_at_0 = float(atom_at_0)
        self.atom_at_1 = float(atom_at_1)
        self.params = dict(params)
        self._pdf = pdf
        c0 = float(continuous_cdf(0.0))
        total = float(continuous_cdf(1.0)) + self.atom_at_0 + self.atom_at_1
        if abs(c0) > 1e-12:
            raise DomainError(f"continuous part must vanish at 0, got {c0!r}")
        if abs(total - 1.0) > check_tol:
            raise DomainError(f"atoms plus continuous mass must be 1, got {total!r}")

    def continuous_cdf(self, s):
        """Continuous mass on [0, s]; vanishes at 0 and excludes both atoms."""
        return self._cont(s)

    def pdf(self, s):
        if self._pdf is None:
            raise DomainError(f"no density available for {self.params!r}")
        return self._pdf(s)

    def cdf(self, s):
        """Full CDF including atoms, vectorized over s in [0, 1]."""
        arr = np.asarray(s, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise DomainError("cdf arguments must lie in [0, 1]")
        out = self.atom_at_0 + np.asarray(self._cont(arr), dtype=float)
        out = np.where(arr >= 1.0, 1.0, out)
        return out if out.ndim else float(out)

    def cdf_minus(self, s):
        """Left limit of the CDF, needed for sup-norm comparison with jumps."""
        arr = np.asarray(s, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise DomainError("cdf arguments must lie in [0, 1]")
        cont = np.asarray(self._cont(arr), dtype=float)
        out = np.where(arr <= 0.0, 0.0, self.atom_at_0 + cont)
        out = np.where(arr >= 1.0, 1.0 - self.atom_at_1, out)
        return out if out.ndim else float(out)


def tabulate_cdf(pdf2, sing_left: float, sing_right: float,
                 atom_at_0: float, atom_at_1: float, params: dict,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> TheoreticalCdf:
    """Cumulatively integrate a density with algebraic endpoint singularities.

    Parameters
    ----------
    pdf2 : callable(s, one_minus_s) -> density.  Taking the complement as a
        separate argument keeps the right endpoint panels accurate: near 1
        the caller works with 1-s directly instead of recovering it from a
        rounded s.
    sing_left, sing_right : the density behaves like s**(sing_left - 1) near
        0 and (1-s)**(sing_right - 1) near 1.  The first and last panels are
        integrated after the power substitutions z = s**sing_left and
        z = (1-s)**sing_right, which absorb those singularities exactly;
        interior panels use fixed Gauss-Legendre on a sin^2-spaced grid.

    Returns a :class:`TheoreticalCdf` whose continuous part is a monotone
    (PCHIP) interpolant of the table.
    """
    n = cfg.grid_size
    theta = np.linspace(0.0, math.pi / 2.0, n + 1)
    sin_t = np.sin(theta)
    cos_t = np.cos(theta)
    s_grid = sin_t * sin_t
    cs_grid = cos_t * cos_t  # exact complements of s_grid
    s_grid[0], s_grid[-1] = 0.0, 1.0
    cs_grid[0], cs_grid[-1] = 1.0, 0.0

    masses = np.empty(n)

    # first panel: int_0^{s1} pdf ds with z = s**sing_left
    z1 = s_grid[1] ** sing_left
    inv_l = 1.0 / sing_left

    def left_integrand(z: float) -> float:
        s = z ** inv_l
        return pdf2(s, 1.0 - s) * inv_l * (s / z)

    masses[0] = adaptive_quad(left_integrand, 0.0, z1, cfg, what="left endpoint panel")

    # last panel: int_{s_{n-1}}^1 pdf ds with z = (1-s)**sing_right
    zn = cs_grid[-2] ** sing_right
    inv_r = 1.0 / sing_right

    def right_integrand(z: float) -> float:
        w = z ** inv_r
        return pdf2(1.0 - w, w) * inv_r * (w / z)

    masses[-1] = adaptive_quad(right_integrand, 0.0, zn, cfg, what="right endpoint panel")

    # interior panels in theta, where ds = sin(2*theta) dtheta
    def theta_integrand(th: float) -> float:
        st = math.sin(th)
        ct = math.cos(th)
        return pdf2(st * st, ct * ct) * 2.0 * st * ct

    for i in range(1, n - 1):
        masses[i] = _gauss_panel(theta_integrand, theta[i], theta[i + 1])

    cum = np.concatenate(([0.0], np.cumsum(masses)))
    cum = np.maximum.accumulate(cum)  # guard against negative round-off mass
    interp = PchipInterpolator(s_grid, cum, extrapolate=False)

    def continuous(s):
        arr = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        vals = interp(arr)
        return vals if np.ndim(s) else float(vals)

    def pdf(s):
        return pdf2(s, 1.0 - s)

    return TheoreticalCdf(continuous, atom_at_0, atom_at_1, params, pdf=pdf)
