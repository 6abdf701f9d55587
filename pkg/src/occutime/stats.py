"""Empirical distributions with endpoint atoms and KS/DKW comparison machinery.

The aged occupation laws put genuine point masses at fractions 0 and 1, so
the empirical side tracks those masses explicitly (with a model-dependent
tolerance: exact equality for renewal/map samples, one time step for the
discretized Brownian model) and the sup-norm comparison evaluates both
one-sided limits of both CDFs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .quadrature import TheoreticalCdf

__all__ = [
    "EmpiricalDistribution",
    "ComparisonReport",
    "build_empirical",
    "dkw_epsilon",
    "ks_against",
    "histogram",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample of occupation fractions with estimated endpoint masses."""

    fractions: np.ndarray
    atom_tol: float
    mass_at_0: float
    mass_at_1: float

    @property
    def n(self) -> int:
        return self.fractions.size

    def cdf(self, s):
        """Right-continuous ECDF, vectorized."""
        return np.searchsorted(self.fractions, s, side="right") / self.n

    def cdf_minus(self, s):
        """Left limit of the ECDF."""
        return np.searchsorted(self.fractions, s, side="left") / self.n


def build_empirical(samples, atom_tol: float = 0.0) -> EmpiricalDistribution:
    """Sort a sample and count the masses within atom_tol of 0 and 1.

    atom_tol = 0 (exact equality) suits the renewal and map models, whose
    fractions can be exactly 0 or 1; for discretized Brownian motion use one
    step, dt/t_m.
    """
    arr = np.sort(np.asarray(samples, dtype=float))
    if arr.size == 0:
        raise DomainError("cannot build an empirical distribution from no samples")
    if arr[0] < 0.0 or arr[-1] > 1.0:
        raise DomainError("occupation fractions must lie in [0, 1]")
    if atom_tol < 0.0:
        raise DomainError(f"atom_tol must be >= 0, got {atom_tol!r}")
    n = arr.size
    mass0 = np.count_nonzero(arr <= atom_tol) / n
    mass1 = np.count_nonzero(arr >= 1.0 - atom_tol) / n
    return EmpiricalDistribution(arr, atom_tol, mass0, mass1)


def dkw_epsilon(n: int, delta: float = 0.05) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at confidence 1 - delta."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n!r}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


@dataclass
class ComparisonReport:
    """Verdict of one empirical-vs-theory comparison."""

    ks_distance: float
    dkw_epsilon: float
    model_allowance: float
    atom_errors: tuple[float, float]
    passed: bool
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ks_distance": self.ks_distance,
            "dkw_epsilon": self.dkw_epsilon,
            "model_allowance": self.model_allowance,
            "atom_error_at_0": self.atom_errors[0],
            "atom_error_at_1": self.atom_errors[1],
            "passed": self.passed,
            "metadata": self.metadata,
        }


def ks_against(emp: EmpiricalDistribution, theory: TheoreticalCdf,
               delta: float = 0.05, model_allowance: float = 0.0,
               metadata: dict | None = None) -> ComparisonReport:
    """Sup-norm distance between the ECDF and a theory CDF with atoms.

    Both one-sided limits are evaluated at every sample point plus the two
    atom locations, which is where the sup of a step-vs-jump comparison can
    live.  Passing means ks <= DKW(delta, n) + model_allowance.
    """
    if model_allowance < 0.0:
        raise DomainError(f"model_allowance must be >= 0, got {model_allowance!r}")
    pts = np.unique(np.concatenate((emp.fractions, [0.0, 1.0])))
    f_emp = emp.cdf(pts)
    f_emp_minus = emp.cdf_minus(pts)
    f_th = np.asarray(theory.cdf(pts))
    f_th_minus = np.asarray(theory.cdf_minus(pts))
    ks = float(max(np.max(np.abs(f_emp - f_th)), np.max(np.abs(f_emp_minus - f_th_minus))))

    eps = dkw_epsilon(emp.n, delta)
    report = ComparisonReport(
        ks_distance=ks,
        dkw_epsilon=eps,
        model_allowance=model_allowance,
        atom_errors=(abs(emp.mass_at_0 - theory.atom_at_0),
                     abs(emp.mass_at_1 - theory.atom_at_1)),
        passed=ks <= eps + model_allowance,
        metadata={"n": emp.n, "delta": delta, "theory": dict(theory.params),
                  **(metadata or {})},
    )
    return report


def histogram(emp: EmpiricalDistribution, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Density histogram of the non-atom samples on equal-width bins over [0, 1].

    Normalized against the full sample count, so the bar heights integrate to
    1 - mass_at_0 - mass_at_1 and overlay directly on the continuous part of
    the theory density; the atoms are reported by the distribution itself.
    """
    if bins < 2:
        raise DomainError(f"need at least 2 bins, got {bins!r}")
    x = emp.fractions
    interior = x[(x > emp.atom_tol) & (x < 1.0 - emp.atom_tol)]
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(interior, bins=edges)
    width = 1.0 / bins
    density = counts / (emp.n * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, density
