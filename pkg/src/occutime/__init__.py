"""Occupation-time statistics lab.

Theory (closed forms and quadrature) for the aged arcsine law of Brownian
motion and its renewal-process generalization, Monte Carlo samplers for the
three generative models, and KS/DKW machinery to compare the two sides.
"""

__version__ = "0.1.0"

from .aging import (
    aging_arcsine_cdf,
    aging_arcsine_pdf,
    aging_arcsine_table,
    aging_lamperti_cdf,
    aging_lamperti_pdf,
    aging_lamperti_table,
    arcsine_table,
    lamperti_table,
    tail_constant_c,
)
from .dists import (
    AgingRatio,
    AsymmetryParams,
    MapParams,
    TailIndex,
    arcsine_cdf,
    arcsine_pdf,
    atom_q_bm,
    atom_q_renewal,
    beta_of_map,
    fpt_density,
    frt_density_bm,
    frt_density_renewal,
    lamperti_cdf,
    lamperti_pdf,
    propagator,
)
from .errors import DomainError, QuadratureError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, TheoreticalCdf, adaptive_quad
from .simulate import (
    BrownianConfig,
    EnsembleResult,
    MapConfig,
    OccupationSample,
    RenewalConfig,
    WindowSpec,
    iterate_map,
    sample_brownian_occupation,
    sample_ensemble,
    sample_map_occupation,
    sample_renewal_occupation,
)
from .stats import (
    ComparisonReport,
    EmpiricalDistribution,
    build_empirical,
    dkw_epsilon,
    histogram,
    ks_against,
)
