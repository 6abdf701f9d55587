"""Session-scoped Monte Carlo ensembles shared by module tests and acceptance."""

import numpy as np
import pytest

from occutime import (
    BrownianConfig,
    MapConfig,
    MapParams,
    RenewalConfig,
    TailIndex,
    WindowSpec,
    sample_ensemble,
)

MASTER_SEED = 2024


@pytest.fixture(scope="session")
def fig2_ensembles():
    """Aged Brownian ensembles at t_m = 1e3, N = 1e4, r in {0.1, 1, 10}."""
    out = {}
    for r in (0.1, 1.0, 10.0):
        cfg = BrownianConfig.for_window(WindowSpec(r * 1000.0, 1000.0), 4000)
        out[r] = (cfg, sample_ensemble(cfg, 10_000, MASTER_SEED))
    return out


@pytest.fixture(scope="session")
def renewal_ensemble():
    """Symmetric alpha = 1/2 renewal ensemble at t_m = 1e4, r = 1, N = 1e4."""
    cfg = RenewalConfig(TailIndex(0.5), 1.0, 1.0, WindowSpec(10_000.0, 10_000.0))
    return cfg, sample_ensemble(cfg, 10_000, MASTER_SEED)


@pytest.fixture(scope="session")
def map_ensemble():
    """Skew map ensemble: alpha = 1/2, c = 0.6, t_m = 1e5, r = 0.01, N = 1e4."""
    cfg = MapConfig(MapParams(0.6, TailIndex(0.5)), t_a=1000, t_m=100_000)
    return cfg, sample_ensemble(cfg, 10_000, MASTER_SEED)


def inverse_cdf_sample(table, u):
    """Inverse-transform samples from a TheoreticalCdf, atoms included.

    The lookup grid is sin^2-spaced so the inversion stays sharp where the
    densities diverge at the endpoints.
    """
    u = np.asarray(u)
    grid = np.sin(np.linspace(0.0, np.pi / 2.0, 8193)) ** 2
    cdf = np.asarray(table.cdf(grid))
    s = np.interp(u, cdf, grid)
    s[u <= table.atom_at_0] = 0.0
    s[u > 1.0 - table.atom_at_1] = 1.0
    return s
