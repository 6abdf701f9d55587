"""Monte Carlo generators: law checks, exactness, determinism, edge paths."""

import math

import numpy as np
import pytest

from occutime import (
    BrownianConfig,
    DomainError,
    MapConfig,
    MapParams,
    RenewalConfig,
    TailIndex,
    WindowSpec,
    build_empirical,
    dkw_epsilon,
    iterate_map,
    ks_against,
    lamperti_pdf,
    sample_brownian_occupation,
    sample_ensemble,
    sample_map_occupation,
    sample_renewal_occupation,
)
from occutime.aging import aging_arcsine_table, arcsine_table

from conftest import MASTER_SEED


class TestConfigs:
    def test_window_spec(self):
        w = WindowSpec(100.0, 10.0)
        assert w.r == pytest.approx(10.0)
        with pytest.raises(DomainError):
            WindowSpec(-1.0, 10.0)
        with pytest.raises(DomainError):
            WindowSpec(0.0, 0.0)

    def test_brownian_config(self):
        cfg = BrownianConfig.for_window(WindowSpec(1000.0, 1000.0), 4000)
        assert cfg.steps_total == 10_000  # floored at the minimum
        assert cfg.n_window == 5_000
        assert cfg.dt == pytest.approx(2000.0 / 10_000)
        with pytest.raises(DomainError):
            BrownianConfig(WindowSpec(0.0, 1.0), 9_999)

    def test_renewal_config_derived_asymmetry(self):
        cfg = RenewalConfig(TailIndex(0.5), 1.0, 4.0, WindowSpec(0.0, 10.0))
        assert cfg.beta == pytest.approx(2.0)
        assert cfg.p_plus == pytest.approx(1.0 / 3.0)
        assert cfg.asymmetry.p_minus == pytest.approx(2.0 / 3.0)
        with pytest.raises(DomainError):
            RenewalConfig(TailIndex(0.5), 0.0, 1.0, WindowSpec(0.0, 10.0))

    def test_map_config(self):
        with pytest.raises(DomainError):
            MapConfig(MapParams(0.6, TailIndex(0.5)), t_a=0, t_m=0)
        with pytest.raises(DomainError):
            MapConfig(MapParams(0.6, TailIndex(0.5)), t_a=-1, t_m=10)


class TestBrownian:
    def test_forced_positive_drift_gives_fraction_one(self):
        cfg = BrownianConfig(WindowSpec(0.0, 1.0), 10_000, drift=1e4)
        sample = sample_brownian_occupation(cfg, seed=1)
        assert sample.fraction == 1.0
        assert sample.model == "bm"

    def test_deterministic_per_seed(self):
        cfg = BrownianConfig(WindowSpec(10.0, 10.0), 10_000)
        a = sample_brownian_occupation(cfg, seed=5, index=3)
        b = sample_brownian_occupation(cfg, seed=5, index=3)
        assert a == b

    def test_classical_arcsine_law(self):
        # no aging: the occupation fraction follows the arcsine law
        cfg = BrownianConfig(WindowSpec(0.0, 1.0), 100_000)
        result = sample_ensemble(cfg, 10_000, MASTER_SEED)
        emp = build_empirical(result.fractions, atom_tol=1.0 / cfg.n_window)
        report = ks_against(emp, arcsine_table())
        assert report.ks_distance <= 0.02

    def test_refinement_stability(self, fig2_ensembles):
        # halving dt moves the KS distance by less than the DKW width
        cfg_coarse, coarse = fig2_ensembles[1.0]
        cfg_fine = BrownianConfig(cfg_coarse.window, 2 * cfg_coarse.steps_total)
        fine = sample_ensemble(cfg_fine, 10_000, MASTER_SEED)
        table = aging_arcsine_table(1.0)
        ks_coarse = ks_against(
            build_empirical(coarse.fractions, atom_tol=1.0 / cfg_coarse.n_window),
            table).ks_distance
        ks_fine = ks_against(
            build_empirical(fine.fractions, atom_tol=1.0 / cfg_fine.n_window),
            table).ks_distance
        assert abs(ks_coarse - ks_fine) < dkw_epsilon(10_000)


class TestRenewal:
    def test_single_covering_duration_gives_fraction_one(self):
        cfg = RenewalConfig(TailIndex(0.5), 1e12, 1.0, WindowSpec(5.0, 5.0),
                            initial_state_prob_plus=1.0)
        sample = sample_renewal_occupation(cfg, seed=0)
        assert sample.fraction == 1.0

    def test_single_covering_minus_duration_gives_zero(self):
        cfg = RenewalConfig(TailIndex(0.5), 1.0, 1e12, WindowSpec(5.0, 5.0),
                            initial_state_prob_plus=0.0)
        assert sample_renewal_occupation(cfg, seed=0).fraction == 0.0

    def test_pareto_tail(self):
        # durations tau = scale * U**(-1/alpha) must have the exact power tail
        from occutime.simulate import _stream
        for alpha in (0.5, 0.7):
            rng, _ = _stream(11, 0)
            tau = 1.0 * (1.0 - rng.random(1_000_000)) ** (-1.0 / alpha)
            eps = dkw_epsilon(1_000_000)
            for x in (1.0, 2.0, 10.0, 100.0):
                tail_emp = np.count_nonzero(tau > x) / tau.size
                assert abs(tail_emp - x ** -alpha) <= eps

    def test_asymmetric_scales_shift_the_mean(self):
        # beta = (scale_minus/scale_plus)**alpha = 2 favors the minus state
        cfg = RenewalConfig(TailIndex(0.5), 1.0, 4.0, WindowSpec(0.0, 10_000.0))
        result = sample_ensemble(cfg, 4000, MASTER_SEED)
        from scipy.integrate import quad
        mean_theory, _ = quad(lambda s: s * lamperti_pdf(0.5, cfg.beta, s), 0.0, 1.0,
                              points=[0.5], limit=200)
        assert mean_theory == pytest.approx(cfg.p_plus, abs=1e-6)
        assert result.fractions.mean() < 0.5
        assert result.fractions.mean() == pytest.approx(mean_theory, abs=0.02)

    def test_fraction_stays_in_unit_interval(self):
        cfg = RenewalConfig(TailIndex(0.7), 1.0, 1.0, WindowSpec(50.0, 5.0))
        result = sample_ensemble(cfg, 500, 3)
        assert np.all(result.fractions >= 0.0) and np.all(result.fractions <= 1.0)


class TestIterateMap:
    PARAMS = MapParams(0.6, TailIndex(0.5))

    def test_indifferent_fixed_point_at_zero(self):
        x = 1e-12
        assert abs(iterate_map(self.PARAMS, x) - x) < 1e-12

    def test_left_branch_at_c_hits_one(self):
        assert iterate_map(self.PARAMS, 0.6) == 1.0

    def test_monotone_on_each_branch(self):
        left = [iterate_map(self.PARAMS, x) for x in np.linspace(1e-6, 0.6, 100)]
        right = [iterate_map(self.PARAMS, x) for x in np.linspace(0.600001, 0.999999, 100)]
        assert all(b > a for a, b in zip(left, left[1:]))
        assert all(b > a for a, b in zip(right, right[1:]))

    def test_branches_push_outward(self):
        xs = np.linspace(1e-9, 1.0 - 1e-9, 10_000)
        for x in xs:
            out = iterate_map(self.PARAMS, float(x))
            if x <= 0.6:
                assert out >= x
            else:
                assert out <= x

    def test_trapping_near_zero(self):
        # an orbit started deep in the left trap stays in the plus state
        x = 1e-10
        for _ in range(1000):
            x = iterate_map(self.PARAMS, x)
        assert x <= 0.6  # so a window spent there has fraction 1

    def test_domain(self):
        for x in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(DomainError):
                iterate_map(self.PARAMS, x)


class TestMapSampling:
    def test_histogram_tracks_stationary_law_at_small_r(self, map_ensemble):
        # at r = 0.01 the stationary generalized arcsine density is recovered
        # away from the endpoints; the edge bins sit below it because aging
        # converts endpoint mass into the atoms at 0 and 1
        from occutime import beta_of_map, build_empirical, histogram, lamperti_cdf

        cfg, result = map_ensemble
        beta = beta_of_map(cfg.params)
        emp = build_empirical(result.fractions)
        centers, density = histogram(emp, 20)
        width = 1.0 / 20
        for center, dens in zip(centers[1:-1], density[1:-1]):
            lo, hi = center - width / 2, center + width / 2
            p_true = lamperti_cdf(0.5, beta, hi) - lamperti_cdf(0.5, beta, lo)
            sigma = math.sqrt(p_true * (1.0 - p_true) / emp.n)
            assert abs(dens * width - p_true) < 4.0 * sigma + 0.002
        for center, dens in ((centers[0], density[0]), (centers[-1], density[-1])):
            lo = max(0.0, center - width / 2)
            hi = min(1.0, center + width / 2)
            p_true = lamperti_cdf(0.5, beta, hi) - lamperti_cdf(0.5, beta, lo)
            assert dens * width < p_true

    def test_sample_and_diagnostics(self):
        cfg = MapConfig(MapParams(0.6, TailIndex(0.5)), t_a=10, t_m=2000)
        result = sample_ensemble(cfg, 300, 5)
        assert np.all((result.fractions >= 0.0) & (result.fractions <= 1.0))
        assert result.diagnostics["absorbed_restarts"] == 0
        assert result.diagnostics["absorbed_fraction"] == 0.0

    def test_single_sample_matches_ensemble_entry(self):
        cfg = MapConfig(MapParams(0.6, TailIndex(0.5)), t_a=5, t_m=500)
        ens = sample_ensemble(cfg, 8, 99)
        one = sample_map_occupation(cfg, 99, index=3)
        assert one.fraction == ens.fractions[3]
        assert one.seed == int(ens.seeds[3])


class TestDeterminism:
    @pytest.mark.parametrize("make_cfg,n", [
        (lambda: BrownianConfig(WindowSpec(50.0, 50.0), 10_000), 300),
        (lambda: RenewalConfig(TailIndex(0.5), 1.0, 1.0, WindowSpec(2000.0, 2000.0)), 1200),
        (lambda: MapConfig(MapParams(0.6, TailIndex(0.5)), t_a=100, t_m=2000), 3000),
    ])
    def test_worker_count_invariance(self, make_cfg, n):
        cfg = make_cfg()
        serial = sample_ensemble(cfg, n, 7, workers=1)
        pooled = sample_ensemble(cfg, n, 7, workers=3)
        assert np.array_equal(serial.fractions, pooled.fractions)
        assert np.array_equal(serial.seeds, pooled.seeds)

    def test_unknown_config_rejected(self):
        with pytest.raises(DomainError):
            sample_ensemble(object(), 10, 0)
