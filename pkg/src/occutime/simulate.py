"""Monte Carlo generators for aged occupation fractions.

Three models: a time-discretized Brownian motion, a two-state renewal process
with Pareto durations (exact interval arithmetic, no time grid), and the skew
intermittent interval map.  Each trajectory owns an RNG stream derived from
(master seed, trajectory index) through numpy's SeedSequence spawning, so an
ensemble is reproducible bit-for-bit regardless of worker count, chunking, or
execution order.  Ensembles are processed in fixed-size chunks; chunk results
are keyed by index and merged order-insensitively.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dists import AsymmetryParams, MapParams, TailIndex
from .errors import DomainError

__all__ = [
    "WindowSpec",
    "OccupationSample",
    "BrownianConfig",
    "RenewalConfig",
    "MapConfig",
    "EnsembleResult",
    "iterate_map",
    "sample_brownian_occupation",
    "sample_renewal_occupation",
    "sample_map_occupation",
    "sample_ensemble",
]

# chunk widths are fixed constants: they define the unit of parallel work and
# must not depend on the worker count, or determinism across pool sizes dies
_CHUNK_SIZE = {"bm": 128, "renewal": 512, "map": 2048}

_MAX_RESTARTS = 256


@dataclass(frozen=True)
class WindowSpec:
    """Measurement window [t_a, t_a + t_m]: aging time then measurement time."""

    t_a: float
    t_m: float

    def __post_init__(self):
        if not (math.isfinite(self.t_a) and self.t_a >= 0.0):
            raise DomainError(f"aging time must be finite and >= 0, got {self.t_a!r}")
        if not (math.isfinite(self.t_m) and self.t_m > 0.0):
            raise DomainError(f"measurement time must be > 0, got {self.t_m!r}")

    @property
    def r(self) -> float:
        return self.t_a / self.t_m


@dataclass(frozen=True)
class OccupationSample:
    """One trajectory's occupation fraction of the window, with provenance."""

    fraction: float
    model: str
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise DomainError(f"occupation fraction must lie in [0, 1], got {self.fraction!r}")


@dataclass(frozen=True)
class BrownianConfig:
    """Discretized Brownian motion on [0, t_a + t_m] with steps_total steps.

    The window is the last ``n_window = steps_total - round(t_a/dt)`` steps;
    the fraction is the share of those steps with B > 0 (B = 0 counts as
    not-positive).  ``drift`` is a validation hook: a strong positive drift
    forces fraction 1.
    """

    window: WindowSpec
    steps_total: int
    drift: float = 0.0

    def __post_init__(self):
        if self.steps_total < 10_000:
            raise DomainError(f"steps_total must be >= 10000, got {self.steps_total!r}")

    @property
    def dt(self) -> float:
        return (self.window.t_a + self.window.t_m) / self.steps_total

    @property
    def n_window(self) -> int:
        return self.steps_total - round(self.window.t_a / self.dt)

    @staticmethod
    def for_window(window: WindowSpec, steps_per_window: int = 4000) -> "BrownianConfig":
        """Steps so that dt = t_m / steps_per_window, floored at 10^4 total."""
        total = max(10_000, round(steps_per_window * (window.t_a + window.t_m) / window.t_m))
        return BrownianConfig(window=window, steps_total=total)


@dataclass(frozen=True)
class RenewalConfig:
    """Two-state renewal process with Pareto durations tau = scale * U**(-1/alpha).

    Pure power-law durations make the tail amplitudes exactly
    alpha * scale**alpha, so the asymmetry beta = (scale_minus/scale_plus)**alpha
    and the state probabilities are exact rather than asymptotic.  The first
    duration follows the same law; the initial state is + with probability
    ``initial_state_prob_plus`` (defaults to the stationary p_plus).
    """

    alpha: TailIndex
    scale_plus: float
    scale_minus: float
    window: WindowSpec
    initial_state_prob_plus: float | None = None

    def __post_init__(self):
        if not (self.scale_plus > 0.0 and self.scale_minus > 0.0):
            raise DomainError("duration scales must be positive")
        p0 = self.initial_state_prob_plus
        if p0 is not None and not 0.0 <= p0 <= 1.0:
            raise DomainError(f"initial state probability must lie in [0, 1], got {p0!r}")

    @property
    def beta(self) -> float:
        return (self.scale_minus / self.scale_plus) ** self.alpha.alpha

    @property
    def p_plus(self) -> float:
        return 1.0 / (1.0 + self.beta)

    @property
    def asymmetry(self) -> AsymmetryParams:
        return AsymmetryParams.from_beta(self.beta)

    @property
    def p0_plus(self) -> float:
        return self.p_plus if self.initial_state_prob_plus is None else self.initial_state_prob_plus


@dataclass(frozen=True)
class MapConfig:
    """Skew intermittent map run: t_a unobserved iterations, then t_m counted ones.

    The initial point is uniform on (0, 1); the + state is x in [0, c].
    """

    params: MapParams
    t_a: int
    t_m: int

    def __post_init__(self):
        if self.t_m < 1:
            raise DomainError(f"t_m must be >= 1, got {self.t_m!r}")
        if self.t_a < 0:
            raise DomainError(f"t_a must be >= 0, got {self.t_a!r}")


@dataclass
class EnsembleResult:
    """Occupation fractions for trajectory indices 0..n-1 plus diagnostics."""

    model: str
    fractions: np.ndarray
    seeds: np.ndarray
    master_seed: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.fractions.size


# ---------------------------------------------------------------------------
# per-trajectory RNG streams
# ---------------------------------------------------------------------------

def _stream(master_seed: int, index: int) -> tuple[np.random.Generator, int]:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    fingerprint = int(ss.generate_state(1, np.uint64)[0])
    return np.random.default_rng(ss), fingerprint


# ---------------------------------------------------------------------------
# Brownian motion
# ---------------------------------------------------------------------------

def _brownian_fraction(rng: np.random.Generator, cfg: BrownianConfig) -> float:
    dt = cfg.dt
    increments = rng.standard_normal(cfg.steps_total) * math.sqrt(dt)
    if cfg.drift != 0.0:
        increments += cfg.drift * dt
    path = np.cumsum(increments)
    window = path[cfg.steps_total - cfg.n_window:]
    return np.count_nonzero(window > 0.0) / cfg.n_window


def sample_brownian_occupation(cfg: BrownianConfig, seed: int, index: int = 0) -> OccupationSample:
    """Occupation fraction of one discretized Brownian trajectory."""
    rng, fingerprint = _stream(seed, index)
    return OccupationSample(_brownian_fraction(rng, cfg), "bm", fingerprint)


# ---------------------------------------------------------------------------
# renewal process
# ---------------------------------------------------------------------------

def _renewal_fraction(rng: np.random.Generator, cfg: RenewalConfig) -> float:
    a = cfg.alpha.alpha
    t_a = cfg.window.t_a
    horizon = t_a + cfg.window.t_m
    state_plus = bool(rng.random() < cfg.p0_plus)

    # alternating scales; an even block size keeps the parity stable
    block = 128
    scales = np.empty(block)
    scales[0::2] = cfg.scale_plus if state_plus else cfg.scale_minus
    scales[1::2] = cfg.scale_minus if state_plus else cfg.scale_plus
    plus_sel = slice(0, block, 2) if state_plus else slice(1, block, 2)

    t = 0.0
    overlap = 0.0
    while t < horizon:
        # 1 - U keeps the draw in (0, 1]; U**(-1/a) would blow up at U = 0
        durations = scales * (1.0 - rng.random(block)) ** (-1.0 / a)
        ends = t + np.cumsum(durations)
        starts = np.empty(block)
        starts[0] = t
        starts[1:] = ends[:-1]
        lo = np.maximum(starts[plus_sel], t_a)
        hi = np.minimum(ends[plus_sel], horizon)
        overlap += float(np.sum(np.maximum(hi - lo, 0.0)))
        t = float(ends[-1])
    return min(1.0, max(0.0, overlap / cfg.window.t_m))


def sample_renewal_occupation(cfg: RenewalConfig, seed: int, index: int = 0) -> OccupationSample:
    """Occupation fraction of the + state for one renewal trajectory (exact overlaps)."""
    rng, fingerprint = _stream(seed, index)
    return OccupationSample(_renewal_fraction(rng, cfg), "renewal", fingerprint)


# ---------------------------------------------------------------------------
# intermittent map
# ---------------------------------------------------------------------------

def iterate_map(params: MapParams, x: float) -> float:
    """One step of the skew intermittent map; left branch on [0, c], right on (c, 1].

    Both endpoints are indifferent fixed points, so double precision cannot
    follow an orbit arbitrarily close to them: a result that rounds onto 0 or
    1 (the left branch maps x = c to exactly 1) is numerically absorbed, and
    trajectory drivers respond by resampling the trajectory start.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"map state must lie in (0, 1), got {x!r}")
    c = params.c
    expo = 1.0 + 1.0 / params.alpha.alpha
    if x <= c:
        return x + (1.0 - c) * (x / c) ** expo
    return x - c * ((1.0 - x) / (1.0 - c)) ** expo


def _map_step_array(x: np.ndarray, c: float, expo: float) -> np.ndarray:
    out = np.empty_like(x)
    left = x <= c
    xl = x[left]
    xr = x[~left]
    out[left] = xl + (1.0 - c) * (xl / c) ** expo
    out[~left] = xr - c * ((1.0 - xr) / (1.0 - c)) ** expo
    return out


def _draw_open_unit(rng: np.random.Generator) -> float:
    x = rng.random()
    while x == 0.0:
        x = rng.random()
    return x


def _map_run_single(rng: np.random.Generator, cfg: MapConfig) -> tuple[float, int]:
    """One trajectory with restart-on-absorption; returns (fraction, restarts)."""
    c = cfg.params.c
    expo = 1.0 + 1.0 / cfg.params.alpha.alpha
    restarts = 0
    while restarts < _MAX_RESTARTS:
        x = np.array([_draw_open_unit(rng)])
        ok = True
        for _ in range(cfg.t_a):
            x = _map_step_array(x, c, expo)
            if not 0.0 < x[0] < 1.0:
                ok = False
                break
        count = 0
        if ok:
            for _ in range(cfg.t_m):
                x = _map_step_array(x, c, expo)
                if not 0.0 < x[0] < 1.0:
                    ok = False
                    break
                if x[0] <= c:
                    count += 1
        if ok:
            return count / cfg.t_m, restarts
        restarts += 1
    raise DomainError(f"map trajectory absorbed {_MAX_RESTARTS} times in a row; check parameters")


def sample_map_occupation(cfg: MapConfig, seed: int, index: int = 0) -> OccupationSample:
    """Occupation fraction of [0, c] over the counted window of one map orbit."""
    rng, fingerprint = _stream(seed, index)
    fraction, _ = _map_run_single(rng, cfg)
    return OccupationSample(fraction, "map", fingerprint)


def _map_chunk(cfg: MapConfig, master_seed: int, start: int, stop: int):
    width = stop - start
    rngs = []
    seeds = np.empty(width, dtype=np.uint64)
    x = np.empty(width)
    for k in range(width):
        rng, fingerprint = _stream(master_seed, start + k)
        rngs.append(rng)
        seeds[k] = fingerprint
        x[k] = _draw_open_unit(rng)

    c = cfg.params.c
    expo = 1.0 + 1.0 / cfg.params.alpha.alpha
    counts = np.zeros(width, dtype=np.int64)
    absorbed = np.zeros(width, dtype=bool)

    for step in range(cfg.t_a + cfg.t_m):
        x = _map_step_array(x, c, expo)
        bad = (x <= 0.0) | (x >= 1.0)
        if bad.any():
            absorbed |= bad
            x[bad] = 0.5  # placeholder; absorbed trajectories are rerun below
        if step >= cfg.t_a:
            counts += x <= c

    fractions = counts / cfg.t_m
    restarts = 0
    for k in np.nonzero(absorbed)[0]:
        # rerun from the trajectory's own stream; its earlier draws are spent
        fractions[k], extra = _map_run_single(rngs[k], cfg)
        restarts += 1 + extra
    return fractions, seeds, {"absorbed_restarts": restarts}


# ---------------------------------------------------------------------------
# ensemble driver
# ---------------------------------------------------------------------------

def _model_of(cfg) -> str:
    if isinstance(cfg, BrownianConfig):
        return "bm"
    if isinstance(cfg, RenewalConfig):
        return "renewal"
    if isinstance(cfg, MapConfig):
        return "map"
    raise DomainError(f"unknown model config {type(cfg).__name__}")


def _scalar_chunk(cfg, master_seed: int, start: int, stop: int, fraction_fn):
    width = stop - start
    fractions = np.empty(width)
    seeds = np.empty(width, dtype=np.uint64)
    for k in range(width):
        rng, fingerprint = _stream(master_seed, start + k)
        fractions[k] = fraction_fn(rng, cfg)
        seeds[k] = fingerprint
    return fractions, seeds, {}


def _run_chunk(cfg, master_seed: int, start: int, stop: int):
    model = _model_of(cfg)
    if model == "bm":
        return _scalar_chunk(cfg, master_seed, start, stop, _brownian_fraction)
    if model == "renewal":
        return _scalar_chunk(cfg, master_seed, start, stop, _renewal_fraction)
    return _map_chunk(cfg, master_seed, start, stop)


def sample_ensemble(cfg, n: int, seed: int, workers: int = 1) -> EnsembleResult:
    """Draw n occupation fractions for trajectory indices 0..n-1.

    ``workers`` only fans the fixed-size chunks over processes; results are
    identical for any worker count, including 1 (in-process).
    """
    if n < 1:
        raise DomainError(f"ensemble size must be >= 1, got {n!r}")
    model = _model_of(cfg)
    chunk = _CHUNK_SIZE[model]
    bounds = [(a, min(a + chunk, n)) for a in range(0, n, chunk)]

    if workers <= 1 or len(bounds) == 1:
        parts = [_run_chunk(cfg, seed, a, b) for a, b in bounds]
    else:
        parts = [None] * len(bounds)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_chunk, cfg, seed, a, b): k
                       for k, (a, b) in enumerate(bounds)}
            for fut, k in futures.items():
                parts[k] = fut.result()

    fractions = np.concatenate([p[0] for p in parts])
    seeds = np.concatenate([p[1] for p in parts])
    diagnostics: dict = {}
    for _, _, diag in parts:
        for key, val in diag.items():
            diagnostics[key] = diagnostics.get(key, 0) + val
    if model == "map":
        diagnostics.setdefault("absorbed_restarts", 0)
        diagnostics["absorbed_fraction"] = diagnostics["absorbed_restarts"] / n
    return EnsembleResult(model, fractions, seeds, seed, diagnostics)
