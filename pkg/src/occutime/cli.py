"""Command-line interface: theory tables, simulation runs, comparisons, figures.

Subcommands
-----------
theory     write an (s, pdf, cdf) table for one of the four laws as CSV
simulate   draw an ensemble of occupation fractions, write CSV + manifest
compare    KS-compare a sample CSV against a theory CDF, write a JSON report
reproduce  run a pinned figure preset and emit a bundle of tables

Exit codes: 0 success, 1 usage error, 2 numeric (quadrature) failure.
Every file-producing run writes a manifest sufficient to reproduce it
bit-for-bit; CSV floats use repr so rewrites are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .aging import (
    aging_arcsine_table,
    aging_lamperti_table,
    arcsine_table,
    lamperti_table,
)
from .dists import AsymmetryParams, MapParams, TailIndex, beta_of_map
from .errors import DomainError, QuadratureError
from .quadrature import QuadratureConfig, TheoreticalCdf
from .simulate import (
    BrownianConfig,
    EnsembleResult,
    MapConfig,
    RenewalConfig,
    WindowSpec,
    sample_ensemble,
)
from .stats import build_empirical, histogram, ks_against

THEORY_MODELS = ("arcsine", "lamperti", "aging-arcsine", "aging-lamperti")
SIM_MODELS = ("bm", "renewal", "map")
FIGURES = ("fig2", "fig3a", "fig3b")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for numeric
    # failures, so route usage problems through our own exception instead
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# small IO helpers
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


def _write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _read_config(path: Path) -> dict:
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    mapping = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def _pick(flag_value, config: dict, key: str, default, cast):
    if flag_value is not None:
        return flag_value
    if key in config:
        try:
            return cast(config[key])
        except ValueError as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
    return default


def _write_theory_csv(stream, table: TheoreticalCdf, grid: int) -> None:
    for key in sorted(table.params):
        stream.write(f"# {key} = {table.params[key]}\n")
    stream.write(f"# atom_0 = {_fmt(table.atom_at_0)}\n")
    stream.write(f"# atom_1 = {_fmt(table.atom_at_1)}\n")
    stream.write("s,pdf,cdf\n")
    for s in np.linspace(0.0, 1.0, grid):
        s = float(s)
        pdf = float("nan") if s <= 0.0 or s >= 1.0 else table.pdf(s)
        stream.write(f"{_fmt(s)},{_fmt(pdf)},{_fmt(table.cdf(s))}\n")


def _write_samples_csv(path: Path, result: EnsembleResult) -> None:
    with path.open("w") as stream:
        stream.write("index,seed,fraction\n")
        for i, (seed, fraction) in enumerate(zip(result.seeds, result.fractions)):
            stream.write(f"{i},{int(seed)},{_fmt(fraction)}\n")


def _read_samples_csv(path: Path) -> np.ndarray:
    if not path.is_file():
        raise UsageError(f"samples file not found: {path}")
    fractions = []
    with path.open() as stream:
        header = stream.readline().strip().split(",")
        try:
            col = header.index("fraction")
        except ValueError:
            raise UsageError(f"{path}: no 'fraction' column in header {header!r}")
        for line in stream:
            line = line.strip()
            if line:
                fractions.append(float(line.split(",")[col]))
    if not fractions:
        raise UsageError(f"{path}: no samples")
    return np.asarray(fractions)


# ---------------------------------------------------------------------------
# theory construction shared by theory/compare/reproduce
# ---------------------------------------------------------------------------

def _build_theory(model: str, *, alpha=None, beta=None, p_plus=None, r=None,
                  c=None, qcfg: QuadratureConfig) -> TheoreticalCdf:
    if model == "arcsine":
        return arcsine_table()
    if model == "lamperti":
        if alpha is None or beta is None:
            raise UsageError("lamperti needs --alpha and --beta")
        return lamperti_table(alpha, beta)
    if model == "aging-arcsine":
        if r is None:
            raise UsageError("aging-arcsine needs --r > 0")
        return aging_arcsine_table(r, qcfg)
    if model == "aging-lamperti":
        if alpha is None or r is None:
            raise UsageError("aging-lamperti needs --alpha and --r")
        if beta is None and c is not None:
            beta = beta_of_map(MapParams(c, TailIndex(alpha)))
        if beta is None and p_plus is None:
            raise UsageError("aging-lamperti needs --beta, --p-plus, or --c")
        if beta is not None and p_plus is not None:
            params = AsymmetryParams(beta=beta, p_plus=p_plus)
        elif beta is not None:
            params = AsymmetryParams.from_beta(beta)
        else:
            params = AsymmetryParams.from_p_plus(p_plus)
        return aging_lamperti_table(alpha, params, r, qcfg)
    raise UsageError(f"unknown theory model {model!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_theory(args, argv) -> int:
    config = _read_config(Path(args.config)) if args.config else {}
    alpha = _pick(args.alpha, config, "alpha", None, float)
    beta = _pick(args.beta, config, "beta", None, float)
    p_plus = _pick(args.p_plus, config, "p_plus", None, float)
    r = _pick(args.r, config, "r", None, float)
    c = _pick(args.c, config, "c", None, float)
    grid = _pick(args.grid, config, "grid", 201, int)
    if grid < 2:
        raise UsageError(f"--grid must be >= 2, got {grid}")

    start = time.perf_counter()
    qcfg = QuadratureConfig(grid_size=max(grid, 64))
    table = _build_theory(args.model, alpha=alpha, beta=beta, p_plus=p_plus,
                          r=r, c=c, qcfg=qcfg)
    if args.out is None:
        _write_theory_csv(sys.stdout, table, grid)
        return 0
    out = Path(args.out)
    with out.open("w") as stream:
        _write_theory_csv(stream, table, grid)
    _write_manifest(_manifest_path(out), {
        "tool": "occutime",
        "version": __version__,
        "subcommand": "theory",
        "argv": argv,
        "params": {"model": args.model, "alpha": alpha, "beta": beta,
                   "p_plus": p_plus, "r": r, "c": c, "grid": grid},
        "outputs": [str(out)],
        "wall_time_s": time.perf_counter() - start,
    })
    print(f"wrote {out}")
    return 0


def _sim_params_from_args(args, config: dict) -> dict:
    params = {"model": args.model}
    params["tm"] = _pick(args.tm, config, "tm", None, float)
    if params["tm"] is None or params["tm"] <= 0:
        raise UsageError("simulate needs --tm > 0")
    params["r"] = _pick(args.r, config, "r", 0.0, float)
    params["n"] = _pick(args.n, config, "n", 10000, int)
    if params["n"] < 1:
        raise UsageError(f"--n must be >= 1, got {params['n']}")
    if args.model == "bm":
        params["steps_per_window"] = _pick(args.steps_per_window, config,
                                           "steps_per_window", 4000, int)
        params["steps_total"] = _pick(args.steps_total, config, "steps_total", None, int)
        params["drift"] = _pick(args.drift, config, "drift", 0.0, float)
    elif args.model == "renewal":
        params["alpha"] = _pick(args.alpha, config, "alpha", None, float)
        if params["alpha"] is None:
            raise UsageError("simulate renewal needs --alpha")
        params["scale_plus"] = _pick(args.scale_plus, config, "scale_plus", 1.0, float)
        params["scale_minus"] = _pick(args.scale_minus, config, "scale_minus", 1.0, float)
        params["p0_plus"] = _pick(args.p0_plus, config, "p0_plus", None, float)
    else:
        params["alpha"] = _pick(args.alpha, config, "alpha", None, float)
        params["c"] = _pick(args.c, config, "c", None, float)
        if params["alpha"] is None or params["c"] is None:
            raise UsageError("simulate map needs --alpha and --c")
    return params


def _sim_config(params: dict):
    model = params["model"]
    if model == "bm":
        window = WindowSpec(t_a=params["r"] * params["tm"], t_m=params["tm"])
        if params.get("steps_total"):
            cfg = BrownianConfig(window, int(params["steps_total"]), drift=params["drift"])
        else:
            cfg = BrownianConfig.for_window(window, params["steps_per_window"])
            if params["drift"]:
                cfg = BrownianConfig(window, cfg.steps_total, drift=params["drift"])
        return cfg
    if model == "renewal":
        window = WindowSpec(t_a=params["r"] * params["tm"], t_m=params["tm"])
        return RenewalConfig(
            alpha=TailIndex(params["alpha"]),
            scale_plus=params["scale_plus"],
            scale_minus=params["scale_minus"],
            window=window,
            initial_state_prob_plus=params["p0_plus"],
        )
    tm = int(params["tm"])
    return MapConfig(
        params=MapParams(params["c"], TailIndex(params["alpha"])),
        t_a=round(params["r"] * tm),
        t_m=tm,
    )


def _run_simulation(params: dict, seed: int, workers: int, out: Path, argv) -> dict:
    cfg = _sim_config(params)
    start = time.perf_counter()
    result = sample_ensemble(cfg, params["n"], seed, workers=workers)
    wall = time.perf_counter() - start
    _write_samples_csv(out, result)
    record = dict(params)
    if params["model"] == "bm":
        record["steps_total"] = cfg.steps_total
        record["n_window"] = cfg.n_window
        record["dt"] = cfg.dt
    manifest = {
        "tool": "occutime",
        "version": __version__,
        "subcommand": "simulate",
        "argv": argv,
        "params": record,
        "master_seed": seed,
        "workers": workers,
        "outputs": [str(out)],
        "diagnostics": result.diagnostics,
        "wall_time_s": wall,
    }
    _write_manifest(_manifest_path(out), manifest)
    return manifest


def _cmd_simulate(args, argv) -> int:
    if args.out is None:
        raise UsageError("simulate needs --out for the sample CSV")
    config = {}
    if args.config:
        config.update(_read_config(Path(args.config)))
    if args.from_manifest:
        mpath = Path(args.from_manifest)
        if not mpath.is_file():
            raise UsageError(f"manifest not found: {mpath}")
        recorded = json.loads(mpath.read_text())
        rparams = recorded.get("params", {})
        if rparams.get("model") != args.model:
            raise UsageError(
                f"manifest records model {rparams.get('model')!r}, not {args.model!r}")
        config.update({k: str(v) for k, v in rparams.items()
                       if v is not None and k != "model"})
        if args.seed is None and "master_seed" in recorded:
            args.seed = int(recorded["master_seed"])
    params = _sim_params_from_args(args, config)
    seed = args.seed if args.seed is not None else 0
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    manifest = _run_simulation(params, seed, workers, Path(args.out), argv)
    print(f"wrote {args.out} (model={params['model']}, n={params['n']}, "
          f"seed={seed}, wall={manifest['wall_time_s']:.1f}s)")
    return 0


def _cmd_compare(args, argv) -> int:
    samples_path = Path(args.samples)
    fractions = _read_samples_csv(samples_path)

    sim_manifest = None
    mpath = _manifest_path(samples_path)
    if mpath.is_file():
        sim_manifest = json.loads(mpath.read_text())
    sim_params = (sim_manifest or {}).get("params", {})
    model = sim_params.get("model")

    atom_tol = args.atom_tol
    if atom_tol is None:
        if model == "bm" and "n_window" in sim_params:
            atom_tol = 1.0 / sim_params["n_window"]
        else:
            atom_tol = 0.0
    allowance = args.allowance
    if allowance is None:
        allowance = 0.01 if model == "bm" else 0.0

    qcfg = QuadratureConfig(grid_size=args.grid or 1024)
    theory = _build_theory(args.theory, alpha=args.alpha, beta=args.beta,
                           p_plus=args.p_plus, r=args.r, c=args.c, qcfg=qcfg)
    emp = build_empirical(fractions, atom_tol=atom_tol)
    report = ks_against(emp, theory, delta=args.delta, model_allowance=allowance,
                        metadata={
                            "samples": str(samples_path),
                            "samples_master_seed": (sim_manifest or {}).get("master_seed"),
                            "model": model,
                            "atom_tol": atom_tol,
                        })
    payload = report.to_dict()
    payload["tool"] = "occutime"
    payload["version"] = __version__
    payload["argv"] = argv
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict}: ks={report.ks_distance:.5f} vs "
          f"dkw+allowance={report.dkw_epsilon + report.model_allowance:.5f}")
    return 0


def _load_preset(figure: str) -> dict:
    text = resources.files("occutime").joinpath(f"presets/{figure}.cfg").read_text()
    mapping = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
    return mapping


def _cmd_reproduce(args, argv) -> int:
    if args.out is None:
        raise UsageError("reproduce needs --out for the bundle directory")
    preset = _load_preset(args.figure)
    model = preset["model"]
    tm = float(preset["tm"])
    r_labels = [tok.strip() for tok in preset["r_list"].split(",")]
    n = args.n if args.n is not None else int(preset["n"])
    grid = args.grid if args.grid is not None else int(preset["grid"])
    bins = args.bins if args.bins is not None else int(preset["bins"])
    seed = args.seed if args.seed is not None else 0
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    overrides = {k: v for k, v in
                 (("n", args.n), ("grid", args.grid), ("bins", args.bins)) if v is not None}

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    qcfg = QuadratureConfig(grid_size=max(grid, 64))
    start = time.perf_counter()
    series = []
    for r_label in r_labels:
        r = float(r_label)
        params = {"model": model, "tm": tm, "r": r, "n": n}
        if model == "bm":
            params["steps_per_window"] = int(preset["steps_per_window"])
            params["steps_total"] = None
            params["drift"] = 0.0
        else:
            params["alpha"] = float(preset["alpha"])
            params["c"] = float(preset["c"])
        samples_path = out_dir / f"samples_r{r_label}.csv"
        manifest = _run_simulation(params, seed, workers, samples_path, argv)

        if model == "bm":
            theory = aging_arcsine_table(r, qcfg)
            atom_tol = 1.0 / manifest["params"]["n_window"]
        else:
            map_params = MapParams(params["c"], TailIndex(params["alpha"]))
            asym = AsymmetryParams.from_beta(beta_of_map(map_params))
            theory = aging_lamperti_table(params["alpha"], asym, r, qcfg)
            atom_tol = 0.0

        theory_path = out_dir / f"theory_r{r_label}.csv"
        with theory_path.open("w") as stream:
            _write_theory_csv(stream, theory, grid)

        fractions = _read_samples_csv(samples_path)
        emp = build_empirical(fractions, atom_tol=atom_tol)
        centers, density = histogram(emp, bins)
        hist_path = out_dir / f"hist_r{r_label}.csv"
        with hist_path.open("w") as stream:
            stream.write(f"# model = {model}\n")
            stream.write(f"# r = {r_label}\n")
            stream.write(f"# n = {emp.n}\n")
            stream.write(f"# mass_at_0 = {_fmt(emp.mass_at_0)}\n")
            stream.write(f"# mass_at_1 = {_fmt(emp.mass_at_1)}\n")
            stream.write("bin_center,density\n")
            for center, dens in zip(centers, density):
                stream.write(f"{_fmt(center)},{_fmt(dens)}\n")

        series.append({
            "r": r,
            "r_label": r_label,
            "samples": samples_path.name,
            "histogram": hist_path.name,
            "theory": theory_path.name,
            "n": n,
            "atom_0": theory.atom_at_0,
            "atom_1": theory.atom_at_1,
        })

    _write_manifest(out_dir / "bundle.json", {
        "tool": "occutime",
        "version": __version__,
        "subcommand": "reproduce",
        "figure": args.figure,
        "argv": argv,
        "preset": preset,
        "overrides": overrides,
        "master_seed": seed,
        "series": series,
        "wall_time_s": time.perf_counter() - start,
    })
    print(f"wrote bundle {out_dir} ({len(series)} series)")
    return 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master RNG seed (default 0)")
    common.add_argument("--out", default=None, help="output file (or bundle directory)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes for trajectory sampling "
                             "(default: machine parallelism)")

    parser = _Parser(prog="occutime", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"occutime {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_theory = sub.add_parser("theory", parents=[common],
                              help="write an (s, pdf, cdf) table as CSV")
    p_theory.add_argument("model", choices=THEORY_MODELS)
    p_theory.add_argument("--alpha", type=float, default=None)
    p_theory.add_argument("--beta", type=float, default=None)
    p_theory.add_argument("--p-plus", dest="p_plus", type=float, default=None)
    p_theory.add_argument("--r", type=float, default=None)
    p_theory.add_argument("--c", type=float, default=None,
                          help="map skewness; implies beta for aging-lamperti")
    p_theory.add_argument("--grid", type=int, default=None)
    p_theory.add_argument("--config", default=None)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="draw an occupation-fraction ensemble")
    p_sim.add_argument("model", choices=SIM_MODELS)
    p_sim.add_argument("--tm", type=float, default=None, help="measurement time / iterations")
    p_sim.add_argument("--r", type=float, default=None, help="aging ratio t_a/t_m (default 0)")
    p_sim.add_argument("--n", type=int, default=None, help="ensemble size (default 10000)")
    p_sim.add_argument("--alpha", type=float, default=None)
    p_sim.add_argument("--c", type=float, default=None)
    p_sim.add_argument("--scale-plus", dest="scale_plus", type=float, default=None)
    p_sim.add_argument("--scale-minus", dest="scale_minus", type=float, default=None)
    p_sim.add_argument("--p0-plus", dest="p0_plus", type=float, default=None,
                       help="initial + state probability (default: stationary)")
    p_sim.add_argument("--steps-per-window", dest="steps_per_window", type=int, default=None)
    p_sim.add_argument("--steps-total", dest="steps_total", type=int, default=None)
    p_sim.add_argument("--drift", type=float, default=None,
                       help="Brownian drift (validation hook)")
    p_sim.add_argument("--config", default=None)
    p_sim.add_argument("--from-manifest", dest="from_manifest", default=None,
                       help="take parameters from a previous run's manifest")

    p_cmp = sub.add_parser("compare", parents=[common],
                           help="KS-compare samples against a theory CDF")
    p_cmp.add_argument("samples")
    p_cmp.add_argument("--theory", required=True, choices=THEORY_MODELS)
    p_cmp.add_argument("--alpha", type=float, default=None)
    p_cmp.add_argument("--beta", type=float, default=None)
    p_cmp.add_argument("--p-plus", dest="p_plus", type=float, default=None)
    p_cmp.add_argument("--r", type=float, default=None)
    p_cmp.add_argument("--c", type=float, default=None)
    p_cmp.add_argument("--delta", type=float, default=0.05)
    p_cmp.add_argument("--allowance", type=float, default=None,
                       help="model allowance added to the DKW band (default by model)")
    p_cmp.add_argument("--atom-tol", dest="atom_tol", type=float, default=None)
    p_cmp.add_argument("--grid", type=int, default=None)

    p_rep = sub.add_parser("reproduce", parents=[common],
                           help="run a pinned figure preset into a bundle directory")
    p_rep.add_argument("figure", choices=FIGURES)
    p_rep.add_argument("--n", type=int, default=None, help="override preset ensemble size")
    p_rep.add_argument("--grid", type=int, default=None, help="override preset table grid")
    p_rep.add_argument("--bins", type=int, default=None, help="override preset histogram bins")

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "theory": _cmd_theory,
            "simulate": _cmd_simulate,
            "compare": _cmd_compare,
            "reproduce": _cmd_reproduce,
        }[args.command]
        return handler(args, argv)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except QuadratureError as exc:
        print(f"numeric failure: {exc} (error estimate {exc.estimate})", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
