"""Render occupation-fraction bundles: histogram symbols over theory curves.

A bundle is a directory written by the simulation CLI's ``reproduce``
subcommand: a ``bundle.json`` manifest listing one series per aging ratio,
plus per-series CSV files (``hist_*`` with bin_center/density rows and
``theory_*`` with s/pdf/cdf rows, both carrying ``# key = value`` header
blocks).  Each bundle becomes one panel; passing several bundles side by side
makes a multi-panel figure.  Point masses at fractions 0 and 1 are drawn as
stems.  Rendering is pure file-to-file and deterministic: a fixed style, no
timestamps, so re-rendering reproduces the image byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown")
MARKERS = ("o", "s", "^", "D", "v", "P")


class BundleError(Exception):
    """A bundle directory is missing files or contains unparseable ones."""


@dataclass(frozen=True)
class FigureSpec:
    """What to render: one panel per bundle directory."""

    bundle_dirs: tuple[Path, ...]
    out_path: Path
    x_label: str = "occupation fraction"
    y_label: str = "density"
    log_y: bool = False   # endpoint-diverging densities sometimes want this

    def __post_init__(self):
        if not self.bundle_dirs:
            raise BundleError("figure needs at least one bundle directory")


@dataclass
class RenderResult:
    """Where the image went and what it contains."""

    out_path: Path
    panel_count: int
    series_counts: list[int] = field(default_factory=list)


def _read_csv_table(path: Path) -> tuple[dict, list[str], list[list[float]]]:
    if not path.is_file():
        raise BundleError(f"missing bundle file: {path}")
    header: dict = {}
    columns: list[str] | None = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "=" in line:
                key, value = line[1:].split("=", 1)
                header[key.strip()] = value.strip()
            continue
        if columns is None:
            columns = [tok.strip() for tok in line.split(",")]
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise BundleError(f"{path}:{lineno}: not a numeric row: {raw!r}") from exc
    if columns is None or not rows:
        raise BundleError(f"{path}: no data rows")
    return header, columns, rows


def load_bundle(bundle_dir: Path) -> dict:
    """Parse a bundle directory, checking every referenced file exists."""
    bundle_dir = Path(bundle_dir)
    manifest_path = bundle_dir / "bundle.json"
    if not manifest_path.is_file():
        raise BundleError(
            f"{bundle_dir} is not a bundle: expected bundle.json plus "
            "per-series samples_*.csv, hist_*.csv and theory_*.csv files"
        )
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise BundleError(f"{manifest_path}: invalid JSON: {exc}") from exc
    series_records = manifest.get("series", [])
    if not series_records:
        raise BundleError(f"{manifest_path}: bundle lists no series")

    series = []
    for record in series_records:
        for key in ("samples", "histogram", "theory"):
            ref = bundle_dir / record[key]
            if not ref.is_file():
                raise BundleError(f"missing bundle file: {ref}")
        hist_header, _, hist_rows = _read_csv_table(bundle_dir / record["histogram"])
        theory_header, _, theory_rows = _read_csv_table(bundle_dir / record["theory"])
        series.append({
            "r_label": str(record.get("r_label", record.get("r", "?"))),
            "hist": hist_rows,
            "hist_header": hist_header,
            "theory": theory_rows,
            "atom_0": float(theory_header.get("atom_0", 0.0)),
            "atom_1": float(theory_header.get("atom_1", 0.0)),
            "mass_at_0": float(hist_header.get("mass_at_0", 0.0)),
            "mass_at_1": float(hist_header.get("mass_at_1", 0.0)),
        })
    return {"figure": manifest.get("figure", bundle_dir.name), "series": series}


def render_bundle(spec: FigureSpec) -> RenderResult:
    """Render one image: a panel per bundle, a series per aging ratio."""
    bundles = [load_bundle(d) for d in spec.bundle_dirs]
    n_panels = len(bundles)

    fig, axes = plt.subplots(1, n_panels, figsize=(5.0 * n_panels, 3.6), dpi=100,
                             squeeze=False)
    series_counts = []
    for ax, bundle in zip(axes[0], bundles):
        count = 0
        for k, series in enumerate(bundle["series"]):
            color = COLORS[k % len(COLORS)]
            marker = MARKERS[k % len(MARKERS)]
            centers = [row[0] for row in series["hist"]]
            density = [row[1] for row in series["hist"]]
            ax.plot(centers, density, linestyle="none", marker=marker, color=color,
                    markersize=4, label=f"r = {series['r_label']}")
            s_vals = [row[0] for row in series["theory"] if math.isfinite(row[1])]
            pdf_vals = [row[1] for row in series["theory"] if math.isfinite(row[1])]
            ax.plot(s_vals, pdf_vals, color=color, linewidth=1.2)
            for x, mass in ((0.0, series["atom_0"]), (1.0, series["atom_1"])):
                if mass > 0.0:
                    ax.plot([x, x], [0.0, mass], color=color, linewidth=2.0, alpha=0.6)
                    ax.plot([x], [mass], marker="x", color=color, markersize=6)
            count += 1
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
        ax.set_title(bundle["figure"])
        ax.set_xlim(-0.02, 1.02)
        if spec.log_y:
            ax.set_yscale("log")
        else:
            ax.set_ylim(bottom=0.0)
        ax.legend(loc="upper center", fontsize=8)
        series_counts.append(count)

    fig.tight_layout()
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path, format="png", metadata={"Software": "occuplots"})
    plt.close(fig)
    return RenderResult(spec.out_path, n_panels, series_counts)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="occuplots",
        description="Render one figure from occupation-fraction bundle directories.",
    )
    parser.add_argument("bundles", nargs="+", help="bundle directories, one per panel")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--log-y", action="store_true",
                        help="log-scale the density axis")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            bundle_dirs=tuple(Path(b) for b in args.bundles),
            out_path=Path(args.out),
            log_y=args.log_y,
        )
        result = render_bundle(spec)
    except BundleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({result.panel_count} panel(s), "
          f"{result.series_counts} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
