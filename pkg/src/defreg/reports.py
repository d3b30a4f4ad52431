"""Report emission: canonical JSON, CSV companions, and rendered figures.

JSON payloads are deterministic (sorted keys, no set iteration, Fractions
rendered as "p/q" strings) so reruns with the same seed byte-reproduce
everything except the `generated_at` stamp.  When an output directory is
given, matrix-shaped results also land as long-form CSV files and the
report's figures are rendered to PNG next to them.
"""

from __future__ import annotations

import csv
import json
import time
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dim_measure import DimMeasure
from .regularity import PairTables, RegularityReport, descriptor_size

TOOL_NAME = "defreg"
SCHEMA = "defreg-report/1"


def payload(command: str, config: Mapping, results: Mapping) -> dict:
    from . import __version__

    return {
        "schema": SCHEMA,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "command": command,
        "config": _plain(config),
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "results": _plain(results),
    }


def _plain(obj):
    """Recursively convert to JSON-encodable values, deterministically."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, DimMeasure):
        return obj.to_json()
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def dump_json(doc: Mapping) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(doc: Mapping, path: Path) -> None:
    path.write_text(dump_json(doc), encoding="utf-8")


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- figures -------------------------------------------------------------------


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(5.2, 3.8), dpi=110)
    ax.set_title(title)
    return fig, ax


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def fig_count_fit(counts: Sequence[tuple[int, int]], dm: DimMeasure, title: str,
                  path: Path) -> None:
    """Log-log counts against the fitted mu * q^d growth law."""
    fig, ax = _new_axes(title)
    qs = np.array([q for q, _ in counts], dtype=float)
    ns = np.array([n for _, n in counts], dtype=float)
    ax.plot(qs, np.maximum(ns, 0.5), "o", label="exact count")
    if not dm.is_empty:
        grid = np.linspace(qs.min(), qs.max(), 64)
        ax.plot(grid, float(dm.measure) * grid**dm.dim, "-",
                label=f"{dm.measure} * q^{dm.dim}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("field size q")
    ax.set_ylabel("points")
    ax.legend(fontsize=8)
    _save(fig, path)


def fig_class_counts(class_points: Mapping[str, Sequence[tuple[int, int]]], title: str,
                     path: Path) -> None:
    """Fiber counts per parameter class across the field family."""
    fig, ax = _new_axes(title)
    for label, pts in sorted(class_points.items()):
        qs = [q for q, _ in pts]
        ns = [max(n, 0.4) for _, n in pts]
        ax.plot(qs, ns, "o", alpha=0.7, label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("field size q")
    ax.set_ylabel("fiber count (0 plotted at 0.4)")
    ax.legend(fontsize=7)
    _save(fig, path)


def fig_pair_matrix(tables: PairTables, descriptor: str, block_positions: Sequence[Sequence[int]],
                    path: Path) -> None:
    """Shared-fiber count heatmap with block boundaries overlaid."""
    t = tables.table_for(descriptor)
    order = [p for blk in block_positions for p in blk]
    mat = t.counts[np.ix_(order, order)]
    fig, ax = _new_axes(f"{tables.graph.name}: pair counts over F_{descriptor}")
    im = ax.imshow(mat, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.85)
    edge = 0
    for blk in block_positions[:-1]:
        edge += len(blk)
        ax.axhline(edge - 0.5, color="w", lw=0.8)
        ax.axvline(edge - 0.5, color="w", lw=0.8)
    ax.set_xlabel("parameter b (block order)")
    ax.set_ylabel("parameter a (block order)")
    _save(fig, path)


def fig_deviation_scaling(report: RegularityReport, path: Path) -> None:
    """Normalized worst deviations per block pair with fitted power laws."""
    fig, ax = _new_axes(f"{report.graph}: sampled deviation vs field size")
    drew = False
    for st in report.pair_stats:
        pts = sorted((descriptor_size(fd), v) for fd, v in st.delta_norm_max.items() if v > 0)
        if not pts:
            continue
        drew = True
        qs = np.array([p[0] for p in pts], dtype=float)
        vs = np.array([p[1] for p in pts], dtype=float)
        ax.plot(qs, vs, "o-", label=f"pair ({st.i},{st.j})"
                + (f", alpha={st.alpha:.2f}" if st.alpha is not None else ""))
    if drew:
        qs = np.array(sorted(descriptor_size(fd) for fd in report.fields), dtype=float)
        ax.plot(qs, qs**-0.25 * 0.5, "--", color="gray", label="q^(-1/4) reference")
        ax.set_xscale("log")
        ax.set_yscale("log")
    else:
        ax.text(0.5, 0.5, "all sampled deviations are exactly zero",
                ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("field size q")
    ax.set_ylabel("max |E(A,B)| - d|A||B|| / (|V_i||W_j|)")
    ax.legend(fontsize=7)
    _save(fig, path)


# -- bundled emission ---------------------------------------------------------


class ReportSink:
    """Collects one command's outputs; writes files only when a directory is set."""

    def __init__(self, out_dir: str | None, figures: bool = True, csv_files: bool = True):
        self.dir = Path(out_dir) if out_dir else None
        self.figures = figures and self.dir is not None
        self.csv_files = csv_files and self.dir is not None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        assert self.dir is not None
        return self.dir / name

    def emit_json(self, doc: Mapping, name: str) -> None:
        if self.dir is not None:
            write_json(doc, self.path(name))

    def emit_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
        if self.csv_files:
            write_csv(self.path(name), header, rows)

    def emit_figure(self, render, name: str) -> None:
        """render: callable taking the target path; skipped without a directory."""
        if self.figures:
            render(self.path(name))
