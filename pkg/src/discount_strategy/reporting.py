"""Grid emission and figure rendering.

Grids are comma-separated UTF-8 files with a one-line header and LF line
endings: 1-D grids carry columns ``v,<value...>``, 2-D grids carry
``v,w,value`` in row-major order (v outer, w inner).  Sample points sit
at cell centers of a uniform partition of the support, so diagonal rows
of 2-D grids hit ``v == w`` exactly and cell sums approximate integrals.

The report path additionally renders each grid to a PNG next to the
delimited file.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import strategy as _strategy
from .pricing import Seller, marginal_pdf
from .strategy import DecisionModel, h_curve, h_surface

__all__ = ["GRID_KINDS", "grid_table", "write_grid", "render_figure", "write_report"]

GRID_KINDS = ("h-curve", "h-surface", "joint-pdf", "p-surface", "marginals")


def _cell_centers(x0: float, x1: float, n: int) -> list[float]:
    step = (x1 - x0) / n
    return [x0 + (i + 0.5) * step for i in range(n)]


def grid_table(
    kind: str, model: DecisionModel, resolution: int
) -> tuple[list[str], list[tuple[float, ...]]]:
    """Header and rows for one grid kind at the given resolution."""
    if kind not in GRID_KINDS:
        raise ValueError(f"unknown grid kind {kind!r}; choose from {GRID_KINDS}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    x0, x1 = model.support
    xs = _cell_centers(x0, x1, resolution)

    if kind == "h-curve":
        return ["v", "h"], [(v, h_curve(v, model)) for v in xs]
    if kind == "marginals":
        header = ["v", "low", "high"]
        rows = [
            (
                v,
                marginal_pdf(v, Seller.L, model.market, model.quad),
                marginal_pdf(v, Seller.H, model.market, model.quad),
            )
            for v in xs
        ]
        return header, rows

    if kind == "h-surface":
        value = lambda v, w: h_surface(v, w, model)
    elif kind == "joint-pdf":
        value = lambda v, w: _strategy._joint(model, v, w)
    else:  # p-surface
        value = lambda v, w: model.first_mover.prob(v, w)
    rows = [(v, w, value(v, w)) for v in xs for w in xs]
    return ["v", "w", "value"], rows


def write_grid(path: str, header: list[str], rows: list[tuple[float, ...]]) -> None:
    """Write a grid table as CSV (UTF-8, LF, 10 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format(x, ".10g") for x in row) + "\n")


def render_figure(
    kind: str, header: list[str], rows: list[tuple[float, ...]], path: str
) -> None:
    """Render one grid to a PNG file."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        if kind in ("h-curve", "marginals"):
            xs = [row[0] for row in rows]
            for col in range(1, len(header)):
                ax.plot(xs, [row[col] for row in rows], label=header[col])
            if kind == "h-curve":
                ax.axhline(0.0, color="black", linewidth=0.6)
            else:
                ax.legend(frameon=False)
            ax.set_xlabel(header[0])
            ax.set_ylabel("h" if kind == "h-curve" else "density")
        else:
            vs = sorted({row[0] for row in rows})
            ws = sorted({row[1] for row in rows})
            grid = np.array([row[2] for row in rows]).reshape(len(vs), len(ws))
            mesh = ax.pcolormesh(ws, vs, grid, shading="nearest", cmap="viridis")
            fig.colorbar(mesh, ax=ax)
            if kind == "h-surface":
                ax.contour(ws, vs, grid, levels=[0.0], colors="white", linewidths=0.8)
            ax.set_xlabel(header[1])
            ax.set_ylabel(header[0])
        ax.set_title(kind)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
    finally:
        plt.close(fig)


def write_report(
    model: DecisionModel, out_dir: str, resolution: int = 101
) -> list[str]:
    """Emit every grid kind as CSV plus a rendered PNG into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    for kind in GRID_KINDS:
        header, rows = grid_table(kind, model, resolution)
        stem = kind.replace("-", "_")
        csv_path = os.path.join(out_dir, f"{stem}.csv")
        png_path = os.path.join(out_dir, f"{stem}.png")
        write_grid(csv_path, header, rows)
        render_figure(kind, header, rows, png_path)
        written.extend([csv_path, png_path])
    return written
