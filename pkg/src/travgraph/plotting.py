"""Figure data for the arc super-solution: surfaces in three regimes and the I_r curves.

Each regime writes a CSV of the sampled surface and a CSV of the curves
theta1 + theta_bar(r) and theta2 - theta_bar(r), which bound the angular window
I_r where the cone branch is active.  A gnuplot script and (optionally)
matplotlib PNGs are written next to the CSV files.
"""
from __future__ import annotations

import math
import os

import numpy as np

from .cone import ConeProfile, theta_bar
from .io import write_rows, write_xyz
from .supersolution import ArcPiece

REGIMES = {
    "lt_pi": 2.0 * math.pi / 3.0,
    "eq_pi": math.pi,
    "gt_pi": 4.0 * math.pi / 3.0,
}


def ir_curves(profile: ConeProfile, theta1, theta2, radii):
    """Rows (r, theta_bar, lower, upper, nonempty) for the window I_r = [lower, upper]."""
    tb = theta_bar(profile, radii)
    lower = theta1 + tb
    upper = theta2 - tb
    return np.column_stack([radii, tb, lower, upper, (lower <= upper).astype(float)])


def surface(piece: ArcPiece, half_width, n):
    x = np.linspace(-half_width, half_width, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    P = np.column_stack([X.ravel(), Y.ravel()])
    return P, piece(P)


GNUPLOT = """# surfaces of the arc super-solution and the I_r window boundaries
set datafile separator ","
set key autotitle columnhead
set terminal pngcairo size 900,700
{blocks}
"""

_BLOCK = """set output "{name}_surface_gp.png"
set title "arc super-solution, theta2 - theta1 = {width:.4f}"
set dgrid3d {n},{n}
set pm3d map
splot "{name}_surface.csv" using 1:2:3 with pm3d notitle
unset dgrid3d
set output "{name}_ir_gp.png"
set title "I_r boundaries"
set xlabel "r"
set ylabel "angle"
plot "{name}_ir.csv" using 1:3 with lines title "theta1 + theta_bar", \\
     "{name}_ir.csv" using 1:4 with lines title "theta2 - theta_bar"
"""


def write_figures(profile: ConeProfile, out_dir, lam=1.0, half_width=6.0, n=121, r_max=None, png=True):
    """Write CSV, gnuplot and PNG files for the three regimes; returns the list of paths."""
    os.makedirs(out_dir, exist_ok=True)
    r_top = profile.r_max if r_max is None else min(r_max, profile.r_max)
    radii = np.geomspace(1e-3, r_top, 200)
    written = []
    blocks = []
    data = {}
    for name, width in REGIMES.items():
        piece = ArcPiece(0.0, width, lam, profile)
        P, vals = surface(piece, half_width, n)
        path = os.path.join(out_dir, f"{name}_surface.csv")
        write_xyz(path, P, vals)
        written.append(path)
        curves = ir_curves(profile, 0.0, width, radii)
        path = os.path.join(out_dir, f"{name}_ir.csv")
        write_rows(path, ["r", "theta_bar", "lower", "upper", "nonempty"], curves.tolist())
        written.append(path)
        blocks.append(_BLOCK.format(name=name, width=width, n=n))
        data[name] = (P, vals, curves, width)
    gp = os.path.join(out_dir, "figures.gp")
    with open(gp, "w") as fh:
        fh.write(GNUPLOT.format(blocks="".join(blocks)))
    written.append(gp)
    if png:
        written.extend(_render_png(data, out_dir, n))
    return written


def _render_png(data, out_dir, n):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    fig, axes = plt.subplots(1, len(data), figsize=(5 * len(data), 4.4), constrained_layout=True)
    for ax, (name, (P, vals, _, width)) in zip(axes, data.items()):
        X = P[:, 0].reshape(n, n)
        Y = P[:, 1].reshape(n, n)
        cs = ax.contourf(X, Y, vals.reshape(n, n), levels=30, cmap="viridis")
        ax.set_aspect("equal")
        ax.set_title(f"theta2 - theta1 = {width:.3f}")
        fig.colorbar(cs, ax=ax, shrink=0.8)
    path = os.path.join(out_dir, "arc_surfaces.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    fig, axes = plt.subplots(1, len(data), figsize=(5 * len(data), 4.4), constrained_layout=True)
    for ax, (name, (_, _, curves, width)) in zip(axes, data.items()):
        r, lower, upper = curves[:, 0], curves[:, 2], curves[:, 3]
        for th, style in ((lower, "-"), (upper, "--")):
            ax.plot(r * np.cos(th), r * np.sin(th), style)
        ok = curves[:, 4] > 0
        for ri, lo, hi in zip(r[ok][::8], lower[ok][::8], upper[ok][::8]):
            t = np.linspace(lo, hi, 30)
            ax.plot(ri * np.cos(t), ri * np.sin(t), color="0.7", lw=0.6)
        ax.set_aspect("equal")
        ax.set_title(f"I_r, theta2 - theta1 = {width:.3f}")
    path = os.path.join(out_dir, "ir_sets.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)
    return paths
