"""Figure rendering behind the report command family.

Every renderer takes data already computed by the analysis modules and
writes PNG files next to the delimited output; nothing here computes
physics.  The Agg backend is forced so rendering works headless.
"""
import os
from typing import Dict, List, Optional, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hygroscale.dimensionless import DistortionField
from hygroscale.solver import FieldSolution

# one stable color per material category
_CATEGORY_COLORS = {
    "cement": "tab:gray",
    "finishing": "tab:purple",
    "insulation": "tab:green",
    "masonry": "tab:red",
    "mortar": "tab:brown",
    "stone": "tab:blue",
    "wood": "tab:orange",
}


def render_map(rows: Sequence[Dict], x_name: str, y_name: str,
               path: str) -> str:
    """Scatter of one dimensionless number against another, by category."""
    fig, ax = plt.subplots(figsize=(7.0, 5.5))
    by_cat: Dict[str, List[Dict]] = {}
    for row in rows:
        by_cat.setdefault(row["category"], []).append(row)
    for cat in sorted(by_cat):
        xs = [r[x_name] for r in by_cat[cat]]
        ys = [r[y_name] for r in by_cat[cat]]
        ax.scatter(xs, ys, s=28, label=cat,
                   color=_CATEGORY_COLORS.get(cat, "black"), alpha=0.85)
    for axis, setter in ((x_name, ax.set_xscale), (y_name, ax.set_yscale)):
        values = [r[axis] for r in rows]
        if values and min(values) > 0 and max(values) / min(values) > 50:
            setter("log")
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8, framealpha=0.9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_distortion(field: DistortionField, material_name: str,
                      path: str) -> str:
    """Panel of all starred coefficient fields over the state square."""
    names = list(field.fields)
    fig, axes = plt.subplots(2, 4, figsize=(14.0, 6.5), constrained_layout=True)
    for ax, name in zip(axes.flat, names):
        data = np.ma.masked_invalid(field.fields[name])
        mesh = ax.pcolormesh(field.u, field.v, data, shading="auto",
                             cmap="viridis")
        fig.colorbar(mesh, ax=ax, shrink=0.85)
        ax.set_title(f"{name}*", fontsize=10)
        ax.set_xlabel("u")
        ax.set_ylabel("v")
    for ax in axes.flat[len(names):]:
        ax.axis("off")
    fig.suptitle(f"coefficient distortion, {material_name}")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_simulation(sol: FieldSolution, out_dir: str,
                      stem: str = "simulation") -> List[str]:
    """Probe time series and the thermodynamic series as two figures."""
    cfg = sol.config
    t_days = sol.tau * cfg.design.frame.tref / 86400.0
    probe_idx = [int(np.argmin(np.abs(sol.chi - p))) for p in cfg.probes]

    fields_path = os.path.join(out_dir, f"{stem}_fields.png")
    fig, (ax_u, ax_v) = plt.subplots(2, 1, figsize=(8.0, 6.5), sharex=True)
    for j in probe_idx:
        label = f"chi = {sol.chi[j]:.3g}"
        ax_u.plot(t_days, sol.u[:, j], label=label)
        ax_v.plot(t_days, sol.v[:, j], label=label)
    ax_u.set_ylabel("u")
    ax_v.set_ylabel("v")
    ax_v.set_xlabel("time, days")
    for ax in (ax_u, ax_v):
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(fields_path, dpi=150)
    plt.close(fig)

    thermo_path = os.path.join(out_dir, f"{stem}_thermo.png")
    fig, (ax_e, ax_m) = plt.subplots(2, 1, figsize=(8.0, 6.5), sharex=True)
    ax_e.plot(t_days, sol.energy, color="tab:red")
    ax_e.set_ylabel("internal energy, J m$^{-3}$")
    ax_m.plot(t_days, sol.moisture, color="tab:blue")
    ax_m.set_ylabel("moisture content, kg m$^{-3}$")
    ax_m.set_xlabel("time, days")
    for ax in (ax_e, ax_m):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(thermo_path, dpi=150)
    plt.close(fig)
    return [fields_path, thermo_path]
