"""Figure rendering: gate-quality curves as PNG files next to their CSVs.

Each named figure sweeps the drive strength for a family of decay-rate
settings and writes a long-format CSV (kappa, gamma, omega, T, input, p0,
fidelity) together with a rendered plot.  Circles mark the drive strength
where the worst-case no-photon probability peaks on each curve.

* fig3  CNOT  at kappa = g for Gamma/g in {1e-4, 1e-3, 5e-3}, input |10>
        (the worst case; every other input does better).
* fig4  PHASE at kappa = gamma in {0.01, 0.02, 0.04} g, inputs |00> and |01>
        (|10> and |11> are untouched by the drive).
* fig6  SWAP  for the same rate settings, inputs |00> and |01>
        (|11> is exact and the two single-flip inputs coincide).
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # file output only; never require a display
import matplotlib.pyplot as plt
import numpy as np

from .dynamics import Trajectory
from .hamiltonian import SystemParams
from .sweep import SweepRow, default_grid, sweep_rabi

FIGURE_SPECS = {
    "fig3": {"kind": "cnot", "rates": [(1.0, 1e-4), (1.0, 1e-3), (1.0, 5e-3)],
             "inputs": ("10",), "lo": 5e-3, "hi": 0.5},
    "fig4": {"kind": "phase", "rates": [(0.01, 0.01), (0.02, 0.02), (0.04, 0.04)],
             "inputs": ("00", "01"), "lo": 2e-2, "hi": 1.0},
    "fig6": {"kind": "swap", "rates": [(0.01, 0.01), (0.02, 0.02), (0.04, 0.04)],
             "inputs": ("00", "01"), "lo": 2e-2, "hi": 1.0},
}


def render_figure(name: str, out_dir: str | Path, points: int = 36,
                  n_max: int = 3) -> tuple[Path, Path]:
    """Compute one named figure; returns the (csv, png) paths."""
    if name not in FIGURE_SPECS:
        raise ValueError(f"unknown figure {name!r}; expected one of {sorted(FIGURE_SPECS)}")
    spec = FIGURE_SPECS[name]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = np.geomspace(spec["lo"], spec["hi"], points)

    curves: list[tuple[float, float, list[SweepRow]]] = []
    for kappa, gamma in spec["rates"]:
        params = SystemParams(g=1.0, kappa=kappa, gamma=gamma, n_max=n_max)
        curves.append((kappa, gamma, sweep_rabi(spec["kind"], params, grid)))

    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kappa", "gamma", "omega", "T", "input", "p0", "fidelity"])
        for kappa, gamma, rows in curves:
            for row in rows:
                for label in spec["inputs"]:
                    writer.writerow([kappa, gamma, repr(row.omega), repr(row.duration),
                                     label, repr(row.p0.get(label, float("nan"))),
                                     repr(row.fidelity.get(label, float("nan")))])

    png_path = out_dir / f"{name}.png"
    fig, (ax_p, ax_f) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for kappa, gamma, rows in curves:
        omegas = np.array([r.omega for r in rows])
        worst = np.array([r.p0_worst for r in rows])
        for label in spec["inputs"]:
            p0s = np.array([r.p0.get(label, np.nan) for r in rows])
            fids = np.array([r.fidelity.get(label, np.nan) for r in rows])
            tag = rf"$\kappa$={kappa:g}, $\Gamma$={gamma:g}, in={label}"
            ax_p.plot(omegas, p0s, label=tag)
            ax_f.plot(omegas, fids, label=tag)
        best = int(np.nanargmax(worst))
        ax_p.plot(omegas[best], worst[best], "o", mfc="none", ms=10, color="k")
    ax_p.set_xscale("log")
    ax_p.set_xlabel(r"$\Omega/g$")
    ax_p.set_ylabel(r"$P_0(T)$")
    ax_p.set_title(f"{spec['kind'].upper()} success rate")
    ax_f.set_xscale("log")
    ax_f.set_xlabel(r"$\Omega/g$")
    ax_f.set_ylabel(r"$F(T)$")
    ax_f.set_title("conditional fidelity")
    ax_f.legend(fontsize="x-small")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return csv_path, png_path


def plot_trajectories(trajs: dict[str, Trajectory], path: str | Path) -> Path:
    """P0(t) for a set of labelled runs, rendered next to the report CSV."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, traj in trajs.items():
        ax.plot(traj.times, traj.norm2, label=f"input {label}")
    ax.set_xlabel("t (units of 1/g)")
    ax.set_ylabel(r"$P_0(t)$")
    ax.set_ylim(0, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep(rows: list[SweepRow], path: str | Path, kind: str = "") -> Path:
    """Worst-case P0 and fidelity against drive strength, circle at the peak."""
    path = Path(path)
    omegas = np.array([r.omega for r in rows])
    p0s = np.array([r.p0_worst for r in rows])
    fids = np.array([r.fidelity_worst for r in rows])
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(omegas, p0s, label="worst-case $P_0$")
    ax.plot(omegas, fids, label="worst-case $F$")
    if np.any(np.isfinite(p0s)):
        best = int(np.nanargmax(p0s))
        ax.plot(omegas[best], p0s[best], "o", mfc="none", ms=10, color="k")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\Omega/g$")
    ax.set_title(kind.upper())
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
