"""Command-line interface.

    condgate gate run      one gate at fixed parameters, per-input report
    condgate gate sweep    gate quality across a drive-strength grid
    condgate gate optimize best worst-case success rate under a fidelity floor
    condgate dfs show      eigenvalues and decoherence-free dimension
    condgate mc validate   quantum-jump estimate of P0 against the exact norm
    condgate figure        render a named curve family (CSV + PNG)

Report-writing commands place a rendered PNG next to the CSV they emit.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import dfs as dfs_mod
from . import figures, montecarlo, reporting, sweep as sweep_mod
from .dynamics import EigenPropagator, Trajectory
from .gates import GATE_KINDS, gate_schedule, parse_qubit_input, run_gate, run_report
from .hamiltonian import SystemParams, build_h_cond, load_system_params
from .hilbert import QUBIT_LABELS


def _params_from_options(params_file, g, kappa, gamma, n_max) -> SystemParams:
    base = load_system_params(params_file) if params_file else SystemParams()
    overrides = {}
    if g is not None:
        overrides["g"] = g
    if kappa is not None:
        overrides["kappa"] = kappa
    if gamma is not None:
        overrides["gamma"] = gamma
    if n_max is not None:
        overrides["n_max"] = n_max
    return replace(base, **overrides) if overrides else base


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        return np.geomspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise click.BadParameter("expected lo:hi:n, e.g. 0.001:1.0:60") from exc


_shared = [
    click.option("--g", type=float, default=None, help="Atom-cavity coupling (default 1)."),
    click.option("--kappa", type=float, default=None, help="Cavity decay rate (units of g)."),
    click.option("--gamma", type=float, default=None, help="Atomic decay rate (units of g)."),
    click.option("--n-max", type=int, default=None, help="Fock truncation (default 3)."),
    click.option("--params", "params_file", type=click.Path(exists=True), default=None,
                 help="Flat key=value parameter file; explicit flags override it."),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Conditional no-emission gate simulator for two atoms in a lossy cavity."""


@main.group()
def gate():
    """Run, sweep or optimize a gate."""


@gate.command("run")
@click.option("--kind", type=click.Choice(GATE_KINDS), required=True)
@click.option("--omega", type=float, required=True, help="Drive strength (units of g).")
@click.option("--input", "inputs", multiple=True,
              type=click.Choice([*QUBIT_LABELS, "bell"]),
              help="Initial state(s); default: all four basis states.")
@click.option("--no-damp", is_flag=True, help="Skip the end-of-gate transition damping.")
@click.option("--out", type=click.Path(), default="report.csv", show_default=True)
@shared_options
def gate_run(kind, omega, inputs, no_damp, out, g, kappa, gamma, n_max, params_file):
    """Run one gate and write a per-input report (CSV + PNG)."""
    params = _params_from_options(params_file, g, kappa, gamma, n_max)
    spec = gate_schedule(kind, omega)
    labels = list(inputs) if inputs else list(QUBIT_LABELS)

    results = {}
    trajectories = {}
    prop = EigenPropagator(build_h_cond(params.with_rabi(spec.rabi)))
    for label in labels:
        results[label] = run_gate(spec, params, label, damp=not no_damp)
        psi0 = parse_qubit_input(label, params.n_max)
        times = np.linspace(0.0, spec.duration, 2000)
        states = prop.states_on_grid(psi0, times)
        norm2 = np.einsum("ij,ij->i", states.conj(), states).real
        trajectories[label] = Trajectory(times=times, states=states, norm2=norm2)

    out = Path(out)
    reporting.gate_report_to_csv(results, params.n_max, out)
    png = figures.plot_trajectories(trajectories, out.with_suffix(".png"))
    for label, res in results.items():
        click.echo(f"{kind} input={label}: P0={res.p0:.6f} F={res.fidelity:.6f} "
                   f"T={res.duration:.4f} t_trans={res.transition_time:.4f}")
    click.echo(f"wrote {out} and {png}")


@gate.command("sweep")
@click.option("--kind", type=click.Choice(GATE_KINDS), required=True)
@click.option("--grid", default="0.001:1.0:60", show_default=True,
              help="Drive grid lo:hi:n (log-spaced).")
@click.option("--out", type=click.Path(), default="sweep.csv", show_default=True)
@shared_options
def gate_sweep(kind, grid, out, g, kappa, gamma, n_max, params_file):
    """Evaluate the gate across a drive grid (CSV + PNG)."""
    params = _params_from_options(params_file, g, kappa, gamma, n_max)
    rows = sweep_mod.sweep_rabi(kind, params, _parse_grid(grid))
    out = Path(out)
    reporting.sweep_to_csv(rows, out)
    png = figures.plot_sweep(rows, out.with_suffix(".png"), kind=kind)
    finite = [r for r in rows if r.error is None]
    if finite:
        best = max(finite, key=lambda r: r.p0_worst)
        click.echo(f"peak worst-case P0 = {best.p0_worst:.6f} at omega = {best.omega:.6g}")
    click.echo(f"wrote {out} and {png}")


@gate.command("optimize")
@click.option("--kind", type=click.Choice(GATE_KINDS), required=True)
@click.option("--fmin", type=float, default=0.99, show_default=True,
              help="Worst-case fidelity floor.")
@click.option("--bracket", default="0.001:1.0", show_default=True,
              help="Drive search bracket lo:hi.")
@click.option("--out", type=click.Path(), default=None, help="Optional one-row CSV.")
@shared_options
def gate_optimize(kind, fmin, bracket, out, g, kappa, gamma, n_max, params_file):
    """Maximize worst-case P0 subject to the fidelity floor."""
    params = _params_from_options(params_file, g, kappa, gamma, n_max)
    try:
        lo, hi = (float(x) for x in bracket.split(":"))
    except ValueError as exc:
        raise click.BadParameter("expected lo:hi, e.g. 0.001:1.0") from exc
    report = sweep_mod.maximize_p0(kind, params, f_min=fmin, bracket=(lo, hi))
    if not report.feasible:
        click.echo(f"no drive strength reaches F >= {fmin} in {bracket}")
        sys.exit(1)
    click.echo(f"best omega = {report.best_omega:.6g}")
    click.echo(f"best worst-case P0 = {report.best_p0:.6f}")
    click.echo(f"fidelity at best = {report.fidelity_at_best:.6f}")
    click.echo(f"evaluations = {report.n_evaluations}")
    if out:
        with open(out, "w") as fh:
            fh.write("kind,best_omega,best_p0,fidelity_at_best,f_min\n")
            fh.write(f"{kind},{report.best_omega!r},{report.best_p0!r},"
                     f"{report.fidelity_at_best!r},{fmin!r}\n")
        click.echo(f"wrote {out}")


@main.group("dfs")
def dfs_group():
    """Decoherence-free subspace inspection."""


@dfs_group.command("show")
@click.option("--tol", type=float, default=1e-8, show_default=True,
              help="Real-eigenvalue tolerance |Im lambda| < tol*g.")
@click.option("--out", type=click.Path(), default=None,
              help="Write CSV here instead of stdout.")
@shared_options
def dfs_show(tol, out, g, kappa, gamma, n_max, params_file):
    """Print eigenvalues (units of g) and the DFS dimension as CSV."""
    params = _params_from_options(params_file, g, kappa, gamma, n_max)
    decomp = dfs_mod.spectral_decompose(build_h_cond(params))
    in_dfs = np.abs(decomp.eigenvalues.imag) < tol * params.g
    if out:
        reporting.eigenvalues_to_csv(decomp.eigenvalues, in_dfs, params.g, out)
        click.echo(f"wrote {out}")
    else:
        reporting.eigenvalues_to_csv(decomp.eigenvalues, in_dfs, params.g, sys.stdout)


@main.group("mc")
def mc_group():
    """Quantum-jump cross-checks."""


@mc_group.command("validate")
@click.option("--kind", type=click.Choice(GATE_KINDS), required=True)
@click.option("--omega", type=float, required=True)
@click.option("--input", "input_label", type=click.Choice([*QUBIT_LABELS, "bell"]),
              default="01", show_default=True)
@click.option("--ntraj", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--target-level", type=click.Choice(["0", "1"]), default="0",
              show_default=True, help="Ground level an atomic emission decays to.")
@click.option("--out", type=click.Path(), default=None,
              help="Write CSV here instead of stdout.")
@shared_options
def mc_validate(kind, omega, input_label, ntraj, seed, target_level, out,
                g, kappa, gamma, n_max, params_file):
    """Compare the jump-sampled P0 estimate with the exact norm at pulse end."""
    params = _params_from_options(params_file, g, kappa, gamma, n_max)
    spec = gate_schedule(kind, omega)
    params = params.with_rabi(spec.rabi)
    psi0 = parse_qubit_input(input_label, params.n_max)
    stats = montecarlo.run_trajectories(params, psi0, spec.duration, ntraj, seed,
                                        target_level=int(target_level))
    estimate, std_error = montecarlo.estimate_p0(stats)
    psi_t = EigenPropagator(build_h_cond(params)).apply(psi0, spec.duration)
    p0_norm = float(np.vdot(psi_t, psi_t).real)
    if out:
        reporting.mc_to_csv(estimate, std_error, p0_norm, out)
        click.echo(f"wrote {out}")
    else:
        reporting.mc_to_csv(estimate, std_error, p0_norm, sys.stdout)


@main.command("figure")
@click.argument("name", type=click.Choice(sorted(figures.FIGURE_SPECS)))
@click.option("--out", "out_dir", type=click.Path(), default="figures",
              show_default=True, help="Output directory.")
@click.option("--points", type=int, default=36, show_default=True,
              help="Grid points per curve.")
@click.option("--n-max", type=int, default=3, show_default=True)
def figure(name, out_dir, points, n_max):
    """Render a named curve family: CSV of the curves plus a PNG."""
    csv_path, png_path = figures.render_figure(name, out_dir, points=points,
                                               n_max=n_max)
    click.echo(f"wrote {csv_path} and {png_path}")


if __name__ == "__main__":
    main()
