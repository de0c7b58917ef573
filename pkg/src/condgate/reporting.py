"""CSV serialization for states, operators, trajectories and gate reports.

Column layouts are contractual:

* state:       index, n, a1, a2, re, im           (canonical index order)
* operator:    row, col, re, im                   (nonzero entries)
* trajectory:  t, p0, pop_<n>_<a1><a2> ...        (per-basis populations)
* gate report: input, P0, F, transition_time, T, n_max
* sweep:       omega, T, p0_worst, f_worst, per-input P0/F, error
* dfs show:    '# dfs_dim=<k>' comment, then index, re_over_g, im_over_g, in_dfs
* mc validate: estimate, std_error, p0_norm, z_score
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .gates import GateResult
from .hilbert import QUBIT_LABELS, basis_labels, n_max_for
from .sweep import SweepRow


def state_to_csv(psi: np.ndarray, path: str | Path) -> None:
    n_max = n_max_for(psi.shape[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "n", "a1", "a2", "re", "im"])
        for i, label in enumerate(basis_labels(n_max)):
            writer.writerow([i, label.n, label.a1, label.a2,
                             repr(float(psi[i].real)), repr(float(psi[i].imag))])


def state_from_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    psi = np.zeros(len(rows), dtype=complex)
    for row in rows:
        psi[int(row["index"])] = float(row["re"]) + 1j * float(row["im"])
    return psi


def operator_to_csv(matrix: np.ndarray, path: str | Path,
                    keep_zeros: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "re", "im"])
        for (i, j), value in np.ndenumerate(matrix):
            if keep_zeros or value != 0:
                writer.writerow([i, j, repr(float(value.real)), repr(float(value.imag))])


def trajectory_to_csv(traj: Trajectory, path: str | Path) -> None:
    n_max = n_max_for(traj.states.shape[1])
    pop_cols = [f"pop_{l.n}_{l.a1}{l.a2}" for l in basis_labels(n_max)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "p0", *pop_cols])
        populations = np.abs(traj.states) ** 2
        for t, p0, pops in zip(traj.times, traj.norm2, populations):
            writer.writerow([repr(float(t)), repr(float(p0)),
                             *(repr(float(p)) for p in pops)])


def gate_report_to_csv(results: dict[str, GateResult], n_max: int,
                       path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["input", "P0", "F", "transition_time", "T", "n_max"])
        for label, res in results.items():
            writer.writerow([label, repr(float(res.p0)), repr(float(res.fidelity)),
                             repr(float(res.transition_time)),
                             repr(float(res.duration)), n_max])


def sweep_to_csv(rows: list[SweepRow], path: str | Path) -> None:
    headers = ["omega", "T", "p0_worst", "f_worst"]
    for label in QUBIT_LABELS:
        headers += [f"p0_{label}", f"f_{label}"]
    headers.append("error")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        for row in rows:
            record = [repr(float(row.omega)), repr(float(row.duration)),
                      repr(float(row.p0_worst)), repr(float(row.fidelity_worst))]
            for label in QUBIT_LABELS:
                record += [repr(float(row.p0.get(label, float("nan")))),
                           repr(float(row.fidelity.get(label, float("nan"))))]
            record.append(row.error or "")
            writer.writerow(record)


def eigenvalues_to_csv(eigenvalues: np.ndarray, in_dfs: np.ndarray, g: float,
                       path_or_buffer) -> None:
    """The `dfs show` listing: a dfs_dim comment line, then one eigenvalue per row."""
    own = isinstance(path_or_buffer, (str, Path))
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        fh.write(f"# dfs_dim={int(np.sum(in_dfs))}\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "re_over_g", "im_over_g", "in_dfs"])
        order = np.lexsort((eigenvalues.imag, eigenvalues.real))
        for rank, k in enumerate(order):
            writer.writerow([rank, repr(float(eigenvalues[k].real) / g),
                             repr(float(eigenvalues[k].imag) / g), int(in_dfs[k])])
    finally:
        if own:
            fh.close()


def mc_to_csv(estimate: float, std_error: float, p0_norm: float,
              path_or_buffer) -> None:
    z = (estimate - p0_norm) / std_error if std_error > 0 else 0.0
    own = isinstance(path_or_buffer, (str, Path))
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        writer = csv.writer(fh)
        writer.writerow(["estimate", "std_error", "p0_norm", "z_score"])
        writer.writerow([repr(float(estimate)), repr(float(std_error)),
                         repr(float(p0_norm)), repr(float(z))])
    finally:
        if own:
            fh.close()
