"""Rabi-frequency sweeps and the worst-case success-rate optimizer.

A sweep evaluates the full gate report (all four basis inputs plus the
superposition fidelity probes) at each drive strength on a grid.  The
optimizer maximizes the worst-input no-photon probability subject to a
worst-case fidelity floor, with a bracketed grid refinement around the best
coarse-scan point; among near-ties the smallest Omega wins (the slower gate
is kinder to fidelity).

Grid points are independent, so they can be evaluated concurrently; the
CONDGATE_THREADS environment variable caps the worker count (0 or unset
means automatic).  Row order and content never depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import TransitionDamper
from .gates import RunReport, gate_schedule, run_report
from .hamiltonian import SystemParams
from .hilbert import QUBIT_LABELS


@dataclass(frozen=True)
class SweepRow:
    """Gate quality at one drive strength; failures are recorded in-row."""

    omega: float
    duration: float
    p0_worst: float
    fidelity_worst: float
    p0: dict[str, float] = field(default_factory=dict)
    fidelity: dict[str, float] = field(default_factory=dict)
    error: str | None = None


@dataclass(frozen=True)
class OptimumReport:
    """Outcome of the constrained drive-strength optimization."""

    kind: str
    best_omega: float
    best_p0: float
    fidelity_at_best: float
    feasible: bool
    f_min: float
    bracket: tuple[float, float]
    refine_tol: float
    n_evaluations: int


def worker_count() -> int:
    """Worker cap from CONDGATE_THREADS (0 or unset = automatic)."""
    raw = os.environ.get("CONDGATE_THREADS", "0")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"CONDGATE_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ValueError("CONDGATE_THREADS must be >= 0")
    return value if value > 0 else (os.cpu_count() or 1)


def default_grid(lo: float = 1e-3, hi: float = 1.0,
                 per_decade: int = 60) -> np.ndarray:
    """Log-spaced drive grid, ``per_decade`` points per decade."""
    if lo <= 0 or hi <= lo:
        raise ValueError("need 0 < lo < hi")
    n = max(2, int(round(per_decade * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, n)


def _evaluate(kind: str, omega: float, params: SystemParams,
              damper: TransitionDamper | None) -> SweepRow:
    spec = gate_schedule(kind, omega)
    try:
        report: RunReport = run_report(spec, params, damper=damper)
    except Exception as exc:  # recorded in-row; the sweep must not abort
        return SweepRow(omega=omega, duration=spec.duration, p0_worst=math.nan,
                        fidelity_worst=math.nan, error=str(exc))
    p0 = {l: report.results[l].p0 for l in QUBIT_LABELS}
    fid = {l: report.results[l].fidelity for l in QUBIT_LABELS}
    return SweepRow(omega=omega, duration=spec.duration,
                    p0_worst=report.worst_p0,
                    fidelity_worst=report.worst_fidelity, p0=p0, fidelity=fid)


def sweep_rabi(kind: str, params: SystemParams,
               grid: np.ndarray | list[float]) -> list[SweepRow]:
    """One SweepRow per grid point, in grid order."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if np.any(grid <= 0):
        raise ValueError("all grid points must be > 0")
    damper = (TransitionDamper(params)
              if (params.kappa > 0 or params.gamma > 0) else None)
    workers = min(worker_count(), grid.size)
    if workers <= 1:
        return [_evaluate(kind, om, params, damper) for om in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda om: _evaluate(kind, om, params, damper), grid))


def _better(candidate: SweepRow, incumbent: SweepRow | None, tol: float) -> bool:
    """Strictly higher p0, or a tie within tolerance at smaller omega."""
    if candidate.error is not None:
        return False
    if incumbent is None:
        return True
    if candidate.p0_worst > incumbent.p0_worst + tol:
        return True
    return (abs(candidate.p0_worst - incumbent.p0_worst) <= tol
            and candidate.omega < incumbent.omega)


def maximize_p0(kind: str, params: SystemParams, f_min: float = 0.99,
                bracket: tuple[float, float] = (1e-3, 1.0),
                per_decade: int = 60, refine_tol: float = 1e-3,
                p0_tie_tol: float = 1e-6) -> OptimumReport:
    """Maximize worst-input P0 over Omega subject to worst-case F >= f_min.

    Coarse log scan over the bracket, then repeated 9-point grid refinement
    between the neighbors of the running best until the bracket width drops
    below ``refine_tol`` relative to Omega.  Candidates below the fidelity
    floor are discarded; if none survive, the report is marked infeasible.
    """
    if not 0.0 < f_min <= 1.0:
        raise ValueError("f_min must lie in (0, 1]")
    lo, hi = bracket
    grid = default_grid(lo, hi, per_decade)
    rows = sweep_rabi(kind, params, grid)
    n_eval = len(rows)

    feasible = [r for r in rows if r.error is None and r.fidelity_worst >= f_min]
    if not feasible:
        return OptimumReport(kind=kind, best_omega=math.nan, best_p0=math.nan,
                             fidelity_at_best=math.nan, feasible=False,
                             f_min=f_min, bracket=bracket, refine_tol=refine_tol,
                             n_evaluations=n_eval)
    best: SweepRow | None = None
    for row in feasible:
        if _better(row, best, p0_tie_tol):
            best = row

    neighbors = {om: i for i, om in enumerate(grid)}
    idx = neighbors[best.omega]
    left = grid[max(idx - 1, 0)]
    right = grid[min(idx + 1, grid.size - 1)]

    while right / left - 1.0 > refine_tol:
        sub = np.geomspace(left, right, 9)
        sub_rows = sweep_rabi(kind, params, sub)
        n_eval += len(sub_rows)
        local = best
        for row in sub_rows:
            if row.fidelity_worst >= f_min and _better(row, local, p0_tie_tol):
                local = row
        best = local
        pos = int(np.argmin(np.abs(sub - best.omega)))
        left = sub[max(pos - 1, 0)]
        right = sub[min(pos + 1, sub.size - 1)]
        if right <= left:
            break

    return OptimumReport(kind=kind, best_omega=best.omega, best_p0=best.p0_worst,
                         fidelity_at_best=best.fidelity_worst, feasible=True,
                         f_min=f_min, bracket=bracket, refine_tol=refine_tol,
                         n_evaluations=n_eval)
