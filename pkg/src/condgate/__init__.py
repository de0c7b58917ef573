"""Conditional no-emission dynamics of two driven three-level atoms in a
lossy optical cavity, with dissipation-assisted CNOT, PHASE and SWAP gate
benchmarks."""

from .dfs import (DfsBasis, SpectralDecomposition, ZenoReport, analytic_dfs,
                  dfs_from_spectrum, dfs_projector, effective_hamiltonian,
                  spectral_decompose, spectral_dfs, zeno_condition_check)
from .dynamics import (EigenPropagator, Trajectory, TransitionDamper,
                       adiabatic_reference, conditional_fidelity,
                       damp_transition, evolve_expm, matrix_exponential,
                       no_photon_probability, propagate)
from .gates import (GateResult, GateSpec, RunReport, effective_gate_check,
                    gate_schedule, parse_qubit_input, repetition_success,
                    run_gate, run_report, tune_duration)
from .hamiltonian import (JumpOperator, SystemParams, build_h_cond,
                          build_h_coherent, jump_operators, load_system_params)
from .hilbert import (BasisLabel, basis_index, basis_label, basis_state,
                      make_state, overlap, singlet_triplet)
from .montecarlo import TrajectoryStats, estimate_p0, run_trajectories
from .sweep import OptimumReport, SweepRow, maximize_p0, sweep_rabi

__version__ = "0.1.0"

__all__ = [
    "BasisLabel", "DfsBasis", "EigenPropagator", "GateResult", "GateSpec",
    "JumpOperator", "OptimumReport", "RunReport", "SpectralDecomposition",
    "SweepRow", "SystemParams", "Trajectory", "TrajectoryStats",
    "TransitionDamper", "ZenoReport", "adiabatic_reference", "analytic_dfs",
    "basis_index", "basis_label", "basis_state", "build_h_cond",
    "build_h_coherent", "conditional_fidelity", "damp_transition",
    "dfs_from_spectrum", "dfs_projector", "effective_gate_check",
    "effective_hamiltonian", "estimate_p0", "evolve_expm", "gate_schedule",
    "jump_operators", "load_system_params", "make_state",
    "matrix_exponential", "maximize_p0", "no_photon_probability", "overlap",
    "parse_qubit_input", "propagate", "repetition_success", "run_gate",
    "run_report", "run_trajectories", "singlet_triplet",
    "spectral_decompose", "spectral_dfs", "sweep_rabi", "tune_duration",
    "zeno_condition_check",
]
