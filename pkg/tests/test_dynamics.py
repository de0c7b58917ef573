import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from condgate.dfs import analytic_dfs, dfs_projector
from condgate.dynamics import (DampingConvergenceError, EigenPropagator,
                               PropagationError, TransitionDamper,
                               adiabatic_reference, conditional_fidelity,
                               damp_transition, evolve_expm,
                               matrix_exponential, no_photon_probability,
                               propagate)
from condgate.gates import gate_schedule
from condgate.hamiltonian import SystemParams, build_h_cond
from condgate.hilbert import basis_state, embed_qubit
from conftest import random_rabi

N_MAX = 3


def test_zero_hamiltonian_is_the_identity_evolution():
    psi0 = embed_qubit(np.array([0.5, 0.5, 0.5, 0.5]), N_MAX)
    traj = propagate(np.zeros((36, 36)), psi0, 7.0, n_samples=50)
    np.testing.assert_allclose(traj.states, np.tile(psi0, (50, 1)), atol=1e-12)


def test_pure_cavity_decay():
    kappa = 0.8
    h = build_h_cond(SystemParams(g=0.0, kappa=kappa))
    psi0 = basis_state((1, 0, 0), N_MAX)
    traj = propagate(h, psi0, 5.0)
    np.testing.assert_allclose(traj.norm2, np.exp(-kappa * traj.times), atol=1e-9)
    assert no_photon_probability(traj, 1.0 / kappa) == pytest.approx(np.exp(-1), abs=1e-6)
    assert no_photon_probability(traj, 0.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        no_photon_probability(traj, 6.0)


def test_slow_single_drive_flips_the_driven_state_sign():
    omega = 0.01
    spec = gate_schedule("phase", omega)
    h = build_h_cond(SystemParams(g=1.0, rabi=spec.rabi))
    psi0 = basis_state((0, 0, 1), N_MAX)
    traj = propagate(h, psi0, spec.duration, tol=1e-10, n_samples=200)
    amp = traj.final_state[1]
    assert abs(amp) == pytest.approx(1.0, abs=1e-4)
    assert amp.real < -0.9999
    # and the integrator agrees with the exponential oracle
    ref = evolve_expm(h, psi0, spec.duration)
    assert np.abs(traj.final_state - ref).max() < 1e-8


def test_matrix_exponential_against_scipy(rng):
    for scale in (0.1, 3.0, 40.0):
        a = scale * (rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)))
        np.testing.assert_allclose(matrix_exponential(a), scipy_expm(a),
                                   atol=1e-9 * max(1.0, np.linalg.norm(scipy_expm(a))))
    with pytest.raises(ValueError):
        matrix_exponential(np.zeros((2, 3)))


def test_integrator_matches_exponential_oracle(rng):
    for _ in range(5):
        p = SystemParams(g=1.0, kappa=rng.uniform(0, 1), gamma=rng.uniform(0, 0.5),
                         rabi=random_rabi(rng), n_max=N_MAX)
        h = build_h_cond(p)
        psi0 = embed_qubit(rng.normal(size=4) + 1j * rng.normal(size=4), N_MAX)
        psi0 /= np.linalg.norm(psi0)
        traj = propagate(h, psi0, 10.0, n_samples=100)
        ref = evolve_expm(h, psi0, 10.0)
        assert np.abs(traj.final_state - ref).max() < 1e-8


def test_eigen_propagator_matches_oracle(random_params):
    h = build_h_cond(random_params)
    psi0 = embed_qubit(np.array([1, 1j, -1, 0.5]) / np.sqrt(3.25), N_MAX)
    prop = EigenPropagator(h)
    for t in (0.7, 4.2, 19.0):
        np.testing.assert_allclose(prop.apply(psi0, t), evolve_expm(h, psi0, t),
                                   atol=1e-9)
    grid = np.array([0.0, 0.7, 4.2])
    states = prop.states_on_grid(psi0, grid)
    np.testing.assert_allclose(states[1], prop.apply(psi0, 0.7), atol=1e-12)


def test_norm_monotone_under_dissipation(random_params):
    h = build_h_cond(random_params)
    psi0 = embed_qubit(np.array([0.5, 0.5, 0.5, 0.5]), N_MAX)
    traj = propagate(h, psi0, 20.0)
    assert np.all(np.diff(traj.norm2) <= 1e-10)
    assert traj.norm2[0] == pytest.approx(1.0)


def test_norm_preserved_without_decay(rng):
    h = build_h_cond(SystemParams(g=1.0, rabi=random_rabi(rng), n_max=N_MAX))
    psi0 = embed_qubit(np.array([1, 0, 1, 0]) / np.sqrt(2), N_MAX)
    traj = propagate(h, psi0, 100.0, tol=1e-11, n_samples=200)
    assert np.abs(np.sqrt(traj.norm2) - 1.0).max() < 1e-8


def test_propagate_rejects_bad_input():
    with pytest.raises(ValueError):
        propagate(np.zeros((9, 9)), basis_state((0, 0, 0), 0), 0.0)
    # a norm-raising generator is unphysical here and must be flagged
    h_bad = 0.5j * np.eye(9)
    with pytest.raises(PropagationError):
        propagate(h_bad, basis_state((0, 0, 0), 0), 10.0)


def test_conditional_fidelity_reference_cases():
    target = np.diag([1, -1, 1, 1]).astype(complex)
    psi0 = embed_qubit(np.array([1, 1, 0, 0]) / np.sqrt(2), 1)
    ideal = embed_qubit(target @ np.array([1, 1, 0, 0]) / np.sqrt(2), 1)
    fid, p0 = conditional_fidelity(psi0, target, ideal)
    assert (fid, p0) == (pytest.approx(1.0), pytest.approx(1.0))
    fid, p0 = conditional_fidelity(psi0, target, 0.8 * ideal)
    assert (fid, p0) == (pytest.approx(1.0), pytest.approx(0.64))
    # the ideal output is (|00> - |01>)/sqrt2, so the input itself is orthogonal
    fid, _ = conditional_fidelity(psi0, target, psi0)
    assert fid == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        conditional_fidelity(psi0, target, 1e-8 * ideal)
    with pytest.raises(ValueError):
        conditional_fidelity(psi0, np.eye(3), ideal)


def test_damping_is_a_no_op_inside_the_protected_subspace():
    p = SystemParams(g=1.0, kappa=0.5, gamma=0.1)
    anti = analytic_dfs(p.n_max).vectors[4]
    psi, t_used = damp_transition(anti, p)
    assert t_used == 0.0
    np.testing.assert_allclose(psi, anti)


def test_damping_time_for_a_pure_decay_state():
    p = SystemParams(g=1.0, kappa=0.5, gamma=0.25)
    psi0 = basis_state((1, 0, 0), p.n_max)  # decays only through the mirrors
    eps = np.exp(-10.0)
    psi, t_used = damp_transition(psi0, p, eps=eps)
    assert t_used == pytest.approx(10.0 / p.kappa, rel=1e-6)
    assert np.vdot(psi, psi).real == pytest.approx(eps, rel=1e-6)


def test_damping_raises_without_decay_channels():
    p = SystemParams(g=1.0, kappa=0.0, gamma=0.0)
    psi0 = basis_state((1, 0, 0), p.n_max)
    with pytest.raises(DampingConvergenceError):
        damp_transition(psi0, p)


def test_damping_improves_gate_fidelity():
    # residual photon/level-2 amplitudes at pulse end cost fidelity until damped
    omega = 0.1
    spec = gate_schedule("phase", omega)
    p = SystemParams(g=1.0, kappa=0.01, gamma=0.01, n_max=N_MAX)
    h = build_h_cond(p.with_rabi(spec.rabi))
    psi0 = embed_qubit(np.array([1, 1, 0, 0]) / np.sqrt(2), N_MAX)
    psi_raw = EigenPropagator(h).apply(psi0, spec.duration)
    fid_before, _ = conditional_fidelity(psi0, spec.target, psi_raw)
    damper = TransitionDamper(p)
    psi_damped, t_used = damper.damp(psi_raw)
    fid_after, _ = conditional_fidelity(psi0, spec.target, psi_damped)
    assert t_used > 0.0
    assert damper.outside_population(psi_damped) < 1e-8
    assert fid_after >= fid_before


def test_adiabatic_reference_at_zero_time_is_identity_on_slow_states():
    amps = np.array([0.5, 0.5, 0.5, 0.5])
    psi = adiabatic_reference(0.01, amps, 0.0)
    np.testing.assert_allclose(psi[[0, 1, 3, 4]], amps)
    # fast amplitudes are first order in omega/g, scaled by their slow parents
    assert abs(psi[9 + 3]) == pytest.approx(0.01 / 2 * amps[0])
    assert abs(psi[9 + 4]) == pytest.approx(0.01 / 4 * amps[1])


def test_adiabatic_reference_sign_flip_and_fast_amplitudes():
    omega = 0.01
    duration = 2 * np.sqrt(2) * np.pi / omega
    psi = adiabatic_reference(omega, np.array([0, 1, 0, 0]), duration)
    assert psi[1] == pytest.approx(-1.0)
    psi00 = adiabatic_reference(omega, np.array([1, 0, 0, 0]), 123.4)
    assert psi00[9 + 3] == pytest.approx(-1j * omega / 2)  # follows c_00


def test_full_solution_tracks_the_adiabatic_reference():
    omega, g = 0.01, 1.0
    spec = gate_schedule("phase", omega)
    h = build_h_cond(SystemParams(g=g, rabi=spec.rabi))
    amps = np.array([1, 1, 1, 1]) / 2.0
    psi0 = embed_qubit(amps, N_MAX)
    prop = EigenPropagator(h)
    worst = 0.0
    for t in np.linspace(0.0, spec.duration, 60):
        diff = prop.apply(psi0, t) - adiabatic_reference(omega, amps, t, g=g)
        worst = max(worst, np.abs(diff).max())
    assert worst <= 5 * omega / g


def test_fock_truncation_is_converged():
    omega = 0.8
    spec = gate_schedule("phase", omega)
    p0_values = {}
    for n_max in (3, 4):
        p = SystemParams(g=1.0, kappa=0.04, gamma=0.04,
                         rabi=spec.rabi, n_max=n_max)
        psi0 = embed_qubit(np.array([0, 1, 0, 0]), n_max)
        psi = EigenPropagator(build_h_cond(p)).apply(psi0, spec.duration)
        p0_values[n_max] = np.vdot(psi, psi).real
    assert abs(p0_values[3] - p0_values[4]) < 1e-6
