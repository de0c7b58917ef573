"""No-emission time evolution and the gate quality functionals built on it.

The conditional state obeys the Schrodinger equation i d|psi>/dt = H_cond
|psi> with a non-Hermitian generator, so the norm is not conserved: the
squared norm of the unnormalized state is the probability that no photon has
been emitted up to that time,

    P0(t, psi) = || U_cond(t, 0) |psi> ||^2,

and it can only decrease while kappa, Gamma >= 0.  Three propagation routes
are provided and cross-checked against each other:

* ``propagate``        adaptive Runge-Kutta (DOP853) producing a sampled
                       trajectory; the contractual path.
* ``evolve_expm``      scaling-and-squaring matrix exponential; the
                       independent oracle the integrator is tested against.
* ``EigenPropagator``  spectral propagator for time-independent H; fast
                       repeated evaluation at arbitrary times (sweeps, jump
                       sampling).

The conditional gate fidelity compares the renormalized no-emission state
with the ideal gate output:  F = |<psi0| U_target^dag |psi_T>|^2 / P0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import dfs as _dfs
from .hamiltonian import SystemParams, build_h_cond
from .hilbert import dim_for, embed_qubit, n_max_for, qubit_part


class PropagationError(RuntimeError):
    """Integrator failed or produced an unphysical (norm-increasing) result."""


class DampingConvergenceError(RuntimeError):
    """Transition damping could not reach the requested residual in time."""


@dataclass(frozen=True)
class Trajectory:
    """Sampled no-emission evolution.

    ``states`` holds the unnormalized conditional state at each sample time
    (one row per time); ``norm2`` caches the squared norms, i.e. P0(t).
    """

    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    norm2: np.ndarray = field(repr=False)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1])


def propagate(h: np.ndarray, psi0: np.ndarray, duration: float,
              tol: float = 1e-10, n_samples: int = 2000) -> Trajectory:
    """Integrate i d|psi>/dt = H |psi> on a fixed output grid.

    The output grid is independent of the adaptive internal steps so CSV
    output is reproducible.  The local error per step is bounded by ``tol``;
    agreement with the matrix-exponential oracle is what the test suite pins.
    """
    if duration <= 0:
        raise ValueError(f"duration must be > 0, got {duration}")
    psi0 = np.asarray(psi0, dtype=complex)
    times = np.linspace(0.0, duration, n_samples)
    sol = solve_ivp(lambda _t, y: -1j * (h @ y), (0.0, duration), psi0,
                    method="DOP853", rtol=tol, atol=tol * 1e-2, t_eval=times)
    if not sol.success:
        raise PropagationError(f"integration aborted: {sol.message}")
    states = sol.y.T.copy()
    norm2 = np.einsum("ij,ij->i", states.conj(), states).real
    growth = np.diff(norm2).max(initial=0.0)
    if growth > 1e-6:
        raise PropagationError(
            f"squared norm grew by {growth:.2e} along the trajectory; "
            "generator is not dissipative or tolerance is too loose")
    return Trajectory(times=times, states=states, norm2=norm2)


def no_photon_probability(traj: Trajectory, t: float) -> float:
    """P0 at time t, linearly interpolated between trajectory samples."""
    if t < traj.times[0] or t > traj.times[-1]:
        raise ValueError(f"t={t} outside sampled range "
                         f"[{traj.times[0]}, {traj.times[-1]}]")
    return float(np.interp(t, traj.times, traj.norm2))


def matrix_exponential(a: np.ndarray) -> np.ndarray:
    """exp(a) by scaling and squaring with a truncated Taylor core.

    The argument is scaled by 2**-s until its 1-norm is below 0.25, the
    exponential of the scaled matrix is summed to order 16 (well past double
    precision at that norm), and the result is squared s times.  Independent
    of the Runge-Kutta route by construction.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.25)))) if norm > 0.25 else 0
    b = a / (2.0 ** squarings)
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 17):
        term = term @ b / k
        result += term
    for _ in range(squarings):
        result = result @ result
    return result


def evolve_expm(h: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    """Oracle propagation: exp(-i H t) |psi0>."""
    return matrix_exponential(-1j * np.asarray(h, dtype=complex) * t) @ psi0


class EigenPropagator:
    """Spectral propagator psi(t) = V exp(-i lam t) V^-1 psi0.

    Valid for diagonalizable time-independent generators; raises
    DefectiveEigenbasisError through spectral_decompose otherwise.  Cheap to
    evaluate at arbitrary times once constructed, which is what parameter
    sweeps and jump-time sampling need.
    """

    def __init__(self, h: np.ndarray):
        decomp = _dfs.spectral_decompose(h, tol=1e-7)
        self.eigenvalues = decomp.eigenvalues
        self._v = decomp.right
        self._vinv = decomp.reciprocal.conj().T

    def coefficients(self, psi0: np.ndarray) -> np.ndarray:
        return self._vinv @ psi0

    def apply(self, psi0: np.ndarray, t: float) -> np.ndarray:
        return self._v @ (np.exp(-1j * self.eigenvalues * t) * (self._vinv @ psi0))

    def apply_coefficients(self, coeffs: np.ndarray, t: float) -> np.ndarray:
        return self._v @ (np.exp(-1j * self.eigenvalues * t) * coeffs)

    def states_on_grid(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        coeffs = self._vinv @ psi0
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        return (self._v @ (phases * coeffs).T).T


def conditional_fidelity(psi0: np.ndarray, target: np.ndarray,
                         psi_final: np.ndarray) -> tuple[float, float]:
    """Fidelity and success probability of a conditional gate run.

    ``psi0`` is the normalized initial state (qubit subspace, cavity vacuum),
    ``target`` the ideal 4x4 unitary on (00, 01, 10, 11), and ``psi_final``
    the raw unnormalized no-emission final state.  Returns (F, P0) with

        F = |<psi0| U_target^dag |psi_final>|^2 / P0,   P0 = ||psi_final||^2.

    Raises when P0 is below 1e-12 (all runs emitted; fidelity undefined).
    """
    target = np.asarray(target, dtype=complex)
    if target.shape != (4, 4):
        raise ValueError(f"target must be a 4x4 qubit unitary, got {target.shape}")
    if psi0.shape != psi_final.shape:
        raise ValueError("initial and final states have different dimensions")
    p0 = float(np.vdot(psi_final, psi_final).real)
    if p0 < 1e-12:
        raise ValueError("no-emission probability below 1e-12; fidelity undefined")
    n_max = n_max_for(psi0.shape[0])
    ideal = embed_qubit(target @ qubit_part(psi0), n_max)
    # the target acts as the identity outside the qubit subspace
    ideal += psi0 - embed_qubit(qubit_part(psi0), n_max)
    fid = abs(np.vdot(ideal, psi_final)) ** 2 / p0
    return float(fid), p0


class TransitionDamper:
    """End-of-gate damping of every amplitude carrying a decay rate.

    Propagates under the drive-free conditional Hamiltonian until the
    population outside the Gamma=0 decoherence-free subspace has fallen below
    a threshold, mirroring the short transition window appended to each gate
    during which unstable amplitudes disappear.  Construct once per parameter
    set and reuse across gate runs; the drive strength never enters.
    """

    def __init__(self, params: SystemParams, eps: float = 1e-8,
                 t_cap: float | None = None):
        if eps <= 0:
            raise ValueError("eps must be > 0")
        self.params = params
        self.eps = eps
        rates = [r for r in (params.kappa, params.gamma) if r > 0]
        self.active = bool(rates)
        if self.active:
            self._prop = EigenPropagator(build_h_cond(params.drives_off()))
            self._step = 1.0 / max(rates)
            self.t_cap = 50.0 / min(rates) if t_cap is None else t_cap
        basis = _dfs.analytic_dfs(params.n_max)
        self._complement = np.eye(dim_for(params.n_max)) - _dfs.dfs_projector(basis)

    def outside_population(self, psi: np.ndarray) -> float:
        leak = self._complement @ psi
        return float(np.vdot(leak, leak).real)

    def damp(self, psi: np.ndarray) -> tuple[np.ndarray, float]:
        """Return the damped (still unnormalized) state and the time used."""
        if self.outside_population(psi) < self.eps:
            return psi, 0.0
        if not self.active:
            raise DampingConvergenceError(
                "no decay channel available to damp residual population")
        t = 0.0
        while t < self.t_cap:
            nxt = self._prop.apply(psi, self._step)
            if self.outside_population(nxt) < self.eps:
                lo, hi = 0.0, self._step
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if self.outside_population(self._prop.apply(psi, mid)) < self.eps:
                        hi = mid
                    else:
                        lo = mid
                return self._prop.apply(psi, hi), t + hi
            psi, t = nxt, t + self._step
        raise DampingConvergenceError(
            f"residual population still above {self.eps:.1e} after t={self.t_cap:.3g}; "
            "threshold too small for the surviving dark amplitudes")


def damp_transition(psi: np.ndarray, params: SystemParams,
                    eps: float = 1e-8) -> tuple[np.ndarray, float]:
    """One-shot convenience wrapper around :class:`TransitionDamper`."""
    return TransitionDamper(params, eps=eps).damp(psi)


def adiabatic_reference(omega: float, qubit_amps: np.ndarray, t: float,
                        g: float = 1.0, n_max: int = 3) -> np.ndarray:
    """Closed-form slow dynamics of the single-drive (phase-gate) scheme.

    For one laser of strength Omega on the 0-2 transition of atom 1, with
    Omega << g and no decay, eliminating the fast states leaves

        c_01' = (i Omega / 2 sqrt 2) c_a,   c_a' = (i Omega / 2 sqrt 2) c_01,
        c_10' = c_11' = 0,

    while the fast amplitudes follow the slow ones,

        c_{1;10} = -i Omega/(2 g) c_00,   c_{1;11} = -i Omega/(4 g) c_01,

    and c_{0;20} = c_{0;s} = 0 to first order in Omega/g.  Returns the
    full-space state predicted at time t for a qubit-subspace initial state.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1 to hold the fast amplitudes")
    amps = np.asarray(qubit_amps, dtype=complex)
    if amps.shape != (4,):
        raise ValueError("expected a length-4 qubit amplitude vector")
    c00, c01, c10, c11 = amps
    theta = omega * t / (2.0 * np.sqrt(2.0))
    c01_t = np.cos(theta) * c01          # initial c_a is zero for qubit input
    ca_t = 1j * np.sin(theta) * c01
    psi = embed_qubit(np.array([c00, c01_t, c10, c11]), n_max)
    anti = _dfs.analytic_dfs(n_max).vectors[4]
    psi = psi + ca_t * anti
    fast = np.zeros_like(psi)
    fast[9 * 1 + 3 * 1 + 0] = -1j * omega / (2.0 * g) * c00   # |1;10>
    fast[9 * 1 + 3 * 1 + 1] = -1j * omega / (4.0 * g) * c01_t  # |1;11>
    return psi + fast
