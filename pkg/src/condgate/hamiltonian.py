"""Conditional Hamiltonian of two laser-driven three-level atoms in a lossy cavity.

The cavity couples resonantly to the 1-2 transition of both atoms with
strength g; lasers with Rabi frequencies Omega_j^(i) drive the j-2 transition
of atom i.  Monitoring the environment for emitted photons turns the cavity
decay kappa and the atomic decay Gamma of level 2 into anti-Hermitian terms,
giving the non-Hermitian generator of the no-emission evolution (hbar = 1):

    H_cond = i g sum_i b† |1><2|_i + h.c.
           + sum_ij (Omega_j^(i)/2) |j><2|_i + h.c.
           - (i kappa/2) b† b - (i Gamma/2) sum_i |2><2|_i

All rates are quoted in units of g.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .hilbert import ATOM_LEVELS, dim_for

RabiTable = tuple[tuple[complex, complex], tuple[complex, complex]]

ZERO_RABI: RabiTable = ((0.0, 0.0), (0.0, 0.0))


@dataclass(frozen=True)
class SystemParams:
    """Physical rates of the atom-cavity system.

    rabi[i][j] holds Omega_j^(i), the (possibly complex) Rabi frequency of the
    laser on the j-2 transition of atom i+1.  Immutable, so instances can be
    shared freely across concurrent workers.
    """

    g: float = 1.0
    kappa: float = 0.0
    gamma: float = 0.0
    rabi: RabiTable = ZERO_RABI
    n_max: int = 3

    def __post_init__(self):
        # g = 0 is admitted for decay-only limits (pure-decay tests, jump
        # statistics); physical operation assumes g > 0.
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates kappa, gamma must be >= 0")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        tab = tuple(tuple(complex(o) for o in row) for row in self.rabi)
        if len(tab) != 2 or any(len(row) != 2 for row in tab):
            raise ValueError("rabi must be a 2x2 table Omega[atom][transition]")
        object.__setattr__(self, "rabi", tab)

    @property
    def dim(self) -> int:
        return dim_for(self.n_max)

    def rabi_matrix(self) -> np.ndarray:
        return np.array(self.rabi, dtype=complex)

    def with_rabi(self, rabi: RabiTable) -> "SystemParams":
        return replace(self, rabi=rabi)

    def drives_off(self) -> "SystemParams":
        return replace(self, rabi=ZERO_RABI)

    @classmethod
    def from_mapping(cls, values: dict) -> "SystemParams":
        """Build from the flat key-value form used by config files.

        Recognized keys: g, kappa, gamma, omega_1_0, omega_1_1, omega_2_0,
        omega_2_1, n_max.  Unknown keys are rejected.
        """
        known = {"g", "kappa", "gamma", "n_max",
                 "omega_1_0", "omega_1_1", "omega_2_0", "omega_2_1"}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        rabi = [[0j, 0j], [0j, 0j]]
        for atom in (1, 2):
            for j in (0, 1):
                rabi[atom - 1][j] = complex(values.get(f"omega_{atom}_{j}", 0.0))
        return cls(
            g=float(values.get("g", 1.0)),
            kappa=float(values.get("kappa", 0.0)),
            gamma=float(values.get("gamma", 0.0)),
            rabi=(tuple(rabi[0]), tuple(rabi[1])),
            n_max=int(values.get("n_max", 3)),
        )


def load_system_params(path: str | Path) -> SystemParams:
    """Read SystemParams from a flat key/value document.

    Lines look like ``kappa = 0.01`` or ``omega_1_0: 0.1+0.2j``; blank lines
    and ``#`` comments are ignored.
    """
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, _, val = line.partition(sep)
                values[key.strip()] = val.strip()
                break
        else:
            raise ValueError(f"cannot parse config line: {raw!r}")
    return SystemParams.from_mapping(values)


@dataclass(frozen=True)
class JumpOperator:
    """One decay channel of the monitored system.

    rate_tag identifies the channel ("cavity", "atom1" or "atom2");
    target_level is the ground level populated by an atomic decay (None for
    the cavity channel).
    """

    matrix: np.ndarray = field(repr=False)
    rate_tag: str = "cavity"
    target_level: int | None = None


def _atom_op(m: np.ndarray, atom: int) -> np.ndarray:
    """Embed a single-atom 3x3 operator on atom 1 or 2 (atoms only, 9x9)."""
    eye = np.eye(ATOM_LEVELS)
    return np.kron(m, eye) if atom == 1 else np.kron(eye, m)


def _level_op(j: int, k: int) -> np.ndarray:
    m = np.zeros((ATOM_LEVELS, ATOM_LEVELS), dtype=complex)
    m[j, k] = 1.0
    return m


def annihilation_operator(n_max: int) -> np.ndarray:
    """Cavity annihilation operator b on the truncated Fock space."""
    b = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for n in range(1, n_max + 1):
        b[n - 1, n] = np.sqrt(n)
    return b


def _full(cavity_op: np.ndarray, atoms_op: np.ndarray) -> np.ndarray:
    return np.kron(cavity_op, atoms_op)


def level2_population_operator(p: SystemParams) -> np.ndarray:
    """sum_i |2><2|_i on the full space."""
    proj2 = _atom_op(_level_op(2, 2), 1) + _atom_op(_level_op(2, 2), 2)
    return _full(np.eye(p.n_max + 1), proj2)


def photon_number_operator(p: SystemParams) -> np.ndarray:
    b = annihilation_operator(p.n_max)
    return _full(b.conj().T @ b, np.eye(ATOM_LEVELS**2))


def build_h_coherent(p: SystemParams) -> np.ndarray:
    """Hermitian part of the dynamics: cavity coupling plus laser drives.

    Equals build_h_cond with kappa = gamma = 0.
    """
    n_cav = p.n_max + 1
    b = annihilation_operator(p.n_max)
    sigma_12 = _atom_op(_level_op(1, 2), 1) + _atom_op(_level_op(1, 2), 2)
    half = 1j * p.g * _full(b.conj().T, sigma_12)

    drive = np.zeros((ATOM_LEVELS**2, ATOM_LEVELS**2), dtype=complex)
    for atom in (1, 2):
        for j in (0, 1):
            drive += 0.5 * p.rabi[atom - 1][j] * _atom_op(_level_op(j, 2), atom)
    half = half + _full(np.eye(n_cav), drive)
    return half + half.conj().T


def build_h_cond(p: SystemParams) -> np.ndarray:
    """Non-Hermitian generator of the no-emission conditional evolution."""
    h = build_h_coherent(p)
    if p.kappa != 0.0:
        h = h - 0.5j * p.kappa * photon_number_operator(p)
    if p.gamma != 0.0:
        h = h - 0.5j * p.gamma * level2_population_operator(p)
    return h


def jump_operators(p: SystemParams, target_level: int = 0) -> list[JumpOperator]:
    """Decay channels consistent with the anti-Hermitian part of build_h_cond.

    One cavity channel sqrt(kappa) b and one channel sqrt(Gamma) |t><2|_i per
    atom.  Level 2 carries a single total width, so the branching target t is
    a free choice; any emission aborts a gate, which makes the no-emission
    statistics independent of it.
    """
    if target_level not in (0, 1):
        raise ValueError(f"atomic decay target must be a ground level, got {target_level}")
    ops: list[JumpOperator] = []
    eye9 = np.eye(ATOM_LEVELS**2)
    if p.kappa > 0.0:
        ops.append(JumpOperator(
            matrix=np.sqrt(p.kappa) * _full(annihilation_operator(p.n_max), eye9),
            rate_tag="cavity",
        ))
    if p.gamma > 0.0:
        lower = _level_op(target_level, 2)
        for atom in (1, 2):
            ops.append(JumpOperator(
                matrix=np.sqrt(p.gamma) * _full(np.eye(p.n_max + 1), _atom_op(lower, atom)),
                rate_tag=f"atom{atom}",
                target_level=target_level,
            ))
    return ops


def decay_rate_operator(p: SystemParams) -> np.ndarray:
    """sum_c L_c† L_c = kappa b†b + Gamma sum_i |2><2|_i.

    Equals -2 times the anti-Hermitian part of build_h_cond divided by -i,
    i.e. i (H_cond - H_cond†).
    """
    return p.kappa * photon_number_operator(p) + p.gamma * level2_population_operator(p)


def excitation_number_operator(p: SystemParams) -> np.ndarray:
    """b†b + sum_i |2><2|_i, conserved by the drive-free dynamics."""
    return photon_number_operator(p) + level2_population_operator(p)
