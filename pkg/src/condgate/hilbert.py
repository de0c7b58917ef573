"""Basis construction and inner-product algebra for two three-level atoms
coupled to a single truncated cavity mode.

States live on the canonical product basis |n; a1 a2> where n is the cavity
photon number and a1, a2 are the levels of atoms 1 and 2.  The flat index is

    index = 9*n + 3*a1 + a2

so the four qubit states |0;00>, |0;01>, |0;10>, |0;11> occupy the lowest
indices, which keeps CSV output stable across runs and platforms.  States and
operators are plain complex numpy arrays of dimension 9*(n_max+1).
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

ATOM_LEVELS = 3


class BasisLabel(NamedTuple):
    """Product basis label: photon number and the two atomic levels."""

    n: int
    a1: int
    a2: int


def dim_for(n_max: int) -> int:
    """Hilbert-space dimension for a cavity truncated at n_max photons."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    return ATOM_LEVELS**2 * (n_max + 1)


def n_max_for(dim: int) -> int:
    """Recover the Fock truncation from a state/operator dimension."""
    if dim % ATOM_LEVELS**2 != 0 or dim <= 0:
        raise ValueError(f"dimension {dim} is not a multiple of 9")
    return dim // ATOM_LEVELS**2 - 1


def basis_index(label: BasisLabel | tuple[int, int, int], n_max: int) -> int:
    """Flat index of a basis label under the canonical ordering.

    Bijective onto 0 .. 9*(n_max+1)-1; rejects out-of-range labels.
    """
    n, a1, a2 = label
    if not 0 <= n <= n_max:
        raise ValueError(f"photon number {n} outside 0..{n_max}")
    if not (0 <= a1 < ATOM_LEVELS and 0 <= a2 < ATOM_LEVELS):
        raise ValueError(f"atomic levels ({a1}, {a2}) outside 0..2")
    return 9 * n + 3 * a1 + a2


def basis_label(index: int, n_max: int) -> BasisLabel:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < dim_for(n_max):
        raise ValueError(f"index {index} outside 0..{dim_for(n_max) - 1}")
    n, rest = divmod(index, 9)
    a1, a2 = divmod(rest, 3)
    return BasisLabel(n, a1, a2)


def basis_labels(n_max: int) -> Iterable[BasisLabel]:
    """All labels in canonical index order."""
    return (basis_label(i, n_max) for i in range(dim_for(n_max)))


def basis_state(label: BasisLabel | tuple[int, int, int], n_max: int) -> np.ndarray:
    """Unit vector for a single basis label."""
    psi = np.zeros(dim_for(n_max), dtype=complex)
    psi[basis_index(label, n_max)] = 1.0
    return psi


def make_state(
    terms: Sequence[tuple[tuple[int, int, int], complex]] | dict,
    n_max: int,
) -> np.ndarray:
    """Normalized state from (label, amplitude) terms.

    Amplitudes are placed at their canonical indices and the result is
    normalized; an all-zero amplitude list is rejected.
    """
    items = terms.items() if isinstance(terms, dict) else terms
    psi = np.zeros(dim_for(n_max), dtype=complex)
    for label, amp in items:
        psi[basis_index(label, n_max)] += amp
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ValueError("state has zero norm; need at least one nonzero amplitude")
    return psi / nrm


def singlet_triplet(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """The maximally entangled atomic states with the cavity in vacuum.

    Returns (|0;a>, |0;s>) where |a> = (|12> - |21>)/sqrt(2) decouples from
    the atom-cavity interaction and |s> = (|12> + |21>)/sqrt(2) does not.
    """
    anti = make_state([((0, 1, 2), 1.0), ((0, 2, 1), -1.0)], n_max)
    sym = make_state([((0, 1, 2), 1.0), ((0, 2, 1), 1.0)], n_max)
    return anti, sym


def overlap(psi: np.ndarray, phi: np.ndarray) -> complex:
    """Inner product <psi|phi>, conjugate-linear in the first argument."""
    if psi.shape != phi.shape:
        raise ValueError(f"dimension mismatch: {psi.shape} vs {phi.shape}")
    return complex(np.vdot(psi, phi))


QUBIT_LABELS = ("00", "01", "10", "11")


def qubit_basis_indices(n_max: int) -> list[int]:
    """Flat indices of |0;00>, |0;01>, |0;10>, |0;11|."""
    return [basis_index((0, int(l[0]), int(l[1])), n_max) for l in QUBIT_LABELS]


def embed_qubit(amps: np.ndarray, n_max: int) -> np.ndarray:
    """Lift a 4-vector over (00, 01, 10, 11) into the full space (cavity vacuum)."""
    amps = np.asarray(amps, dtype=complex)
    if amps.shape != (4,):
        raise ValueError("expected a length-4 qubit amplitude vector")
    psi = np.zeros(dim_for(n_max), dtype=complex)
    psi[qubit_basis_indices(n_max)] = amps
    return psi


def qubit_part(psi: np.ndarray) -> np.ndarray:
    """Amplitudes of the four qubit basis states within a full-space vector."""
    n_max = n_max_for(psi.shape[0])
    return psi[qubit_basis_indices(n_max)]
