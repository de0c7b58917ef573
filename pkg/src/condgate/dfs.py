"""Decoherence-free subspace extraction and the projected effective dynamics.

A state is decoherence-free when its no-emission survival probability stays
at one for all times, which makes the DFS the span of conditional-Hamiltonian
eigenvectors with real eigenvalues.  With the lasers off and Gamma = 0 that
span is analytic: the four qubit states plus the antisymmetric entangled
state |0;a>.  The spectral route recovers the same subspace numerically from
a biorthogonal eigendecomposition and serves as an independent check.

Weak drives then act inside the subspace through H_eff = P H_cond P, the
continuously monitored environment suppressing transitions out of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import SystemParams, build_h_cond
from .hilbert import basis_state, dim_for, singlet_triplet


class DefectiveEigenbasisError(RuntimeError):
    """Eigenbasis too ill-conditioned for a trustworthy biorthogonal split."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Biorthogonal eigendecomposition H = sum_k lam_k |v_k><w_k|.

    Columns of ``right`` are the eigenvectors |v_k>; columns of ``reciprocal``
    are |w_k| with <w_k|v_j> = delta_jk.  Eigenvectors of a non-normal matrix
    are in general not orthogonal, so both families are needed.
    """

    eigenvalues: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    reciprocal: np.ndarray = field(repr=False)
    condition: float = 1.0

    @property
    def dim(self) -> int:
        return self.right.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.right * self.eigenvalues) @ self.reciprocal.conj().T


@dataclass(frozen=True)
class DfsBasis:
    """Orthonormal basis of the decoherence-free subspace.

    ``vectors`` has one basis vector per row; provenance records whether it
    came from the closed form or from the spectral route.
    """

    vectors: np.ndarray = field(repr=False)
    provenance: str = "analytic"

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class ZenoReport:
    """Diagnostics for approximating U_cond(dt) by its DFS restriction."""

    dt: float
    dfs_dim: int
    max_decay_factor: float
    residual: float
    tolerance: float
    satisfied: bool


def spectral_decompose(h: np.ndarray, tol: float = 1e-9,
                       cond_max: float = 1e12) -> SpectralDecomposition:
    """Eigendecompose a (generally non-Hermitian) square matrix.

    Raises DefectiveEigenbasisError when the eigenvector matrix is too
    ill-conditioned to invert reliably or the reconstruction residual exceeds
    ``tol`` relative to the matrix norm; callers should then fall back to the
    analytic basis.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    lam, v = np.linalg.eig(h)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > cond_max:
        raise DefectiveEigenbasisError(
            f"eigenbasis condition number {cond:.3e} exceeds {cond_max:.1e}; "
            "matrix is defective or nearly so")
    w = np.linalg.inv(v).conj().T
    decomp = SpectralDecomposition(eigenvalues=lam, right=v, reciprocal=w,
                                   condition=float(cond))
    scale = max(1.0, np.linalg.norm(h, ord=2))
    residual = np.linalg.norm(decomp.reconstruct() - h, ord=2) / scale
    if residual > tol:
        raise DefectiveEigenbasisError(
            f"reconstruction residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return decomp


def analytic_dfs(n_max: int) -> DfsBasis:
    """Closed-form DFS for Gamma = 0: qubit states plus |0;a>.

    The antisymmetric state cannot hand its excitation to the cavity mode, so
    no photon can ever leak through the mirrors from any superposition of
    these five states.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    anti, _ = singlet_triplet(n_max)
    rows = [basis_state((0, a1, a2), n_max) for a1 in (0, 1) for a2 in (0, 1)]
    rows.append(anti)
    return DfsBasis(vectors=np.array(rows), provenance="analytic")


def _gram_schmidt(rows: np.ndarray, drop_tol: float = 1e-12) -> np.ndarray:
    """Modified Gram-Schmidt on the rows, dropping near-dependent vectors."""
    out: list[np.ndarray] = []
    for row in rows:
        v = row.astype(complex).copy()
        for u in out:
            v -= np.vdot(u, v) * u
        # second pass for numerical orthogonality
        for u in out:
            v -= np.vdot(u, v) * u
        nrm = np.linalg.norm(v)
        if nrm > drop_tol:
            out.append(v / nrm)
    return np.array(out) if out else np.zeros((0, rows.shape[1]), dtype=complex)


def dfs_from_spectrum(decomp: SpectralDecomposition, tol: float = 1e-8,
                      g: float = 1.0) -> DfsBasis:
    """Orthonormalized span of eigenvectors with |Im lambda| < tol*g.

    An empty selection is a valid outcome (basis of dimension zero).
    Individual vectors within a degenerate block are not contractual, only
    the span is.
    """
    keep = np.abs(decomp.eigenvalues.imag) < tol * g
    selected = decomp.right[:, keep].T
    return DfsBasis(vectors=_gram_schmidt(selected), provenance="spectral")


def spectral_dfs(p: SystemParams, tol: float = 1e-8) -> DfsBasis:
    """Spectral DFS of the undriven system at Gamma = 0.

    With any drive on, the dressed qubit states pick up small imaginary
    parts, so the subspace protected against cavity leakage is a property of
    the drive-free generator; this is the projector the Zeno picture uses.
    """
    h = build_h_cond(SystemParams(g=p.g, kappa=p.kappa, gamma=0.0, n_max=p.n_max))
    scale = p.g if p.g > 0 else 1.0
    return dfs_from_spectrum(spectral_decompose(h), tol=tol, g=scale)


def dfs_projector(basis: DfsBasis) -> np.ndarray:
    """Orthogonal projector onto the subspace spanned by ``basis``."""
    if basis.dim == 0:
        raise ValueError("cannot infer dimension from an empty basis; "
                         "use dfs_projector_for_dim")
    return basis.vectors.conj().T @ basis.vectors


def dfs_projector_for_dim(basis: DfsBasis, dim: int) -> np.ndarray:
    """Projector for a possibly empty basis on a space of known dimension."""
    if basis.dim == 0:
        return np.zeros((dim, dim), dtype=complex)
    p = dfs_projector(basis)
    if p.shape[0] != dim:
        raise ValueError(f"basis dimension {p.shape[0]} does not match {dim}")
    return p


def effective_hamiltonian(h_cond: np.ndarray, projector: np.ndarray) -> np.ndarray:
    """Generator of the monitored dynamics inside the DFS: P H_cond P."""
    if h_cond.shape != projector.shape:
        raise ValueError("H and projector dimensions differ")
    return projector @ h_cond @ projector


def drive_coupling_on_dfs(p: SystemParams) -> np.ndarray:
    """Closed form of P H_cond P for the analytic DFS at Gamma = 0.

    The drives couple the qubit states to |0;a> only:

        (1/(2 sqrt 2)) [ -Omega_0^(1) |01><a| + Omega_0^(2) |10><a|
                         + (Omega_1^(2) - Omega_1^(1)) |11><a| ] + h.c.

    Used as the independent reference for the projected-Hamiltonian algebra.
    """
    dim = dim_for(p.n_max)
    anti, _ = singlet_triplet(p.n_max)
    coeffs = {
        (0, 1): -p.rabi[0][0],
        (1, 0): p.rabi[1][0],
        (1, 1): p.rabi[1][1] - p.rabi[0][1],
    }
    half = np.zeros((dim, dim), dtype=complex)
    for (a1, a2), c in coeffs.items():
        half += c / (2.0 * np.sqrt(2.0)) * np.outer(basis_state((0, a1, a2), p.n_max),
                                                    anti.conj())
    return half + half.conj().T


def zeno_condition_check(decomp: SpectralDecomposition, dt: float,
                         dfs_tol: float = 1e-8, g: float = 1.0,
                         residual_tol: float = 1e-6) -> ZenoReport:
    """Check whether U_cond(dt) has collapsed onto its DFS restriction.

    Reports the largest surviving decay factor |exp(-i lambda dt)| over the
    non-real eigenvalues and the spectral-norm residual between U_cond(dt)
    and the sum restricted to DFS eigenvectors.  At dt = 0 the residual is
    the norm of the complement projector; it decays to zero as every unstable
    amplitude dies out.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    keep = np.abs(decomp.eigenvalues.imag) < dfs_tol * g
    factors = np.exp(-1j * decomp.eigenvalues * dt)
    u_full = (decomp.right * factors) @ decomp.reciprocal.conj().T
    u_dfs = (decomp.right[:, keep] * factors[keep]) @ decomp.reciprocal[:, keep].conj().T
    residual = float(np.linalg.norm(u_full - u_dfs, ord=2))
    non_dfs = np.abs(factors[~keep])
    max_decay = float(non_dfs.max()) if non_dfs.size else 0.0
    return ZenoReport(dt=dt, dfs_dim=int(keep.sum()), max_decay_factor=max_decay,
                      residual=residual, tolerance=residual_tol,
                      satisfied=residual < residual_tol)
