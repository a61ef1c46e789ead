"""Dense complex Hermitian matrix algebra.

Eigendecomposition, spectral matrix functions (exp, log), and the
divided-difference directional derivative of the matrix exponential that the
quantum dual solver needs for its Hessian. All values are immutable and all
functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_NUMERICS, NumericsConfig
from .errors import NotPositive, NumericalFailure, Overflow


@dataclass(frozen=True)
class HermitianMatrix:
    """A dim x dim complex Hermitian matrix, symmetrized at construction.

    Raises ValueError when the input deviates from its conjugate transpose by
    more than the configured tolerance; smaller deviations are averaged away
    so the stored array is exactly Hermitian.
    """

    entries: np.ndarray
    config: NumericsConfig = field(default=DEFAULT_NUMERICS, compare=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if np.max(np.abs(a - a.conj().T)) > self.config.hermiticity_atol:
            raise ValueError("matrix is not Hermitian within tolerance")
        a = (a + a.conj().T) / 2.0
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries + other.entries, self.config)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries - other.entries, self.config)

    def __rmul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(float(scalar) * self.entries, self.config)

    @staticmethod
    def zero(dim: int) -> "HermitianMatrix":
        return HermitianMatrix(np.zeros((dim, dim), dtype=complex))

    @staticmethod
    def identity(dim: int) -> "HermitianMatrix":
        return HermitianMatrix(np.eye(dim, dtype=complex))

    @staticmethod
    def diagonal(values) -> "HermitianMatrix":
        return HermitianMatrix(np.diag(np.asarray(values, dtype=float)).astype(complex))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.eigenvalues, dtype=float)
        u = np.asarray(self.eigenvectors, dtype=complex)
        k.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "eigenvalues", k)
        object.__setattr__(self, "eigenvectors", u)

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _hermitize(raw: np.ndarray, config: NumericsConfig) -> HermitianMatrix:
    # For internally computed results: symmetrize first so the construction
    # check never trips on rounding noise at large norms.
    return HermitianMatrix((raw + raw.conj().T) / 2.0, config)


def eig(m: HermitianMatrix) -> EigenDecomposition:
    """Full eigendecomposition with ascending eigenvalues.

    Raises NumericalFailure if the underlying iterative solver exhausts its
    iteration budget without converging.
    """
    try:
        k, u = np.linalg.eigh(m.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    decomp = EigenDecomposition(k, u)
    cfg = m.config
    scale = 1.0 + float(np.max(np.abs(k)))
    if np.max(np.abs(decomp.reconstruct() - m.entries)) > cfg.reconstruction_rtol * scale:
        raise NumericalFailure("eigendecomposition failed the reconstruction bound")
    if np.max(np.abs(u.conj().T @ u - np.eye(m.dim))) > cfg.unitarity_atol:
        raise NumericalFailure("eigenvector matrix is not unitary within tolerance")
    return decomp


def matrix_exp(m: HermitianMatrix) -> HermitianMatrix:
    """exp(m) via the spectral decomposition; Hermitian positive-definite.

    Raises Overflow when the top eigenvalue exceeds the safe range; callers
    that normalize anyway (partition functions) must pre-shift the spectrum.
    """
    decomp = eig(m)
    k = decomp.eigenvalues
    if k[-1] > m.config.exp_overflow:
        raise Overflow(f"max eigenvalue {k[-1]:.3g} exceeds exp range; pre-shift the spectrum")
    u = decomp.eigenvectors
    return _hermitize((u * np.exp(k)) @ u.conj().T, m.config)


def matrix_log(m: HermitianMatrix) -> HermitianMatrix:
    """Spectral logarithm of a positive-semidefinite matrix.

    Eigenvalues below the zero floor are assigned ln = 0 so that entropy-style
    contractions obey the 0 ln 0 = 0 convention; eigenvalues meaningfully
    negative raise NotPositive.
    """
    decomp = eig(m)
    k = decomp.eigenvalues
    if k[0] < -m.config.log_negative_atol:
        raise NotPositive(f"eigenvalue {k[0]:.3g} is negative")
    logk = np.where(k > m.config.log_zero_floor, np.log(np.maximum(k, m.config.log_zero_floor)), 0.0)
    u = decomp.eigenvectors
    return _hermitize((u * logk) @ u.conj().T, m.config)


def _divided_difference(k: np.ndarray, rtol: float) -> np.ndarray:
    """phi(x, y) = (e^x - e^y)/(x - y), with phi(x, x) = e^x.

    Near-degenerate pairs use exp((x + y)/2), second-order accurate and free
    of catastrophic cancellation.
    """
    x = k[:, None]
    y = k[None, :]
    dx = x - y
    close = np.abs(dx) <= rtol * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
    safe = np.where(close, 1.0, dx)
    phi = (np.exp(x) - np.exp(y)) / safe
    return np.where(close, np.exp((x + y) / 2.0), phi)


def frechet_exp_directional(m: HermitianMatrix, h: HermitianMatrix) -> HermitianMatrix:
    """Directional derivative of the matrix exponential at m along h.

    In the eigenbasis of m the derivative is the entrywise product of the
    rotated direction with the divided-difference kernel of exp.
    """
    if m.dim != h.dim:
        raise ValueError(f"dimension mismatch: {m.dim} vs {h.dim}")
    decomp = eig(m)
    u = decomp.eigenvectors
    hp = u.conj().T @ h.entries @ u
    phi = _divided_difference(decomp.eigenvalues, m.config.dd_degeneracy_rtol)
    return _hermitize(u @ (hp * phi) @ u.conj().T, m.config)


def entropy_from_spectrum(eigenvalues: np.ndarray, config: NumericsConfig = DEFAULT_NUMERICS) -> float:
    """-sum k ln k over a probability-like spectrum, with 0 ln 0 = 0."""
    k = np.asarray(eigenvalues, dtype=float)
    k = np.where(k > config.log_zero_floor, k, 0.0)
    nz = k[k > 0.0]
    return float(-np.sum(nz * np.log(nz)))
