"""Qubit channels as affine maps ``b -> M b + c`` on Bloch vectors.

Every noise process in the injection analysis acts on one qubit at a time
(pair noise after a CNOT is Pauli, and is reduced separately), so a 3x3
matrix plus an offset is a complete description. ``choi_psd_check`` turns the
affine data back into a Choi matrix so complete positivity stays testable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.typing import ArrayLike

from .qubit import PAULI_MATRICES, BlochLike, BlochVector, as_bloch_array

__all__ = [
    "PauliOp",
    "AffineChannel",
    "IDENTITY",
    "pauli_channel",
    "pauli_mixture",
    "pauli_probabilities",
    "mix_with",
    "opposite_noise",
    "orthogonal_flip",
    "depolarizing",
    "compose",
    "apply",
    "unitary_rotation",
    "unitary_channel",
    "conjugate",
    "choi_matrix",
    "choi_psd_check",
]


class PauliOp(enum.Enum):
    """Single-qubit Pauli, valued by its (x, z) symplectic bits."""

    I = (0, 0)
    X = (1, 0)
    Y = (1, 1)
    Z = (0, 1)

    def then(self, other: "PauliOp") -> "PauliOp":
        """Product as channels; global phases drop out so X.then(Z) is Y."""
        x1, z1 = self.value
        x2, z2 = other.value
        return PauliOp((x1 ^ x2, z1 ^ z2))

    @property
    def matrix(self) -> np.ndarray:
        return PAULI_MATRICES[_PAULI_INDEX[self]]

    @classmethod
    def parse(cls, label: str) -> "PauliOp":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown Pauli label {label!r}") from None


_PAULI_INDEX = {PauliOp.I: 0, PauliOp.X: 1, PauliOp.Y: 2, PauliOp.Z: 3}

# Bloch-axis signs under conjugation by each Pauli
_PAULI_SIGNS = {
    PauliOp.I: (1.0, 1.0, 1.0),
    PauliOp.X: (1.0, -1.0, -1.0),
    PauliOp.Y: (-1.0, 1.0, -1.0),
    PauliOp.Z: (-1.0, -1.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class AffineChannel:
    """Qubit channel acting on Bloch vectors as ``b -> M @ b + c``."""

    M: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        M = np.array(self.M, dtype=float).reshape(3, 3)
        c = np.array(self.c, dtype=float).reshape(3)
        M.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", c)

    def __call__(self, b: BlochLike) -> np.ndarray:
        return self.M @ as_bloch_array(b) + self.c

    def __matmul__(self, other: "AffineChannel") -> "AffineChannel":
        return compose(self, other)

    def allclose(self, other: "AffineChannel", atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.M, other.M, rtol=0.0, atol=atol)
            and np.allclose(self.c, other.c, rtol=0.0, atol=atol)
        )

    def max_deviation(self, other: "AffineChannel") -> float:
        return float(max(np.abs(self.M - other.M).max(), np.abs(self.c - other.c).max()))

    def is_diagonal(self, tol: float = 0.0) -> bool:
        """True for unital maps with diagonal matrix, i.e. Pauli-diagonal form."""
        off = self.M - np.diag(np.diag(self.M))
        return bool(np.abs(off).max() <= tol and np.abs(self.c).max() <= tol)

    def __repr__(self) -> str:
        return f"AffineChannel(M={self.M.tolist()!r}, c={self.c.tolist()!r})"


IDENTITY = AffineChannel(np.eye(3), np.zeros(3))


def _check_probability(t: float, name: str = "t") -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {t!r}")
    return t


def pauli_channel(P: PauliOp) -> AffineChannel:
    return AffineChannel(np.diag(_PAULI_SIGNS[P]), np.zeros(3))


def pauli_mixture(dist: Mapping[PauliOp, float]) -> AffineChannel:
    """Diagonal channel ``rho -> sum_P p_P P rho P``."""
    total = sum(dist.values())
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"Pauli distribution sums to {total!r}, not 1")
    diag = np.zeros(3)
    for P, p in dist.items():
        if p < -1e-15:
            raise ValueError(f"negative probability {p!r} for {P.name}")
        diag += p * np.asarray(_PAULI_SIGNS[P])
    return AffineChannel(np.diag(diag), np.zeros(3))


def pauli_probabilities(ch: AffineChannel, tol: float = 1e-12) -> dict[PauliOp, float]:
    """Invert ``pauli_mixture``: recover {I, X, Y, Z} weights of a Pauli-diagonal map.

    Raises:
        ValueError: if the map is not diagonal-unital or the weights are not a
            probability distribution.
    """
    if not ch.is_diagonal(tol):
        raise ValueError("channel is not a Pauli mixture (non-diagonal or offset)")
    lx, ly, lz = np.diag(ch.M)
    probs = {
        PauliOp.I: (1 + lx + ly + lz) / 4,
        PauliOp.X: (1 + lx - ly - lz) / 4,
        PauliOp.Y: (1 - lx + ly - lz) / 4,
        PauliOp.Z: (1 - lx - ly + lz) / 4,
    }
    if min(probs.values()) < -tol:
        raise ValueError(f"diagonal map {np.diag(ch.M)} is not a Pauli mixture")
    return {P: max(p, 0.0) for P, p in probs.items()}


def mix_with(Q: AffineChannel, t: float) -> AffineChannel:
    """Identity with probability 1 - t, ``Q`` with probability t."""
    t = _check_probability(t)
    return AffineChannel((1 - t) * np.eye(3) + t * Q.M, t * Q.c)


def opposite_noise(sigma: BlochLike, t: float, tol: float = 1e-9) -> AffineChannel:
    """With probability t, discard the qubit and prepare the pure antipode of ``sigma``."""
    t = _check_probability(t)
    s = as_bloch_array(sigma)
    if abs(np.linalg.norm(s) - 1.0) > tol:
        raise ValueError("opposite noise needs a pure reference state")
    return AffineChannel((1 - t) * np.eye(3), -t * s)


def orthogonal_flip(t: float) -> AffineChannel:
    """Faulty preparation of a known pure state: the orthogonal state with probability t.

    On the intended state this is ``b -> (1 - 2t) b``. Written as a channel
    it is the isotropic contraction, which is completely positive for
    ``t <= 2/3`` and commutes with every unitary.
    """
    t = _check_probability(t)
    if t > 2.0 / 3.0:
        raise ValueError("orthogonal flip is not completely positive above t = 2/3")
    return AffineChannel((1 - 2 * t) * np.eye(3), np.zeros(3))


def depolarizing() -> AffineChannel:
    return AffineChannel(np.zeros((3, 3)), np.zeros(3))


def compose(A: AffineChannel, B: AffineChannel) -> AffineChannel:
    """``A o B``: apply B first, then A."""
    return AffineChannel(A.M @ B.M, A.M @ B.c + A.c)


def apply(ch: AffineChannel, b: BlochLike) -> BlochVector:
    return BlochVector.from_array(ch(b))


def unitary_rotation(U: ArrayLike) -> np.ndarray:
    """SO(3) matrix ``R_ij = tr(s_i U s_j U^dag) / 2`` of a 2x2 unitary."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or not np.allclose(U.conj().T @ U, np.eye(2), atol=1e-12):
        raise ValueError("expected a 2x2 unitary")
    Ud = U.conj().T
    R = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            R[i, j] = 0.5 * np.trace(PAULI_MATRICES[i + 1] @ U @ PAULI_MATRICES[j + 1] @ Ud).real
    return R


def unitary_channel(U: ArrayLike) -> AffineChannel:
    return AffineChannel(unitary_rotation(U), np.zeros(3))


def conjugate(ch: AffineChannel, R: np.ndarray) -> AffineChannel:
    """The channel ``R o ch o R^T`` seen in a frame rotated by ``R``."""
    R = np.asarray(R, dtype=float)
    return AffineChannel(R @ ch.M @ R.T, R @ ch.c)


def _action(ch: AffineChannel, E: np.ndarray) -> np.ndarray:
    # Linear extension to arbitrary operators via the Pauli basis:
    # Phi(I) = I + c.s and Phi(s_j) = sum_i M_ij s_i.
    sig = PAULI_MATRICES
    out = 0.5 * np.trace(E) * (sig[0] + sum(ch.c[i] * sig[i + 1] for i in range(3)))
    for j in range(3):
        coeff = 0.5 * np.trace(sig[j + 1] @ E)
        if coeff != 0:
            out = out + coeff * sum(ch.M[i, j] * sig[i + 1] for i in range(3))
    return out


def choi_matrix(ch: AffineChannel) -> np.ndarray:
    """Choi matrix ``sum_ab |a><b| (x) Phi(|a><b|)``, input factor first."""
    J = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            E = np.zeros((2, 2), dtype=complex)
            E[a, b] = 1.0
            J += np.kron(E, _action(ch, E))
    return J


def choi_psd_check(ch: AffineChannel, tol: float = 1e-10) -> bool:
    """True iff the channel is completely positive and trace preserving within ``tol``."""
    J = choi_matrix(ch)
    if np.max(np.abs(J - J.conj().T)) > tol:
        return False
    if np.linalg.eigvalsh(0.5 * (J + J.conj().T)).min() < -tol:
        return False
    # trace over the output factor must give the identity on the input
    partial = np.einsum("aibi->ab", J.reshape(2, 2, 2, 2))
    return bool(np.max(np.abs(partial - np.eye(2))) <= tol)
