"""Single-qubit states on the Bloch sphere and stabilizer-octahedron geometry.

Convention: a Bloch vector ``b = (x, y, z)`` stands for the density matrix
``rho = (I + x X + y Y + z Z) / 2``. The stabilizer octahedron is the convex
hull of the six Pauli eigenstates, i.e. the unit ball of the l1 norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np
from numpy.typing import ArrayLike

__all__ = [
    "BlochVector",
    "BlochLike",
    "as_bloch_array",
    "PURITY_EPS",
    "phase_angle",
    "phase_state",
    "octahedron_norm",
    "in_octahedron",
    "antipode",
    "bloch_to_density",
    "density_to_bloch",
    "check_density",
    "PAULI_MATRICES",
]

PURITY_EPS = 1e-12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_MATRICES = (_I2, _X, _Y, _Z)


@dataclass(frozen=True)
class BlochVector:
    """A physical qubit state as a real 3-vector with norm at most one."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        if not np.isfinite(r2) or r2 > 1.0 + PURITY_EPS:
            raise ValueError(f"Bloch vector {self.as_tuple()} lies outside the unit ball")

    @classmethod
    def from_array(cls, arr: ArrayLike) -> "BlochVector":
        a = np.asarray(arr, dtype=float).reshape(3)
        return cls(a[0], a[1], a[2])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __iter__(self) -> Iterator[float]:
        return iter(self.as_tuple())

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(self.norm - 1.0) <= tol


BlochLike = Union[BlochVector, ArrayLike]


def as_bloch_array(b: BlochLike) -> np.ndarray:
    if isinstance(b, BlochVector):
        return b.as_array()
    return np.asarray(b, dtype=float).reshape(3)


def phase_angle(theta: float) -> float:
    """Reduce an angle to the canonical range [0, 2*pi)."""
    t = math.fmod(float(theta), 2.0 * math.pi)
    if t < 0.0:
        t += 2.0 * math.pi
    # fmod can round a tiny negative up to exactly 2*pi
    return 0.0 if t >= 2.0 * math.pi else t


def phase_state(theta: float) -> BlochVector:
    """Bloch vector of ``(|0> + e^{i theta}|1>)/sqrt(2)``, on the XY equator."""
    t = phase_angle(theta)
    return BlochVector(math.cos(t), math.sin(t), 0.0)


def octahedron_norm(b: BlochLike) -> float:
    """l1 norm ``|x| + |y| + |z|``; at most one exactly on the stabilizer octahedron."""
    return float(np.abs(as_bloch_array(b)).sum())


def in_octahedron(b: BlochLike, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return octahedron_norm(b) <= 1.0 + tol


def antipode(b: BlochVector, tol: float = 1e-9) -> BlochVector:
    """The pure state diametrically opposite a pure state ``b``."""
    if not isinstance(b, BlochVector):
        b = BlochVector.from_array(b)
    if not b.is_pure(tol):
        raise ValueError(f"antipode is only defined for pure states, got |b| = {b.norm:.12g}")
    return BlochVector(-b.x, -b.y, -b.z)


def bloch_to_density(b: BlochLike) -> np.ndarray:
    x, y, z = as_bloch_array(b)
    if x * x + y * y + z * z > 1.0 + PURITY_EPS:
        raise ValueError("Bloch vector lies outside the unit ball")
    return 0.5 * (_I2 + x * _X + y * _Y + z * _Z)


def check_density(rho: ArrayLike, tol: float = 1e-12) -> np.ndarray:
    """Validate a 2x2 density matrix and return it as a complex array.

    Raises:
        ValueError: if ``rho`` is not Hermitian, not unit trace, or has a
            negative eigenvalue beyond ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.15g}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def density_to_bloch(rho: ArrayLike) -> BlochVector:
    rho = check_density(rho)
    return BlochVector(
        np.trace(rho @ _X).real,
        np.trace(rho @ _Y).real,
        np.trace(rho @ _Z).real,
    )
