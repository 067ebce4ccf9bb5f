"""Brute-force density-matrix simulation of the noisy injection circuits.

This is the independent check on the shift engine: nothing here knows a
shifting rule. Noise is applied where it physically sits, both teleportation
measurements are summed over outcomes with their Pauli corrections, and the
resulting single-qubit channel is read off by tomography.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .channels import AffineChannel, PauliOp, choi_matrix
from .noise import CONTROL_INPUT, InjectionVariant, LocationNoise, PairDistribution, ResourceSpec
from .qubit import PAULI_MATRICES, BlochLike, BlochVector, as_bloch_array, bloch_to_density
from .solver import XTOL, ThresholdResult, octahedron_threshold

__all__ = [
    "MAX_QUBITS",
    "MultiQubitState",
    "PrepareState",
    "Gate",
    "Channel",
    "PairChannel",
    "MeasureWithCorrection",
    "Discard",
    "Circuit",
    "kraus_operators",
    "build_injection_circuit",
    "run_circuit",
    "simulate_channel",
    "oracle_threshold",
    "HADAMARD",
    "CNOT",
]

MAX_QUBITS = 6
WIRES = ("A", "B", "C")

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

_PROJ = {
    "Z": (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)),
    "X": (
        0.5 * np.array([[1, 1], [1, 1]], dtype=complex),
        0.5 * np.array([[1, -1], [-1, 1]], dtype=complex),
    ),
}


@dataclass
class MultiQubitState:
    """Dense density matrix over labelled qubits; label order is tensor order."""

    rho: np.ndarray
    labels: list[str]

    def __post_init__(self) -> None:
        if len(self.labels) > MAX_QUBITS:
            raise ValueError(f"dense simulation is capped at {MAX_QUBITS} qubits")
        d = 2 ** len(self.labels)
        if self.rho.shape != (d, d):
            raise ValueError("density matrix does not match the qubit count")

    def check(self, tol: float = 1e-10) -> None:
        r = self.rho
        if np.max(np.abs(r - r.conj().T), initial=0.0) > tol:
            raise ValueError("state is not Hermitian")
        if abs(np.trace(r) - 1.0) > tol:
            raise ValueError(f"state has trace {np.trace(r).real!r}")
        if np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min() < -tol:
            raise ValueError("state is not positive semidefinite")

    def add(self, label: str, rho1: np.ndarray) -> None:
        if label in self.labels:
            raise ValueError(f"qubit {label!r} already exists")
        self.rho = np.kron(self.rho, rho1)
        self.labels = self.labels + [label]
        self.__post_init__()

    def apply_kraus(self, kraus: Sequence[np.ndarray], wires: Sequence[str]) -> None:
        n = len(self.labels)
        idx = [self.labels.index(w) for w in wires]
        k = len(idx)
        T = self.rho.reshape((2,) * (2 * n))
        out = np.zeros_like(T)
        for K in kraus:
            Kt = K.reshape((2,) * (2 * k))
            # ket side
            X = np.tensordot(Kt, T, axes=(list(range(k, 2 * k)), idx))
            X = np.moveaxis(X, list(range(k)), idx)
            # bra side
            X = np.tensordot(X, Kt.conj(), axes=([n + i for i in idx], list(range(k, 2 * k))))
            X = np.moveaxis(X, list(range(2 * n - k, 2 * n)), [n + i for i in idx])
            out += X
        self.rho = out.reshape(self.rho.shape)

    def discard(self, label: str) -> None:
        n = len(self.labels)
        i = self.labels.index(label)
        T = self.rho.reshape((2,) * (2 * n))
        T = np.trace(T, axis1=i, axis2=n + i)
        d = 2 ** (n - 1)
        self.rho = T.reshape(d, d)
        self.labels = [w for w in self.labels if w != label]


@dataclass(frozen=True)
class PrepareState:
    """Fresh qubit; ``bloch=None`` marks the designated input wire."""

    label: str
    bloch: Optional[BlochVector] = None


@dataclass(frozen=True)
class Gate:
    unitary: np.ndarray = field(repr=False)
    wires: tuple[str, ...]
    name: str = ""

    def __post_init__(self) -> None:
        U = self.unitary
        if U.shape != (2 ** len(self.wires),) * 2 or len(self.wires) > 2:
            raise ValueError("gates act on one or two wires")
        if np.max(np.abs(U @ U.conj().T - np.eye(len(U)))) > 1e-12:
            raise ValueError(f"gate {self.name!r} is not unitary")


@dataclass(frozen=True)
class Channel:
    location: Union[int, str]
    wire: str
    channel: AffineChannel


@dataclass(frozen=True)
class PairChannel:
    wires: tuple[str, str]
    distribution: PairDistribution


@dataclass(frozen=True)
class MeasureWithCorrection:
    """Measure ``wire`` in ``basis``; on outcome 1 apply ``correction`` to ``target``."""

    wire: str
    basis: str
    correction: PauliOp
    target: str


@dataclass(frozen=True)
class Discard:
    label: str


CircuitStep = Union[PrepareState, Gate, Channel, PairChannel, MeasureWithCorrection, Discard]


@dataclass(frozen=True)
class Circuit:
    steps: tuple[CircuitStep, ...]
    input_wire: str
    output_wire: str


def kraus_operators(ch: AffineChannel, tol: float = 1e-12) -> list[np.ndarray]:
    """Kraus form of a qubit channel from the eigendecomposition of its Choi matrix."""
    J = choi_matrix(ch)
    vals, vecs = np.linalg.eigh(0.5 * (J + J.conj().T))
    if vals.min() < -1e-10:
        raise ValueError("channel is not completely positive")
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam > tol:
            # Choi index is (input, output); the Kraus matrix is (output, input)
            ops.append(math.sqrt(lam) * v.reshape(2, 2).T)
    return ops


def build_injection_circuit(
    variant: InjectionVariant, resource: ResourceSpec, noise: LocationNoise, physical: bool = False
) -> Circuit:
    """Teleport wire A onto wire C through a Bell pair on B and C.

    For gates the input is undone with the inverse gate so that location-7
    noise lands on the |+> the gate would act on; ``physical=True`` instead
    starts from |+> and runs the gate, which is the circuit as drawn.
    """
    if noise.variant is not variant or resource.variant is not variant:
        raise ValueError("noise, resource and circuit variant disagree")
    known = variant.locations
    for loc in noise.single:
        if loc not in known:
            raise ValueError(f"unknown location {loc!r}")
    steps: list[CircuitStep] = []
    single = noise.single
    if variant is InjectionVariant.GATE:
        U = np.asarray(resource.unitary, dtype=complex)
        if physical:
            steps.append(PrepareState("A", BlochVector(1.0, 0.0, 0.0)))
        else:
            steps.append(PrepareState("A"))
            steps.append(Gate(U.conj().T, ("A",), "resource^-1"))
        if 7 in single:
            steps.append(Channel(7, "A", single[7]))
        steps.append(Gate(U, ("A",), "resource"))
    else:
        steps.append(PrepareState("A", resource.bloch if physical else None))
    for loc in (1, CONTROL_INPUT):
        if loc in single:
            steps.append(Channel(loc, "A", single[loc]))
    steps += [
        PrepareState("B", BlochVector(0.0, 0.0, 1.0)),
        PrepareState("C", BlochVector(0.0, 0.0, 1.0)),
        Gate(HADAMARD, ("B",), "H"),
        Gate(CNOT, ("B", "C"), "CNOT"),
    ]
    if 4 in single:
        steps.append(Channel(4, "B", single[4]))
    steps.append(Gate(CNOT, ("A", "B"), "CNOT"))
    if noise.pair:
        steps.append(PairChannel(("A", "B"), noise.pair))
    if 3 in single:
        steps.append(Channel(3, "A", single[3]))
    if 6 in single:
        steps.append(Channel(6, "B", single[6]))
    steps += [
        MeasureWithCorrection("A", "X", PauliOp.Z, "C"),
        MeasureWithCorrection("B", "Z", PauliOp.X, "C"),
        Discard("A"),
        Discard("B"),
    ]
    return Circuit(tuple(steps), "A", "C")


def run_circuit(circuit: Circuit, input_bloch: Optional[BlochLike] = None) -> MultiQubitState:
    state = MultiQubitState(np.ones((1, 1), dtype=complex), [])
    for step in circuit.steps:
        if isinstance(step, PrepareState):
            b = step.bloch
            if b is None:
                if input_bloch is None:
                    raise ValueError("circuit has an open input wire")
                b = input_bloch
            state.add(step.label, bloch_to_density(b))
        elif isinstance(step, Gate):
            state.apply_kraus([step.unitary], step.wires)
        elif isinstance(step, Channel):
            state.apply_kraus(kraus_operators(step.channel), (step.wire,))
        elif isinstance(step, PairChannel):
            ops = [
                math.sqrt(p) * np.kron(P.matrix, Q.matrix) for (P, Q), p in step.distribution.items() if p > 0
            ]
            state.apply_kraus(ops, step.wires)
        elif isinstance(step, MeasureWithCorrection):
            p0, p1 = _PROJ[step.basis]
            C = step.correction.matrix
            if step.wire == step.target:
                raise ValueError("correction must act on another wire")
            state.apply_kraus([np.kron(p0, np.eye(2)), np.kron(p1, C)], (step.wire, step.target))
        elif isinstance(step, Discard):
            state.discard(step.label)
        else:
            raise TypeError(f"unknown circuit step {step!r}")
    return state


def _output_bloch(state: MultiQubitState, wire: str) -> np.ndarray:
    if state.labels != [wire]:
        raise ValueError(f"expected only the output wire, found {state.labels}")
    rho = state.rho
    if abs(np.trace(rho) - 1.0) > 1e-12:
        raise ValueError(f"composite is not trace preserving: trace {np.trace(rho).real!r}")
    return np.array([np.trace(rho @ P).real for P in PAULI_MATRICES[1:]])


def simulate_channel(circuit: Circuit) -> AffineChannel:
    """Input-to-output affine map by tomography on the mixed state and the +1 Pauli eigenstates."""
    c = _output_bloch(run_circuit(circuit, np.zeros(3)), circuit.output_wire)
    M = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        M[:, i] = _output_bloch(run_circuit(circuit, e), circuit.output_wire) - c
    return AffineChannel(M, c)


def oracle_threshold(
    noise_family: Callable[[float, ResourceSpec], LocationNoise],
    variant: InjectionVariant,
    resource: Union[ResourceSpec, BlochLike],
    s_max: float,
    *,
    xtol: float = XTOL,
    monotone_samples: int = 100,
) -> ThresholdResult:
    """Octahedron-entry strength with every evaluation simulated from scratch.

    ``noise_family(s, resource)`` builds the circuit noise at strength ``s``.
    """
    if not isinstance(resource, ResourceSpec):
        from .noise import resource_for_variant

        resource = resource_for_variant(variant, as_bloch_array(resource))

    def channel_at(s: float) -> AffineChannel:
        return simulate_channel(build_injection_circuit(variant, resource, noise_family(s, resource)))

    return octahedron_threshold(channel_at, resource, s_max, xtol=xtol, monotone_samples=monotone_samples)
