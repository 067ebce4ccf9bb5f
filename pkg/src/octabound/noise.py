"""Noise models placed on the numbered locations of the two injection circuits.

Wire A carries the non-Clifford resource into the CNOT control; wire B is
the decoded Bell-pair half on the CNOT target. Location labels:

====== ============================================================
1      wire A, right after the resource is ready
ctrl   wire A, immediately before the CNOT (EPG "faulty CNOT" slot)
2      wire A, right after the CNOT
3      wire A, before the X measurement
4      wire B, before the CNOT
5      wire B, right after the CNOT
6      wire B, before the Z measurement
7      |+> preparation ahead of the resource gate (gate variant only)
====== ============================================================

Locations 2 and 5 are the two CNOT outputs and carry a joint two-qubit Pauli
distribution; every other location carries a single-qubit channel.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
from numpy.typing import ArrayLike

from .channels import (
    AffineChannel,
    PauliOp,
    choi_psd_check,
    compose,
    depolarizing,
    mix_with,
    opposite_noise,
    orthogonal_flip,
    pauli_channel,
    pauli_mixture,
    unitary_rotation,
)
from .qubit import BlochLike, BlochVector, as_bloch_array, phase_angle, phase_state

__all__ = [
    "CONTROL_INPUT",
    "InjectionVariant",
    "ResourceKind",
    "ResourceSpec",
    "LocationNoise",
    "PairDistribution",
    "phase_state_resource",
    "phase_gate_resource",
    "general_state_resource",
    "general_gate_resource",
    "resource_for_variant",
    "knill_location_noise",
    "epg_location_noise",
    "dephasing_two_hit_model",
    "independent_depolarizing",
    "simultaneous_depolarizing",
    "totally_dephasing",
    "epg_split",
    "KNILL_MAX_GAMMA",
]

CONTROL_INPUT = "ctrl"
Location = Union[int, str]
PairDistribution = Mapping[tuple[PauliOp, PauliOp], float]

# A = 1 - 16 gamma / 15 stays non-negative up to here
KNILL_MAX_GAMMA = 15.0 / 16.0


class InjectionVariant(enum.Enum):
    STATE = "state"
    GATE = "gate"

    @property
    def locations(self) -> frozenset:
        base = {1, 2, 3, 4, 5, 6, CONTROL_INPUT}
        return frozenset(base | {7} if self is InjectionVariant.GATE else base)

    @property
    def exponent(self) -> int:
        """Power of the two-qubit-fault factor in the Knill effective map."""
        return 1 if self is InjectionVariant.STATE else 2

    @classmethod
    def parse(cls, label: str) -> "InjectionVariant":
        try:
            return cls(label.strip().lower())
        except ValueError:
            raise ValueError(f"unknown injection variant {label!r} (use 'state' or 'gate')") from None


class ResourceKind(enum.Enum):
    PHASE_STATE = "phase-state"
    PHASE_GATE = "phase-gate"
    GENERAL_STATE = "state"
    GENERAL_GATE = "gate"


_PLUS = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True, eq=False)
class ResourceSpec:
    """The ideal non-Clifford input at location 1.

    For gate resources ``bloch`` is the gate's image of |+>, and ``unitary``
    is kept so that noise ahead of the gate can be carried through it.
    """

    kind: ResourceKind
    bloch: BlochVector
    theta: Optional[float] = None
    unitary: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not self.bloch.is_pure():
            raise ValueError("resource states must be pure")
        R = np.eye(3)
        if self.is_gate:
            if self.unitary is None:
                raise ValueError("gate resources need their unitary")
            R = unitary_rotation(self.unitary)
            if not np.allclose(R @ _PLUS, self.bloch.as_array(), atol=1e-9):
                raise ValueError("gate does not map |+> to the stated resource vector")
        R.setflags(write=False)
        object.__setattr__(self, "_rotation", R)

    @property
    def is_gate(self) -> bool:
        return self.kind in (ResourceKind.PHASE_GATE, ResourceKind.GENERAL_GATE)

    @property
    def variant(self) -> InjectionVariant:
        return InjectionVariant.GATE if self.is_gate else InjectionVariant.STATE

    @property
    def rotation(self) -> np.ndarray:
        """Bloch rotation of the resource gate (identity for state resources)."""
        return self._rotation

    def label(self) -> str:
        if self.theta is not None:
            return f"{self.kind.value}:{self.theta:.10g}"
        return f"{self.kind.value}:" + ",".join(f"{v:.10g}" for v in self.bloch)


def phase_gate_unitary(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * theta)]).astype(complex)


def phase_state_resource(theta: float) -> ResourceSpec:
    theta = phase_angle(theta)
    return ResourceSpec(ResourceKind.PHASE_STATE, phase_state(theta), theta=theta)


def phase_gate_resource(theta: float) -> ResourceSpec:
    theta = phase_angle(theta)
    return ResourceSpec(
        ResourceKind.PHASE_GATE, phase_state(theta), theta=theta, unitary=phase_gate_unitary(theta)
    )


def _normalized(b: BlochLike) -> BlochVector:
    v = as_bloch_array(b)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("resource direction must be non-zero")
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"resource vector must be pure, got norm {n:.12g}")
    return BlochVector.from_array(v / n)


def general_state_resource(b: BlochLike) -> ResourceSpec:
    return ResourceSpec(ResourceKind.GENERAL_STATE, _normalized(b))


def _unitary_plus_to(b: BlochVector) -> np.ndarray:
    # U = |b><+| + |b_perp><-|
    polar = math.acos(max(-1.0, min(1.0, b.z)))
    azim = math.atan2(b.y, b.x)
    ket_b = np.array([math.cos(polar / 2), np.exp(1j * azim) * math.sin(polar / 2)])
    ket_perp = np.array([math.sin(polar / 2), -np.exp(1j * azim) * math.cos(polar / 2)])
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    minus = np.array([1.0, -1.0]) / math.sqrt(2)
    return np.outer(ket_b, plus) + np.outer(ket_perp, minus)


def general_gate_resource(
    b_out: Optional[BlochLike] = None, unitary: Optional[ArrayLike] = None
) -> ResourceSpec:
    """A single-qubit gate resource, given by its unitary or by its image of |+>."""
    if unitary is not None:
        U = np.asarray(unitary, dtype=complex)
        b = BlochVector.from_array(unitary_rotation(U) @ _PLUS)
        return ResourceSpec(ResourceKind.GENERAL_GATE, b, unitary=U)
    if b_out is None:
        raise ValueError("give either b_out or unitary")
    b = _normalized(b_out)
    return ResourceSpec(ResourceKind.GENERAL_GATE, b, unitary=_unitary_plus_to(b))


def resource_for_variant(variant: InjectionVariant, b: BlochLike) -> ResourceSpec:
    if variant is InjectionVariant.GATE:
        return general_gate_resource(b)
    return general_state_resource(b)


@dataclass(frozen=True, eq=False)
class LocationNoise:
    """Noise on one injection circuit: single-qubit channels plus (2, 5) pair noise.

    Missing single-qubit locations are noiseless; an empty ``pair`` means no
    fault after the CNOT.
    """

    variant: InjectionVariant
    single: Mapping[Location, AffineChannel] = field(default_factory=dict)
    pair: PairDistribution = field(default_factory=dict)

    def __post_init__(self) -> None:
        allowed = self.variant.locations - {2, 5}
        for loc in self.single:
            if loc not in allowed:
                raise ValueError(f"location {loc!r} is not a single-qubit location of the {self.variant.value} circuit")
        if self.pair:
            total = math.fsum(self.pair.values())
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"pair distribution sums to {total!r}")
            if min(self.pair.values()) < 0:
                raise ValueError("pair distribution has a negative probability")

    def channel(self, loc: Location) -> Optional[AffineChannel]:
        return self.single.get(loc)

    def is_cptp(self) -> bool:
        return all(choi_psd_check(ch) for ch in self.single.values())


def _knill_pair(gamma: float) -> dict[tuple[PauliOp, PauliOp], float]:
    pair = {}
    for P, Q in itertools.product(PauliOp, repeat=2):
        pair[(P, Q)] = 1.0 - gamma if (P is PauliOp.I and Q is PauliOp.I) else gamma / 15.0
    return pair


def knill_location_noise(gamma: float, variant: InjectionVariant) -> LocationNoise:
    """Knill's gamma model on the injection circuit, with location 4 kept clean.

    Single-qubit faults occur with probability ``4 gamma / 15``; the CNOT is
    followed by each of the 15 non-identity Pauli pairs with ``gamma / 15``.
    Faulty preparations (location 1 for states, 7 for gates) produce the
    orthogonal state.
    """
    gamma = float(gamma)
    if not 0.0 <= gamma <= KNILL_MAX_GAMMA:
        raise ValueError(f"Knill gamma must lie in [0, 15/16], got {gamma!r}")
    t = 4.0 * gamma / 15.0
    single: dict[Location, AffineChannel] = {
        3: mix_with(pauli_channel(PauliOp.Z), t),
        6: mix_with(pauli_channel(PauliOp.X), t),
    }
    if variant is InjectionVariant.STATE:
        single[1] = orthogonal_flip(t)
    else:
        single[7] = orthogonal_flip(t)
        single[1] = pauli_mixture({PauliOp.I: 1.0 - 3.0 * t, PauliOp.X: t, PauliOp.Y: t, PauliOp.Z: t})
    return LocationNoise(variant, single, _knill_pair(gamma))


def epg_location_noise(
    p: float, variant: InjectionVariant, resource: ResourceSpec, general: bool = False
) -> LocationNoise:
    """Adversarial error-per-gate choice aligned against ``resource``.

    Opposite noise at location 1 and in the faulty-CNOT slot replaces the
    resource by its antipode; the gate variant adds opposite noise on the |+>
    preparation at 7. Location 4 gets dephasing, or Y noise when ``general``.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"EPG strength must lie in [0, 1], got {p!r}")
    if resource.variant is not variant:
        raise ValueError(f"{resource.kind.value} resource does not fit the {variant.value} circuit")
    b = resource.bloch
    loc4 = PauliOp.Y if general else PauliOp.Z
    single: dict[Location, AffineChannel] = {
        1: opposite_noise(b, p),
        CONTROL_INPUT: opposite_noise(b, p),
        3: mix_with(pauli_channel(PauliOp.Z), p),
        4: mix_with(pauli_channel(loc4), p),
        6: mix_with(pauli_channel(PauliOp.X), p),
    }
    if variant is InjectionVariant.GATE:
        single[7] = opposite_noise(_PLUS, p)
    return LocationNoise(variant, single)


def dephasing_two_hit_model(p: float) -> AffineChannel:
    """Two independent dephasing hits on one phase resource."""
    nz = mix_with(pauli_channel(PauliOp.Z), p)
    return compose(nz, nz)


def independent_depolarizing(t: float) -> AffineChannel:
    return mix_with(depolarizing(), t)


def totally_dephasing(strength: float) -> AffineChannel:
    """Full dephasing ``rho -> (rho + Z rho Z)/2`` applied with probability ``strength``."""
    full = mix_with(pauli_channel(PauliOp.Z), 0.5)
    return mix_with(full, strength)


def simultaneous_depolarizing(t: float, k: int) -> dict[tuple[PauliOp, ...], float]:
    """Joint depolarizing after a k-qubit gate: each non-identity Pauli string gets t/(4^k - 1)."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    if k < 1:
        raise ValueError("k must be at least 1")
    share = t / (4**k - 1)
    dist = {}
    for ops in itertools.product(PauliOp, repeat=k):
        dist[ops] = 1.0 - t if all(P is PauliOp.I for P in ops) else share
    return dist


def epg_split(p: float) -> float:
    """Per-wire probability t with ``t^2 + 2t(1-t) = p`` for two independent hits."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return 1.0 - math.sqrt(1.0 - p)
