"""Commute circuit noise onto the resource at location 1.

The CNOT plus X/Z measurements form a Bell measurement, which is what makes
the teleportation block easy: every Pauli after location 1 is either eaten
by a measurement or reappears as a single Pauli on the resource. The
results are collected into one affine map, the effective channel that the
ideal teleportation then carries to the output wire.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional

import numpy as np

from .channels import (
    IDENTITY,
    AffineChannel,
    PauliOp,
    compose,
    conjugate,
    pauli_mixture,
    pauli_probabilities,
)
from .noise import (
    CONTROL_INPUT,
    InjectionVariant,
    LocationNoise,
    PairDistribution,
    ResourceKind,
    ResourceSpec,
)

__all__ = [
    "ShiftOutcome",
    "EffectiveMap",
    "shift_rule",
    "shift_distribution",
    "reduce_pair_noise",
    "effective_map",
    "knill_effective_formula",
]

PauliDistribution = Mapping[PauliOp, float]


class ShiftOutcome(NamedTuple):
    """Where a Pauli fault ends up: absorbed by a measurement, or as ``pauli`` at location 1."""

    pauli: PauliOp
    absorbed: bool

    @classmethod
    def absorbed_fault(cls) -> "ShiftOutcome":
        return cls(PauliOp.I, True)

    @classmethod
    def at_resource(cls, P: PauliOp) -> "ShiftOutcome":
        return cls(P, False)


_X, _Y, _Z = PauliOp.X, PauliOp.Y, PauliOp.Z

# Target wire feeds the Z measurement: Z dies there, X walks back through the
# CNOT to location 4 and across the Bell projector to location 1.
_TARGET_SIDE = {_Z: ShiftOutcome.absorbed_fault(), _X: ShiftOutcome.at_resource(_X), _Y: ShiftOutcome.at_resource(_X)}
# Control wire feeds the X measurement: X dies there, Z walks back through the CNOT.
_CONTROL_SIDE = {_X: ShiftOutcome.absorbed_fault(), _Z: ShiftOutcome.at_resource(_Z), _Y: ShiftOutcome.at_resource(_Z)}
_BELL_INPUT = {P: ShiftOutcome.at_resource(P) for P in (_X, _Y, _Z)}

_RULES = {2: _CONTROL_SIDE, 3: _CONTROL_SIDE, 4: _BELL_INPUT, 5: _TARGET_SIDE, 6: _TARGET_SIDE}


def shift_rule(location: int, P: PauliOp, resource: Optional[ResourceSpec] = None) -> ShiftOutcome:
    """Image at location 1 of a single Pauli fault at ``location``.

    Location 7 only has a rule for Z ahead of a phase gate, which commutes
    with the gate.

    Raises:
        ValueError: for the identity, an unknown location, or a location-7
            fault that does not commute through the resource gate.
    """
    if P is PauliOp.I:
        raise ValueError("shift rules are defined for non-identity Paulis")
    if location == 7:
        if resource is None or resource.kind is not ResourceKind.PHASE_GATE:
            raise ValueError("location 7 shifts only through a phase-gate resource")
        if P is not PauliOp.Z:
            raise ValueError(f"{P.name} at location 7 does not commute with a phase gate")
        return ShiftOutcome.at_resource(PauliOp.Z)
    try:
        return _RULES[location][P]
    except KeyError:
        raise ValueError(f"no shift rule for location {location!r}") from None


def _convolve(a: PauliDistribution, b: PauliDistribution) -> dict[PauliOp, float]:
    out = {P: 0.0 for P in PauliOp}
    for P, p in a.items():
        for Q, q in b.items():
            out[P.then(Q)] += p * q
    return out


def shift_distribution(location: int, dist: PauliDistribution) -> dict[PauliOp, float]:
    """Push a single-location Pauli distribution onto location 1."""
    out = {P: 0.0 for P in PauliOp}
    for P, p in dist.items():
        out[P if P is PauliOp.I else shift_rule(location, P).pauli] += p
    return out


def reduce_pair_noise(dist: PairDistribution) -> dict[PauliOp, float]:
    """Collapse joint (location 2, location 5) Pauli noise to a distribution at location 1."""
    out = {P: 0.0 for P in PauliOp}
    for (top, bottom), p in dist.items():
        a = PauliOp.I if top is PauliOp.I else shift_rule(2, top).pauli
        b = PauliOp.I if bottom is PauliOp.I else shift_rule(5, bottom).pauli
        out[a.then(b)] += p
    return out


@dataclass(frozen=True, eq=False)
class EffectiveMap:
    """All injection-circuit noise expressed as one channel on the resource.

    Attributes:
        channel: affine map applied after the ideal resource and before an
            ideal teleportation.
        diagonal_factors: per-axis contraction, present only when the map is
            Pauli-diagonal.
        scalar_prefactor: contraction of the resource vector by the
            non-Pauli prefix (preparation and faulty-CNOT noise) when that
            prefix maps the resource onto a multiple of itself.
        pauli_distribution: the shifted Pauli faults at location 1.
    """

    channel: AffineChannel
    diagonal_factors: Optional[tuple[float, float, float]]
    scalar_prefactor: Optional[float]
    pauli_distribution: dict[PauliOp, float]

    def image(self, resource: ResourceSpec) -> np.ndarray:
        return self.channel(resource.bloch)


def effective_map(
    noise: LocationNoise, variant: InjectionVariant, resource: ResourceSpec
) -> EffectiveMap:
    """Shift every fault of ``noise`` onto location 1 and compose the result.

    Circuit order on the resource wire is kept: noise at 7 (carried through
    the gate), then 1, then the faulty-CNOT slot, then the shifted Paulis,
    which all land immediately before the Bell measurement.

    Raises:
        ValueError: if the variant, noise and resource disagree, or if a
            location from 2 to 6 carries a channel that is not a Pauli mixture.
    """
    if noise.variant is not variant or resource.variant is not variant:
        raise ValueError(
            f"inconsistent inputs: noise for {noise.variant.value}, resource for "
            f"{resource.variant.value}, circuit {variant.value}"
        )
    prefix = IDENTITY
    if variant is InjectionVariant.GATE and 7 in noise.single:
        prefix = conjugate(noise.single[7], resource.rotation)
    for loc in (1, CONTROL_INPUT):
        ch = noise.single.get(loc)
        if ch is not None:
            prefix = compose(ch, prefix)

    dist: dict[PauliOp, float] = {PauliOp.I: 1.0}
    for loc in (3, 4, 6):
        ch = noise.single.get(loc)
        if ch is None:
            continue
        try:
            local = pauli_probabilities(ch)
        except ValueError as exc:
            raise ValueError(f"location {loc} carries a non-Pauli channel") from exc
        dist = _convolve(dist, shift_distribution(loc, local))
    if noise.pair:
        dist = _convolve(dist, reduce_pair_noise(noise.pair))

    channel = compose(pauli_mixture(dist), prefix)
    factors = None
    if channel.is_diagonal(1e-13):
        factors = tuple(float(v) for v in np.diag(channel.M))

    b = resource.bloch.as_array()
    moved = prefix(b)
    scalar = None
    if np.linalg.norm(np.cross(moved, b)) <= 1e-12:
        scalar = float(moved @ b)
    return EffectiveMap(channel, factors, scalar, dist)


def knill_effective_formula(gamma: float, n: int) -> tuple[float, float, float]:
    """Closed-form Knill contraction factors ``(A^n B^2, A^n B^3, A^n B^2)``.

    ``A = 1 - 16 gamma/15`` comes from the two-qubit CNOT faults (and, for
    gates, the gate fault), ``B = 1 - 8 gamma/15`` from each single-qubit fault.
    """
    if n not in (1, 2):
        raise ValueError("n must be 1 (state resource) or 2 (gate resource)")
    A = 1.0 - 16.0 * gamma / 15.0
    B = 1.0 - 8.0 * gamma / 15.0
    return (A**n * B**2, A**n * B**3, A**n * B**2)
