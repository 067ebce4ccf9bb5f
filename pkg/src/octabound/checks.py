"""Self-verification suites shared by the command line and the tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import IDENTITY, AffineChannel, PauliOp, choi_psd_check, conjugate, pauli_channel
from .noise import (
    InjectionVariant,
    LocationNoise,
    ResourceSpec,
    phase_gate_resource,
    phase_state_resource,
    resource_for_variant,
)
from .oracle import build_injection_circuit, simulate_channel
from .scan import Model, NoiseFamily, ScanKind, family
from .shifting import shift_rule
from .solver import NonMonotoneError

__all__ = [
    "CheckResult",
    "shift_identity_checks",
    "random_map_checks",
    "cptp_checks",
    "monotonicity_checks",
    "LEVELS",
    "run_level",
]

RULE_TOL = 1e-12
MAP_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: str
    residual: float
    passed: bool


def _oracle(variant: InjectionVariant, resource: ResourceSpec, noise: LocationNoise) -> AffineChannel:
    return simulate_channel(build_injection_circuit(variant, resource, noise))


def _deterministic(variant: InjectionVariant, loc: int, P: PauliOp) -> LocationNoise:
    if loc == 2:
        return LocationNoise(variant, pair={(P, PauliOp.I): 1.0})
    if loc == 5:
        return LocationNoise(variant, pair={(PauliOp.I, P): 1.0})
    return LocationNoise(variant, {loc: pauli_channel(P)})


def shift_identity_checks() -> list[CheckResult]:
    """A single Pauli at each of locations 2-7 against its image at location 1, both simulated.

    Location 7 sits ahead of a phase gate: Z uses the shift rule, while X and
    Y are compared with the gate-conjugated Pauli at location 1.
    """
    out = []
    b = (0.48, -0.6, 0.64)
    state = resource_for_variant(InjectionVariant.STATE, b)
    gate = phase_gate_resource(0.37)
    for loc in (2, 3, 4, 5, 6, 7):
        for P in (PauliOp.X, PauliOp.Y, PauliOp.Z):
            res = gate if loc == 7 else state
            var = res.variant
            lhs = _oracle(var, res, _deterministic(var, loc, P))
            if loc == 7 and P is not PauliOp.Z:
                image = conjugate(pauli_channel(P), res.rotation)
            else:
                outcome = shift_rule(loc, P, res)
                image = IDENTITY if outcome.absorbed else pauli_channel(outcome.pauli)
            rhs = _oracle(var, res, LocationNoise(var, {1: image}))
            dev = lhs.max_deviation(rhs)
            out.append(CheckResult("shift-rule", f"loc={loc} pauli={P.name}", dev, dev <= RULE_TOL))
    return out


def _random_setting(rng: np.random.Generator) -> tuple[NoiseFamily, float, ResourceSpec]:
    model = Model.KNILL if rng.random() < 0.5 else Model.EPG
    variant = InjectionVariant.STATE if rng.random() < 0.5 else InjectionVariant.GATE
    kind = ScanKind.PHASE if rng.random() < 0.5 else ScanKind.GENERAL
    fam = family(model, variant, kind)
    s = float(rng.uniform(0.0, fam.s_max))
    if kind is ScanKind.PHASE:
        theta = float(rng.uniform(0.0, 2 * math.pi))
        res = phase_gate_resource(theta) if variant is InjectionVariant.GATE else phase_state_resource(theta)
    else:
        v = rng.normal(size=3)
        res = resource_for_variant(variant, v / np.linalg.norm(v))
    return fam, s, res


def random_map_checks(n: int = 20, seed: int = 7) -> list[CheckResult]:
    """Engine effective channel against the simulated circuit for random settings."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        fam, s, res = _random_setting(rng)
        noise = fam.noise(s, res)
        dev = fam.effective(s, res).channel.max_deviation(_oracle(fam.variant, res, noise))
        params = f"model={fam.model.value} variant={fam.variant.value} s={s:.6f} resource={res.label()}"
        out.append(CheckResult("engine-vs-oracle", params, dev, dev <= MAP_TOL))
    return out


def cptp_checks(strengths=(0.0, 0.05, 0.1, 0.2)) -> list[CheckResult]:
    out = []
    for model in Model:
        for variant in InjectionVariant:
            for kind in ScanKind:
                fam = family(model, variant, kind)
                res = phase_gate_resource(math.pi / 4) if variant is InjectionVariant.GATE else phase_state_resource(math.pi / 4)
                if kind is ScanKind.GENERAL:
                    res = resource_for_variant(variant, np.ones(3) / math.sqrt(3))
                for s in strengths:
                    noise = fam.noise(s, res)
                    ok = noise.is_cptp() and choi_psd_check(fam.effective(s, res).channel)
                    params = f"model={model.value} variant={variant.value} kind={kind.value} s={s}"
                    out.append(CheckResult("cptp", params, 0.0 if ok else 1.0, ok))
    return out


def monotonicity_checks() -> list[CheckResult]:
    out = []
    for model in Model:
        for variant in InjectionVariant:
            for kind in ScanKind:
                fam = family(model, variant, kind)
                res = phase_gate_resource(math.pi / 4) if variant is InjectionVariant.GATE else phase_state_resource(math.pi / 4)
                if kind is ScanKind.GENERAL:
                    res = resource_for_variant(variant, np.ones(3) / math.sqrt(3))
                params = f"model={model.value} variant={variant.value} kind={kind.value}"
                try:
                    r = fam.threshold(res)
                    out.append(CheckResult("monotone", params, abs(r.residual), abs(r.residual) <= 1e-10))
                except NonMonotoneError:
                    out.append(CheckResult("monotone", params, math.inf, False))
    return out


LEVELS = {
    "rules": (shift_identity_checks,),
    "maps": (random_map_checks,),
    "cptp": (cptp_checks,),
    "monotone": (monotonicity_checks,),
}
LEVELS["all"] = tuple(f for key in ("rules", "maps", "cptp", "monotone") for f in LEVELS[key])


def run_level(level: str) -> list[CheckResult]:
    try:
        suites = LEVELS[level]
    except KeyError:
        raise ValueError(f"unknown verification level {level!r}; choose from {sorted(LEVELS)}") from None
    return [r for suite in suites for r in suite()]
