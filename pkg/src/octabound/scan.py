"""Search the resource family for the input that survives the most noise.

Every shipped family sends a resource ``b`` to ``diag(f(s)) b`` with per-axis
factors ``f`` that do not depend on the resource (EPG opposite noise is
re-aimed at each candidate, so its contraction is the same for all of them).
The scans therefore fit ``f`` once as a polynomial in the strength, certify
the fit against fresh engine calls, and bisect on the fitted factors for all
grid points at once. The reported optimum is re-solved with the plain engine.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import optimize

from .noise import (
    KNILL_MAX_GAMMA,
    InjectionVariant,
    LocationNoise,
    ResourceSpec,
    epg_location_noise,
    knill_location_noise,
    phase_gate_resource,
    phase_state_resource,
    resource_for_variant,
)
from .qubit import BlochVector
from .shifting import EffectiveMap, effective_map
from .solver import XTOL, NonMonotoneError, ThresholdResult, bisect_sign_change, octahedron_threshold

__all__ = [
    "Model",
    "ScanKind",
    "NoiseFamily",
    "FactorSurrogate",
    "CertificationError",
    "ScanResult",
    "family",
    "fit_factors",
    "scan_phase_resources",
    "scan_general_resources",
    "analytic_diagonal_optimum",
    "analytic_scan_threshold",
    "PHASE_GRID",
    "GENERAL_GRID",
]

PHASE_GRID = 512
GENERAL_GRID = 64
EPG_MAX_STRENGTH = 0.2
SURROGATE_DEGREE = 12
CERTIFY_TOL = 1e-12


class Model(enum.Enum):
    KNILL = "knill"
    EPG = "epg"


class ScanKind(enum.Enum):
    PHASE = "phase"
    GENERAL = "general"


@dataclass(frozen=True)
class NoiseFamily:
    """A noise model on one circuit variant, as a function of strength and resource."""

    model: Model
    variant: InjectionVariant
    general: bool = False

    @property
    def s_max(self) -> float:
        return KNILL_MAX_GAMMA if self.model is Model.KNILL else EPG_MAX_STRENGTH

    def noise(self, s: float, resource: ResourceSpec) -> LocationNoise:
        if self.model is Model.KNILL:
            return knill_location_noise(s, self.variant)
        return epg_location_noise(s, self.variant, resource, general=self.general)

    def effective(self, s: float, resource: ResourceSpec) -> EffectiveMap:
        return effective_map(self.noise(s, resource), self.variant, resource)

    def map_family(self, resource: ResourceSpec) -> Callable[[float], EffectiveMap]:
        return lambda s: self.effective(s, resource)

    def threshold(self, resource: ResourceSpec, **kw) -> ThresholdResult:
        """Engine bisection for one resource."""
        return octahedron_threshold(self.map_family(resource), resource, self.s_max, **kw)


def family(model, variant, kind=ScanKind.PHASE) -> NoiseFamily:
    """Family used by the scans: general-resource scans put Y noise on the Bell half."""
    model, variant, kind = Model(model), InjectionVariant(variant), ScanKind(kind)
    return NoiseFamily(model, variant, general=kind is ScanKind.GENERAL)


def _phase_resource(variant: InjectionVariant, theta: float) -> ResourceSpec:
    if variant is InjectionVariant.GATE:
        return phase_gate_resource(theta)
    return phase_state_resource(theta)


def _angles_to_vector(polar: float, azim: float) -> np.ndarray:
    return np.abs(
        np.array([math.sin(polar) * math.cos(azim), math.sin(polar) * math.sin(azim), math.cos(polar)])
    )


class CertificationError(RuntimeError):
    """The fitted factors disagree with the engine."""


@dataclass(frozen=True)
class FactorSurrogate:
    """Per-axis contraction factors fitted in the strength.

    ``polys[2]`` is absent for phase scans, whose resources have no z part.
    """

    fam: NoiseFamily
    polys: tuple[Chebyshev, ...]
    certified_error: float

    def factors(self, s) -> np.ndarray:
        """Array of shape ``(len(polys),) + shape(s)``."""
        return np.array([P(s) for P in self.polys])

    def thresholds(self, vectors: np.ndarray, xtol: float = XTOL) -> np.ndarray:
        """Vectorised bisection of ``sum_i f_i(s) |b_i| = 1`` for each row of ``vectors``."""
        B = np.abs(np.asarray(vectors, dtype=float))[:, : len(self.polys)]

        def g(s: np.ndarray) -> np.ndarray:
            return np.einsum("in,ni->n", self.factors(s), B) - 1.0

        n = len(B)
        lo = np.zeros(n)
        hi = np.full(n, self.fam.s_max)
        inside = g(lo) <= 0.0
        if np.any(g(hi)[~inside] > 0.0):
            raise NonMonotoneError("some candidate never reaches the octahedron")
        while np.max(hi - lo) > xtol:
            mid = 0.5 * (lo + hi)
            if np.all((mid <= lo) | (mid >= hi)):
                break
            above = g(mid) > 0.0
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = 0.5 * (lo + hi)
        out[inside] = 0.0
        return out

    def threshold(self, vector: np.ndarray) -> float:
        b = np.abs(np.asarray(vector, dtype=float))[: len(self.polys)]

        def g(s: float) -> float:
            return float(self.factors(s) @ b) - 1.0

        if g(0.0) <= 0.0:
            return 0.0
        return optimize.brentq(g, 0.0, self.fam.s_max, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _reference_resource(fam: NoiseFamily, kind: ScanKind) -> ResourceSpec:
    if kind is ScanKind.PHASE:
        return _phase_resource(fam.variant, 0.3)
    return resource_for_variant(fam.variant, np.array([1.0, 2.0, 3.0]) / math.sqrt(14.0))


def _random_resource(fam: NoiseFamily, kind: ScanKind, rng: np.random.Generator) -> ResourceSpec:
    if kind is ScanKind.PHASE:
        return _phase_resource(fam.variant, rng.uniform(0.05, math.pi / 2 - 0.05))
    v = np.abs(rng.normal(size=3)) + 0.05
    return resource_for_variant(fam.variant, v / np.linalg.norm(v))


def fit_factors(fam: NoiseFamily, kind, degree: int = SURROGATE_DEGREE, checks: int = 24) -> FactorSurrogate:
    """Fit and certify the per-axis factors of ``fam``.

    Raises:
        CertificationError: if any random (strength, resource) check misses
            the engine image by more than 1e-12, or the factors are not
            positive and decreasing on the strength range.
    """
    kind = ScanKind(kind)
    axes = 2 if kind is ScanKind.PHASE else 3
    ref = _reference_resource(fam, kind)
    b_ref = ref.bloch.as_array()[:axes]
    domain = [0.0, fam.s_max]
    nodes = Chebyshev.basis(degree + 1, domain).roots().real
    samples = np.array([fam.effective(float(s), ref).image(ref)[:axes] / b_ref for s in nodes])
    polys = tuple(Chebyshev.fit(nodes, samples[:, i], degree, domain) for i in range(axes))

    rng = np.random.default_rng(20240917)
    worst = 0.0
    for _ in range(checks):
        s = float(rng.uniform(0.0, fam.s_max))
        res = _random_resource(fam, kind, rng)
        b = res.bloch.as_array()
        exact = fam.effective(s, res).image(res)
        approx = np.array([P(s) for P in polys]) * b[:axes]
        err = max(float(np.max(np.abs(exact[:axes] - approx))), float(np.max(np.abs(exact[axes:]))) if axes < 3 else 0.0)
        worst = max(worst, err)
    if worst > CERTIFY_TOL:
        raise CertificationError(f"factor fit misses the engine by {worst:.3g}")

    dense = np.linspace(0.0, fam.s_max, 2001)
    F = np.array([P(dense) for P in polys])
    if np.any(F <= 0.0) or np.any(np.diff(F, axis=1) >= 0.0):
        raise CertificationError("factors are not positive and strictly decreasing")
    return FactorSurrogate(fam, polys, worst)


@dataclass(frozen=True)
class ScanResult:
    """Most robust resource found and the sampled threshold profile.

    ``profile`` rows are ``(theta, threshold)`` for phase scans and
    ``(polar, azimuth, threshold)`` for general scans.
    """

    fam: NoiseFamily
    kind: ScanKind
    best_resource: ResourceSpec
    best_threshold: float
    best_parameter: tuple[float, ...]
    profile: tuple[tuple[float, ...], ...]
    engine_check: ThresholdResult

    @property
    def profile_thresholds(self) -> np.ndarray:
        return np.array([row[-1] for row in self.profile])


def _engine_confirm(fam: NoiseFamily, resource: ResourceSpec, fitted: float) -> ThresholdResult:
    exact = fam.threshold(resource)
    if abs(exact.strength - fitted) > 1e-9:
        raise CertificationError(
            f"engine threshold {exact.strength!r} disagrees with fitted {fitted!r} at {resource.label()}"
        )
    return exact


@functools.lru_cache(maxsize=None)
def scan_phase_resources(model, variant, grid: int = PHASE_GRID) -> ScanResult:
    """Grid over theta in [0, pi/2], then golden-section search around the best sample."""
    fam = family(model, variant, ScanKind.PHASE)
    sur = fit_factors(fam, ScanKind.PHASE)
    thetas = np.linspace(0.0, math.pi / 2, grid)
    vecs = np.column_stack([np.cos(thetas), np.sin(thetas), np.zeros(grid)])
    values = sur.thresholds(vecs)
    k = int(np.argmax(values))
    a, c = thetas[max(k - 1, 0)], thetas[min(k + 1, grid - 1)]

    def neg(theta: float) -> float:
        return -sur.threshold(np.array([math.cos(theta), math.sin(theta), 0.0]))

    theta = optimize.minimize_scalar(neg, bracket=(a, thetas[k], c), method="golden", tol=1e-10).x
    best = -neg(theta)
    if best < values[k]:
        theta, best = float(thetas[k]), float(values[k])
    resource = _phase_resource(fam.variant, theta)
    check = _engine_confirm(fam, resource, best)
    profile = tuple((float(t), float(v)) for t, v in zip(thetas, values))
    return ScanResult(fam, ScanKind.PHASE, resource, best, (float(theta),), profile, check)


@functools.lru_cache(maxsize=None)
def scan_general_resources(model, variant, grid: int = GENERAL_GRID) -> ScanResult:
    """Grid over the positive octant in (polar, azimuth), then Nelder-Mead from the best cell."""
    fam = family(model, variant, ScanKind.GENERAL)
    sur = fit_factors(fam, ScanKind.GENERAL)
    ang = np.linspace(0.0, math.pi / 2, grid)
    P, A = np.meshgrid(ang, ang, indexing="ij")
    P, A = P.ravel(), A.ravel()
    vecs = np.column_stack([np.sin(P) * np.cos(A), np.sin(P) * np.sin(A), np.cos(P)])
    values = sur.thresholds(vecs)
    k = int(np.argmax(values))

    def neg(x: np.ndarray) -> float:
        return -sur.threshold(_angles_to_vector(x[0], x[1]))

    opt = optimize.minimize(
        neg, np.array([P[k], A[k]]), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14}
    )
    params, best = (float(opt.x[0]), float(opt.x[1])), -float(opt.fun)
    if best < values[k]:
        params, best = (float(P[k]), float(A[k])), float(values[k])
    resource = resource_for_variant(fam.variant, _angles_to_vector(*params))
    check = _engine_confirm(fam, resource, best)
    profile = tuple((float(p), float(a), float(v)) for p, a, v in zip(P, A, values))
    return ScanResult(fam, ScanKind.GENERAL, resource, best, params, profile, check)


def analytic_diagonal_optimum(fx: float, fy: float, fz: float) -> BlochVector:
    """Unit vector maximising ``fx|x| + fy|y| + fz|z|``: the factors themselves, normalised."""
    f = np.array([fx, fy, fz], dtype=float)
    if np.any(f <= 0.0):
        raise ValueError("factors must be positive")
    return BlochVector.from_array(f / np.linalg.norm(f))


def analytic_scan_threshold(model, variant, kind) -> tuple[float, Optional[BlochVector]]:
    """Scan maximum without a scan: the strength where the factor vector has unit length.

    Uses engine factors at a reference resource. For phase scans only the x
    and y factors count and the returned direction is ``None``.
    """
    kind = ScanKind(kind)
    fam = family(model, variant, kind)
    axes = 2 if kind is ScanKind.PHASE else 3
    ref = _reference_resource(fam, kind)
    b = ref.bloch.as_array()[:axes]

    def factors(s: float) -> np.ndarray:
        return fam.effective(s, ref).image(ref)[:axes] / b

    root, _, _ = bisect_sign_change(lambda s: float(np.linalg.norm(factors(s))) - 1.0, 0.0, fam.s_max)
    if axes == 2:
        return root, None
    return root, analytic_diagonal_optimum(*factors(root))
