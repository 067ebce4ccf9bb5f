"""Minimal-noise solvers.

``octahedron_threshold`` is the workhorse: for a noise family whose image of
the resource shrinks monotonically with strength, bisect for the strength at
which the image touches the octahedron face. The closed forms below are the
wire-level bounds that need no injection circuit at all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Union

import numpy as np

from .channels import AffineChannel
from .noise import ResourceSpec
from .qubit import BlochLike, as_bloch_array, octahedron_norm

__all__ = [
    "ThresholdResult",
    "NoThresholdError",
    "NonMonotoneError",
    "bisect_sign_change",
    "octahedron_threshold",
    "single_hit_dephasing_bound",
    "two_hit_dephasing_threshold",
    "epg_phase_equation",
    "epg_phase_threshold_general",
    "depolarizing_single_hit_bound",
    "depolarizing_two_hit_threshold",
]

XTOL = 1e-12


class NoThresholdError(ValueError):
    """The image never reaches the octahedron on the searched interval."""


class NonMonotoneError(ValueError):
    """The octahedron norm of the image is not strictly decreasing in strength."""


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a threshold solve.

    ``residual`` is the value of the defining function at ``strength`` (for
    injection thresholds, octahedron norm minus one). ``stabilizer`` flags a
    resource that starts inside the octahedron, where the threshold is zero.
    """

    strength: float
    residual: float
    bracket: float
    stabilizer: bool = False
    iterations: int = 0


def bisect_sign_change(
    f: Callable[[float], float], lo: float, hi: float, xtol: float = XTOL, max_iter: int = 200
) -> tuple[float, float, int]:
    """Bisection on ``[lo, hi]`` where ``f`` changes sign.

    Returns:
        (root, final bracket width, iterations). The root is the midpoint of
        the final bracket, or an exact zero if one is hit.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, 0.0, 0
    if fhi == 0.0:
        return hi, 0.0, 0
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]: f = {flo!r}, {fhi!r}")
    it = 0
    while hi - lo > xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        it += 1
        if fm == 0.0:
            return mid, 0.0, it
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi), hi - lo, it


# strength -> AffineChannel, or anything exposing ``.channel``
MapFamily = Callable[[float], Any]


def _channel_of(m) -> AffineChannel:
    return m if isinstance(m, AffineChannel) else m.channel


def octahedron_threshold(
    map_family: MapFamily,
    resource: Union[ResourceSpec, BlochLike],
    s_max: float,
    *,
    xtol: float = XTOL,
    monotone_samples: int = 100,
) -> ThresholdResult:
    """Smallest strength at which ``map_family(s)`` pushes ``resource`` onto the octahedron.

    ``map_family`` returns an :class:`AffineChannel` or anything with a
    ``.channel`` (such as an effective map).

    Raises:
        NonMonotoneError: if sampling shows the norm is not strictly decreasing.
        NoThresholdError: if the image is still outside at ``s_max``.
    """
    b = resource.bloch.as_array() if isinstance(resource, ResourceSpec) else as_bloch_array(resource)

    def g(s: float) -> float:
        return octahedron_norm(_channel_of(map_family(s))(b)) - 1.0

    g0 = g(0.0)
    if g0 <= 0.0:
        return ThresholdResult(0.0, g0, 0.0, stabilizer=True)
    if monotone_samples > 1:
        grid = np.linspace(0.0, s_max, monotone_samples)
        values = [g(float(s)) for s in grid]
        if any(v1 >= v0 for v0, v1 in zip(values, values[1:])):
            raise NonMonotoneError(f"octahedron norm is not strictly decreasing on [0, {s_max}]")
        g_end = values[-1]
    else:
        g_end = g(s_max)
    if g_end > 0.0:
        raise NoThresholdError(f"image remains outside the octahedron up to strength {s_max}")
    root, width, it = bisect_sign_change(g, 0.0, s_max, xtol)
    return ThresholdResult(root, g(root), width, iterations=it)


def single_hit_dephasing_bound() -> float:
    """Dephasing probability that takes every phase rotation into the Clifford hull."""
    return 0.5 * (1.0 - 1.0 / math.sqrt(2.0))


def two_hit_dephasing_threshold() -> tuple[float, float]:
    """Two-hit dephasing strength ``p`` with ``(1-2p)^2 = 1/sqrt(2)``, and its full-dephasing twin ``2p``."""
    p = 0.5 * (1.0 - math.sqrt(1.0 / math.sqrt(2.0)))
    return p, 2.0 * p


def epg_phase_equation(p: float, rhs: float = 1.0 / math.sqrt(2.0)) -> float:
    """``(1-2p)(1-2t) - rhs`` with the per-wire split ``t = 1 - sqrt(1-p)``."""
    t = 1.0 - math.sqrt(1.0 - p)
    return (1.0 - 2.0 * p) * (1.0 - 2.0 * t) - rhs


def epg_phase_threshold_general(rhs: float = 1.0 / math.sqrt(2.0), xtol: float = XTOL) -> ThresholdResult:
    """EPG bound for phase gates/states when a CNOT may hit two resources at once."""
    f = lambda p: epg_phase_equation(p, rhs)  # noqa: E731
    if f(0.0) <= 0.0:
        return ThresholdResult(0.0, f(0.0), 0.0, stabilizer=True)
    root, width, it = bisect_sign_change(f, 0.0, 0.5, xtol)
    return ThresholdResult(root, f(root), width, iterations=it)


def depolarizing_single_hit_bound() -> float:
    """Depolarizing weight that makes the pi/8 gate a Clifford mixture."""
    return (6.0 - 2.0 * math.sqrt(2.0)) / 7.0


def depolarizing_two_hit_threshold() -> float:
    return 1.0 - math.sqrt(1.0 - depolarizing_single_hit_bound())
