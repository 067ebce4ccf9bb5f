"""Threshold polynomial for injection with one level of Knill-noisy decoding.

The threshold is the root of ``-1/2 - num(e) / den(e)`` on (0, 1/2), where
``e`` is the error rate of the decoding circuitry. The numerator is kept both
as a product of three integer factors and expanded with exact integer
arithmetic; the denominator exists only in expanded form, with coefficients
up to ~3e13 and alternating signs. Expanded forms are evaluated
by compensated Horner so that cancellation between terms does not eat the
answer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .solver import XTOL, bisect_sign_change

__all__ = [
    "NUM_FACTORS",
    "NUM_COEFFS",
    "DEN_COEFFS",
    "DEN_SCALE",
    "comp_horner",
    "num_factored",
    "num_expanded",
    "denominator",
    "decoding_curve",
    "DecodingRoot",
    "TranscriptionError",
    "decoding_polynomial_root",
]

# Ascending-power integer coefficients of each numerator factor, with multiplicity.
NUM_FACTORS: tuple[tuple[tuple[int, ...], int], ...] = (
    ((-15, 16), 5),
    ((225, -180, 32), 2),
    ((16875, -40500, 46800, -23040, 4096), 1),
)

DEN_COEFFS: tuple[int, ...] = (
    576650390625,
    -3536789062500,
    11768793750000,
    -24002325000000,
    32367600000000,
    -29499033600000,
    18141511680000,
    -7375159296000,
    1887436800000,
    -273804165120,
    17179869184,
)
DEN_SCALE = 1125.0 * math.sqrt(2.0)


def _int_polymul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _expand(factors) -> tuple[int, ...]:
    poly = [1]
    for coeffs, mult in factors:
        for _ in range(mult):
            poly = _int_polymul(poly, coeffs)
    return tuple(poly)


NUM_COEFFS: tuple[int, ...] = _expand(NUM_FACTORS)

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _dd(c: int) -> tuple[float, float]:
    hi = float(c)
    return hi, float(c - int(hi))


def comp_horner(coeffs: Sequence[int], x: float) -> float:
    """Compensated Horner evaluation of an ascending-power integer polynomial.

    Integer coefficients beyond 2**53 are carried as a double-double
    (high + low) pair, and the low parts enter the running error term.
    """
    parts = [_dd(c) for c in coeffs]
    s, err = parts[-1]
    for hi, lo in reversed(parts[:-1]):
        p, pe = _two_prod(s, x)
        s, se = _two_sum(p, hi)
        err = err * x + (pe + se + lo)
    return s + err


def num_factored(e: float) -> float:
    out = 1.0
    for coeffs, mult in NUM_FACTORS:
        val = 0.0
        for c in reversed(coeffs):
            val = val * e + c
        out *= val**mult
    return out


def num_expanded(e: float) -> float:
    return comp_horner(NUM_COEFFS, e)


def denominator(e: float) -> float:
    return DEN_SCALE * comp_horner(DEN_COEFFS, e)


def decoding_curve(e: float) -> float:
    return -0.5 - num_expanded(e) / denominator(e)


class TranscriptionError(ValueError):
    """The polynomial does not have exactly one sign change on the search interval."""


@dataclass(frozen=True)
class DecodingRoot:
    root: float
    residual: float
    bracket: float
    other_real_roots: tuple[float, ...] = field(default_factory=tuple)


def _numerator_real_roots() -> np.ndarray:
    # curve = -(den + 2 num) / (2 den), so its roots are those of den + 2 num
    n = len(NUM_COEFFS)
    num = np.zeros(n)
    num += 2.0 * np.array(NUM_COEFFS, dtype=float)
    num[: len(DEN_COEFFS)] += DEN_SCALE * np.array(DEN_COEFFS, dtype=float)
    roots = np.polynomial.polynomial.polyroots(num)
    return np.sort(roots[np.abs(roots.imag) < 1e-9].real)


def decoding_polynomial_root(
    lo: float = 0.0, hi: float = 0.5, samples: int = 2001, xtol: float = XTOL
) -> DecodingRoot:
    """Sole root of ``decoding_curve`` on ``(lo, hi)``.

    Raises:
        TranscriptionError: if the denominator vanishes on the interval or
            the curve does not change sign exactly once there.
    """
    grid = np.linspace(lo, hi, samples)[1:-1]
    den = np.array([denominator(float(e)) for e in grid])
    if np.any(den <= 0.0):
        raise TranscriptionError("denominator changes sign on the search interval")
    vals = np.array([decoding_curve(float(e)) for e in grid])
    flips = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
    if len(flips) != 1:
        raise TranscriptionError(f"expected one sign change on ({lo}, {hi}), found {len(flips)}")
    i = int(flips[0])
    root, width, _ = bisect_sign_change(decoding_curve, float(grid[i]), float(grid[i + 1]), xtol)
    others = tuple(float(r) for r in _numerator_real_roots() if not lo < r < hi)
    return DecodingRoot(root, decoding_curve(root), width, others)
