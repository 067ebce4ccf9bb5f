"""The eleven headline upper bounds, recomputed and set against reference values."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .scan import scan_general_resources, scan_phase_resources
from .solver import depolarizing_two_hit_threshold, epg_phase_threshold_general, two_hit_dephasing_threshold

__all__ = ["SummaryRow", "SummaryEntry", "ROWS", "summary_rows"]


@dataclass(frozen=True)
class SummaryEntry:
    resources: str
    method: str
    model: str
    reference_value: float
    tolerance: float
    solve: Callable[[], tuple[float, str]]

    @property
    def label(self) -> str:
        return f"{self.resources} | {self.method} | {self.model}"


@dataclass(frozen=True)
class SummaryRow:
    entry: SummaryEntry
    strength: float
    resource: str

    @property
    def abs_diff(self) -> float:
        return abs(self.strength - self.entry.reference_value)

    @property
    def ok(self) -> bool:
        return self.abs_diff <= self.entry.tolerance


def _scan(model: str, variant: str, general: bool) -> Callable[[], tuple[float, str]]:
    def run() -> tuple[float, str]:
        r = scan_general_resources(model, variant) if general else scan_phase_resources(model, variant)
        return r.best_threshold, r.best_resource.label()

    return run


ROWS: tuple[SummaryEntry, ...] = (
    SummaryEntry("phase gates/states", "any", "independent dephasing", 0.0796, 1e-4,
                 lambda: (two_hit_dephasing_threshold()[0], "-")),
    SummaryEntry("phase gates/states", "any", "EPG", 0.1041, 2e-4,
                 lambda: (epg_phase_threshold_general().strength, "-")),
    SummaryEntry("all gates", "any", "indep. depolarizing", 0.2605, 2e-4,
                 lambda: (depolarizing_two_hit_threshold(), "-")),
    SummaryEntry("phase gates", "injection", "Knill", 0.0959, 2e-4, _scan("knill", "gate", False)),
    SummaryEntry("phase states", "injection", "Knill", 0.1371, 2e-4, _scan("knill", "state", False)),
    SummaryEntry("phase gates", "injection", "EPG", 0.0301, 2e-4, _scan("epg", "gate", False)),
    SummaryEntry("phase states", "injection", "EPG", 0.0369, 2e-4, _scan("epg", "state", False)),
    SummaryEntry("all gates", "injection", "Knill", 0.1519, 2e-4, _scan("knill", "gate", True)),
    SummaryEntry("all states", "injection", "Knill", 0.2178, 2e-4, _scan("knill", "state", True)),
    SummaryEntry("all gates", "injection", "EPG", 0.0503, 2e-4, _scan("epg", "gate", True)),
    SummaryEntry("all states", "injection", "EPG", 0.0631, 2e-4, _scan("epg", "state", True)),
)


def summary_rows() -> list[SummaryRow]:
    out = []
    for entry in ROWS:
        strength, resource = entry.solve()
        out.append(SummaryRow(entry, strength, resource))
    return out
