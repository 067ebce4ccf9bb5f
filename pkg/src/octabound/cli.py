"""Command-line front end: ``octabound <table|threshold|scan|verify>``."""
from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .checks import LEVELS, run_level
from .decoding import TranscriptionError, decoding_polynomial_root
from .noise import (
    InjectionVariant,
    ResourceSpec,
    general_gate_resource,
    general_state_resource,
    phase_gate_resource,
    phase_state_resource,
)
from .scan import GENERAL_GRID, PHASE_GRID, Model, ScanKind, family, scan_general_resources, scan_phase_resources
from .solver import (
    NoThresholdError,
    NonMonotoneError,
    depolarizing_two_hit_threshold,
    epg_phase_equation,
    epg_phase_threshold_general,
    single_hit_dephasing_bound,
    two_hit_dephasing_threshold,
)
from .summary import summary_rows

__all__ = ["main", "parse_angle", "parse_resource", "build_parser", "RunConfig"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
RECORD_FIELDS = ("model", "variant", "resource", "strength", "residual", "reference_value", "tolerance", "abs_diff")
INJECTION_MODELS = ("knill", "epg")
CLOSED_FORM_MODELS = ("dephasing-two-hit", "epg-general-phase", "depolarizing-two-hit", "decoding-poly")


class ConfigError(ValueError):
    pass


_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*(?:[eE][-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """Radians, or a multiple of pi such as ``pi/4``, ``3pi/8`` or ``0.25*pi``."""
    m = _ANGLE.match(text.lower())
    if m:
        coeff = m.group(1)
        if coeff in ("", "+", "-"):
            coeff = coeff + "1"
        value = float(coeff) * math.pi
        if m.group(2):
            value /= float(m.group(2))
        return value
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot read angle {text!r}") from None


def _parse_vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise ConfigError(f"cannot read Bloch vector {text!r}") from None
    if v.shape != (3,) or np.linalg.norm(v) == 0.0:
        raise ConfigError(f"Bloch vector needs three components, not all zero: {text!r}")
    return v / np.linalg.norm(v)


def parse_resource(text: str, variant: InjectionVariant) -> ResourceSpec:
    """``phase:THETA`` (a phase state or phase gate, by variant), ``state:x,y,z`` or ``gate:x,y,z``."""
    kind, sep, param = text.partition(":")
    if not sep:
        raise ConfigError(f"resource must look like KIND:PARAM, got {text!r}")
    kind = kind.strip().lower()
    gate = variant is InjectionVariant.GATE
    if kind == "phase":
        theta = parse_angle(param)
        return phase_gate_resource(theta) if gate else phase_state_resource(theta)
    if kind in ("state", "gate"):
        if (kind == "gate") != gate:
            raise ConfigError(f"resource kind {kind!r} does not fit variant {variant.value!r}")
        v = _parse_vector(param)
        return general_gate_resource(v) if gate else general_state_resource(v)
    raise ConfigError(f"unknown resource kind {kind!r} (phase, state or gate)")


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: Optional[str]
    variant: InjectionVariant
    resource: Optional[str]
    kind: ScanKind
    fmt: str
    out: Optional[str]
    level: str


# Reference values for specific (non-scanned) inputs.
_SPECIFIC_REFERENCE = {
    ("knill", "state"): (0.136861, 1e-5),
    ("knill", "gate"): (0.095858, 1e-5),
    ("epg", "state"): (0.0368124, 1e-6),
    ("epg", "gate"): (0.0300339, 1e-6),
}
_CLOSED_REFERENCE = {
    "dephasing-two-hit": (0.07955, 1e-5),
    "epg-general-phase": (0.1041008383, 1e-9),
    "depolarizing-two-hit": (0.2605, 2e-4),
    "decoding-poly": (0.092888, 1e-5),
}


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.10g}"
    return str(x)


def _emit(records: list[dict], fmt: str, stream) -> None:
    if fmt == "records":
        for rec in records:
            stream.write(" ".join(f"{k}={_fmt(rec[k]).replace(' ', '_')}" for k in RECORD_FIELDS) + "\n")
    elif fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for rec in records:
            w.writerow([_fmt(rec[k]) for k in RECORD_FIELDS])
    else:
        for rec in records:
            for k in RECORD_FIELDS + tuple(k for k in rec if k not in RECORD_FIELDS):
                stream.write(f"{k:>16}: {_fmt(rec[k])}\n")


def _record(model, variant, resource, strength, residual, ref, tol, **extra) -> dict:
    rec = {
        "model": model,
        "variant": variant,
        "resource": resource,
        "strength": strength,
        "residual": residual,
        "reference_value": ref,
        "tolerance": tol,
        "abs_diff": abs(strength - ref) if not math.isnan(ref) else math.nan,
    }
    rec.update(extra)
    return rec


def cmd_table(cfg: RunConfig, stream) -> int:
    rows = summary_rows()
    if cfg.fmt == "plain":
        stream.write(f"{'resources | method | model':<52} {'computed':>10} {'reference':>10} {'tol':>8} {'|diff|':>10}  status\n")
        for r in rows:
            stream.write(
                f"{r.entry.label:<52} {100 * r.strength:>9.4f}% {100 * r.entry.reference_value:>9.2f}% "
                f"{100 * r.entry.tolerance:>7.2f}% {100 * r.abs_diff:>9.4f}%  {'ok' if r.ok else 'DEVIATES'}\n"
            )
    else:
        recs = [
            _record(r.entry.model, r.entry.method, r.entry.resources.replace(" ", "-") + "@" + r.resource, r.strength,
                    math.nan, r.entry.reference_value, r.entry.tolerance)
            for r in rows
        ]
        _emit(recs, cfg.fmt, stream)
    bad = [r for r in rows if not r.ok]
    for r in bad:
        sys.stderr.write(f"row {r.entry.label!r} deviates by {r.abs_diff:.3g} (tolerance {r.entry.tolerance:g})\n")
    return EXIT_FAIL if bad else EXIT_OK


def cmd_threshold(cfg: RunConfig, stream) -> int:
    model = cfg.model
    if model in INJECTION_MODELS:
        res = parse_resource(cfg.resource or "phase:pi/4", cfg.variant)
        kind = ScanKind.PHASE if res.theta is not None else ScanKind.GENERAL
        fam = family(model, cfg.variant, kind)
        r = fam.threshold(res)
        ref, tol = math.nan, math.nan
        if res.theta is not None and abs(res.theta - math.pi / 4) < 1e-9:
            ref, tol = _SPECIFIC_REFERENCE[(model, cfg.variant.value)]
        rec = _record(model, cfg.variant.value, res.label(), r.strength, r.residual, ref, tol,
                      bracket=r.bracket, equation="|x'| + |y'| + |z'| = 1 for the effective image")
    elif model == "dephasing-two-hit":
        p, full = two_hit_dephasing_threshold()
        single = single_hit_dephasing_bound()
        rec = _record(model, "-", "-", p, (1 - 2 * p) ** 2 - (1 - 2 * single), *_CLOSED_REFERENCE[model],
                      full_dephasing=full, single_hit=single, equation="(1-2p)^2 = 1/sqrt(2)")
    elif model == "epg-general-phase":
        r = epg_phase_threshold_general()
        rec = _record(model, "-", "-", r.strength, epg_phase_equation(r.strength), *_CLOSED_REFERENCE[model],
                      bracket=r.bracket, equation="(1-2p)(1-2(1-sqrt(1-p))) = 1/sqrt(2)")
    elif model == "depolarizing-two-hit":
        p = depolarizing_two_hit_threshold()
        rec = _record(model, "-", "-", p, (1 - p) ** 2 + (6 - 2 * math.sqrt(2)) / 7 - 1, *_CLOSED_REFERENCE[model],
                      equation="(1-p)^2 + (6-2sqrt(2))/7 = 1")
    elif model == "decoding-poly":
        r = decoding_polynomial_root()
        rec = _record(model, "-", "-", r.root, r.residual, *_CLOSED_REFERENCE[model], bracket=r.bracket,
                      equation="-1/2 - num(e)/den(e) = 0",
                      other_real_roots=";".join(f"{x:.10g}" for x in r.other_real_roots) or "none")
    else:
        raise ConfigError(f"unknown model {model!r}")
    _emit([rec], cfg.fmt, stream)
    return EXIT_OK


def _scan_csv(result, cfg: RunConfig, stream) -> None:
    grid = f"{PHASE_GRID}" if result.kind is ScanKind.PHASE else f"{GENERAL_GRID}x{GENERAL_GRID}"
    stream.write(
        f"# model={cfg.model} variant={cfg.variant.value} kind={result.kind.value} grid={grid} "
        f"version={__version__}\n"
    )
    w = csv.writer(stream, lineterminator="\n")
    if result.kind is ScanKind.PHASE:
        w.writerow(("theta", "threshold"))
    else:
        w.writerow(("polar", "azimuth", "threshold"))
    for row in result.profile:
        w.writerow([f"{v:.12g}" for v in row])


def cmd_scan(cfg: RunConfig, stream) -> int:
    if cfg.model not in INJECTION_MODELS:
        raise ConfigError(f"scans need an injection model ({', '.join(INJECTION_MODELS)}), got {cfg.model!r}")
    scan = scan_phase_resources if cfg.kind is ScanKind.PHASE else scan_general_resources
    result = scan(Model(cfg.model), cfg.variant)
    ref = {
        ("knill", "state", "phase"): 0.1371, ("knill", "gate", "phase"): 0.0959,
        ("epg", "state", "phase"): 0.0369, ("epg", "gate", "phase"): 0.0301,
        ("knill", "state", "general"): 0.2178, ("knill", "gate", "general"): 0.1519,
        ("epg", "state", "general"): 0.0631, ("epg", "gate", "general"): 0.0503,
    }[(cfg.model, cfg.variant.value, cfg.kind.value)]
    summary = _record(cfg.model, cfg.variant.value, result.best_resource.label(), result.best_threshold,
                      result.engine_check.residual, ref, 2e-4,
                      best_parameter=",".join(f"{v:.10g}" for v in result.best_parameter))
    if cfg.out:
        try:
            with open(cfg.out, "w", newline="") as fh:
                _scan_csv(result, cfg, fh)
        except OSError as exc:
            raise ConfigError(f"cannot write {cfg.out!r}: {exc.strerror}") from None
        _emit([summary], "plain" if cfg.fmt == "csv" else cfg.fmt, stream)
    elif cfg.fmt == "csv":
        _scan_csv(result, cfg, stream)
    else:
        _emit([summary], cfg.fmt, stream)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, stream) -> int:
    results = run_level(cfg.level)
    if cfg.fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(("check", "params", "residual", "status"))
        for r in results:
            w.writerow((r.name, r.params, f"{r.residual:.3g}", "pass" if r.passed else "FAIL"))
    else:
        for r in results:
            stream.write(f"{'pass' if r.passed else 'FAIL'}  {r.name:<17} residual={r.residual:<10.3g} {r.params}\n")
    passed = sum(r.passed for r in results)
    stream.write(f"{passed}/{len(results)} checks passed at level {cfg.level}\n")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


COMMANDS = {"table": cmd_table, "threshold": cmd_threshold, "scan": cmd_scan, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="octabound", description="Classical-simulability threshold bounds for injected resources.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--model", choices=INJECTION_MODELS + CLOSED_FORM_MODELS)
    p.add_argument("--variant", default="state", choices=[v.value for v in InjectionVariant])
    p.add_argument("--resource", help="KIND:PARAM, e.g. phase:pi/4, state:1,1,1 or gate:1,0.5,0")
    p.add_argument("--kind", default="phase", choices=[k.value for k in ScanKind], help="resource family to scan")
    p.add_argument("--format", dest="fmt", default="plain", choices=("plain", "csv", "records"))
    p.add_argument("--out", help="write the scan profile CSV here")
    p.add_argument("--level", default="all", choices=sorted(LEVELS))
    return p


def main(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG
    cfg = RunConfig(args.command, args.model, InjectionVariant(args.variant), args.resource,
                    ScanKind(args.kind), args.fmt, args.out, args.level)
    if cfg.command in ("threshold", "scan") and not cfg.model:
        sys.stderr.write(f"octabound {cfg.command}: --model is required\n")
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg, stream)
    except ConfigError as exc:
        sys.stderr.write(f"octabound: {exc}\n")
        return EXIT_CONFIG
    except (NoThresholdError, NonMonotoneError, TranscriptionError) as exc:
        sys.stderr.write(f"octabound: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    except ValueError as exc:
        # precondition violations from the library, e.g. an impure resource vector
        sys.stderr.write(f"octabound: invalid configuration: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
