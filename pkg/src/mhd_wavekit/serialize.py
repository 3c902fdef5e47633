"""Deterministic JSON/CSV encoding of states, waves, curves and certificates.

Floats are written with 17 significant digits so every binary64 value
round-trips exactly; identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidRequestError
from .thermo import ConservedState, DiscontinuityWave, FluidState

__all__ = [
    "fmt_float",
    "dumps",
    "write_json",
    "parse_state",
    "state_to_dict",
    "wave_to_dict",
    "certificate_to_dict",
    "curve_columns",
    "curve_rows",
    "f_trace_rows",
    "emit_plot_data",
]

FLUID_KEYS = frozenset({"v", "B2", "B3", "u1", "u2", "u3"})
CONSERVED_KEYS = frozenset({"v", "q2", "q3", "u1", "u2", "u3"})


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = f"{x:.17g}"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    try:
        path.write_text(dumps(obj), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def parse_state(data: dict):
    """Build a Fluid- or ConservedState; the key set picks the representation."""
    if not isinstance(data, dict):
        raise InvalidRequestError("state must be a JSON object")
    keys = frozenset(data)
    try:
        if keys == FLUID_KEYS:
            return FluidState(**{k: float(data[k]) for k in FLUID_KEYS})
        if keys == CONSERVED_KEYS:
            return ConservedState(**{k: float(data[k]) for k in CONSERVED_KEYS})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidRequestError):
            raise
        raise InvalidRequestError(f"state has a non-numeric component: {exc}") from exc
    raise InvalidRequestError(
        f"state keys {sorted(keys)} match neither {sorted(FLUID_KEYS)} nor {sorted(CONSERVED_KEYS)}")


def state_to_dict(state) -> dict:
    return state.to_dict()


def wave_to_dict(wave: DiscontinuityWave, checks: dict | None = None) -> dict:
    out = {
        "left": wave.left.to_dict(),
        "right": wave.right.to_dict(),
        "sigma": wave.sigma,
        "family": wave.family,
        "kind": wave.kind,
    }
    if checks is not None:
        out["checks"] = checks
    return out


def certificate_to_dict(cert, trace_file: str | None = None) -> dict:
    bound = cert.coercivity
    prof = cert.witness_profile
    return {
        "a": cert.a,
        "branch": cert.branch,
        "witness": cert.witness.to_dict(),
        "crossing_v": cert.crossing_v,
        "F_at_witness": cert.F_at_witness,
        "scale": cert.scale,
        "relative_residual": cert.relative_residual,
        "mechanism": cert.mechanism,
        "conditions": cert.conditions,
        "coercivity": None if bound is None else {
            "c1": bound.c1, "c2": bound.c2, "v_star": bound.v_star,
            "crossing_above_v_star": cert.crossing_v >= bound.v_star,
        },
        "witness_profile": {
            "breakpoints": list(prof.breakpoints),
            "values": [s.to_dict() for s in prof.values],
            "metadata": prof.metadata,
        },
        "trace_file": trace_file,
    }


def curve_columns(family: int) -> list:
    return ["v", "B2", "B3", "u1", "u2", "u3", f"lambda_{family}"]


def curve_rows(curve) -> list:
    lam = curve.speeds()
    return [[w.v, w.B2, w.B3, w.u1, w.u2, w.u3, l] for w, l in zip(curve.states, lam)]


def f_trace_rows(cert) -> list:
    rows = []
    samples = {v: w for v, w in cert.trace.samples}
    for v, F in cert.f_trace:
        w = samples.get(v)
        if w is None:
            w = cert.witness.to_fluid()
        rows.append([v, F, w.B2, w.B3, w.u1, w.u2, w.u3])
    return rows


F_TRACE_COLUMNS = ["v", "F_a", "B2", "B3", "u1", "u2", "u3"]


def emit_plot_data(rows, columns, path, wave=None, a=None, branch=None) -> Path:
    """Write ``rows`` as CSV plus a sidecar ``<stem>.manifest.json``."""
    if not rows:
        raise InvalidRequestError("refusing to write an empty curve")
    path = Path(path)
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise InvalidRequestError("row width does not match the column list")
        lines.append(",".join(fmt_float(x) for x in row))
    manifest = {
        "columns": list(columns),
        "rows": len(rows),
        "wave": None if wave is None else wave_to_dict(wave),
        "a": a,
        "branch": branch,
    }
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        write_json(manifest, path.with_suffix(".manifest.json"))
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path}: {exc}") from exc
    return path
