"""Batch command-line front end driven by JSON scenario files.

    mhd-wavekit <subcommand> --scenario FILE [--out DIR]
                [--tol-abs X --tol-rel Y] [--a-grid LO,HI,N] [--jobs N] [--check]

Exit status: 0 success, 2 inconclusive certificate, 3 inadmissible or
unsolvable wave, 4 input error, 1 unexpected internal failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import jsonschema

from . import charfields, contraction, wavecurves
from .errors import (
    AmbiguousShockError,
    DegeneracyError,
    DegenerateFunctionalError,
    DomainError,
    InadmissibleWaveError,
    InconclusiveError,
    InvalidRequestError,
    NoCrossingError,
    NoShockError,
    ResonanceError,
    RHResidualError,
    StiffnessError,
)
from .serialize import (
    F_TRACE_COLUMNS,
    certificate_to_dict,
    curve_columns,
    curve_rows,
    emit_plot_data,
    f_trace_rows,
    parse_state,
    wave_to_dict,
    write_json,
)
from .thermo import DEFAULT_TOL, GasLaw, Tolerance, as_fluid

log = logging.getLogger("mhd_wavekit")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INCONCLUSIVE = 2
EXIT_INADMISSIBLE = 3
EXIT_INPUT = 4

SUBCOMMANDS = ("fields", "hugoniot", "contact", "rarefaction", "dissipation", "certify", "sweep-a")

_NUM = {"type": "number"}
_STATE = {
    "oneOf": [
        {"type": "object", "additionalProperties": False,
         "required": ["v", "B2", "B3", "u1", "u2", "u3"],
         "properties": {k: _NUM for k in ("v", "B2", "B3", "u1", "u2", "u3")}},
        {"type": "object", "additionalProperties": False,
         "required": ["v", "q2", "q3", "u1", "u2", "u3"],
         "properties": {k: _NUM for k in ("v", "q2", "q3", "u1", "u2", "u3")}},
    ]
}


def _params(props=None, required=()):
    return {"type": "object", "additionalProperties": False,
            "properties": props or {}, "required": list(required)}


SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["law", "left"],
    "properties": {
        "law": {"type": "object", "additionalProperties": False, "required": ["gamma", "beta"],
                "properties": {"gamma": _NUM, "beta": _NUM}},
        "left": _STATE,
        "wave_request": {
            "type": "object", "minProperties": 1, "maxProperties": 1, "additionalProperties": False,
            "properties": {
                "shock": _params({"family": {"enum": [3, 4]}, "v_right": _NUM},
                                 ("family", "v_right")),
                "contact": _params({"family": {"enum": [2, 5]}, "angle": _NUM},
                                   ("family", "angle")),
            },
        },
        "analysis": {
            "type": "object", "minProperties": 1, "maxProperties": 1, "additionalProperties": False,
            "properties": {
                "fields": _params({"check": {"type": "boolean"}}),
                "hugoniot": _params(),
                "contact": _params(),
                "rarefaction": _params({"family": {"enum": [1, 6]},
                                        "origin": {"enum": ["left", "right"]},
                                        "v_floor": {"type": "number", "exclusiveMinimum": 0}}),
                "dissipation": _params(),
                "certify": _params({"a": {"type": "number", "exclusiveMinimum": 0},
                                    "v_floor": {"type": "number", "exclusiveMinimum": 0}},
                                   ("a",)),
                "sweep-a": _params({
                    "grid": {"oneOf": [
                        {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                         "minItems": 1},
                        _params({"lo": {"type": "number", "exclusiveMinimum": 0},
                                 "hi": {"type": "number", "exclusiveMinimum": 0},
                                 "n": {"type": "integer", "minimum": 1}}, ("lo", "hi", "n")),
                    ]},
                    "v_floor": {"type": "number", "exclusiveMinimum": 0}}),
            },
        },
        "output": _params({"dir": {"type": "string"},
                           "formats": {"type": "array", "items": {"enum": ["json", "csv"]}}}),
    },
}


class ScenarioError(InvalidRequestError):
    """Scenario file is unreadable or violates the schema."""


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def load_scenario(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ScenarioError(f"{path}: field {_pointer(err.absolute_path)}: {err.message}")
    return doc


def parse_a_grid(text: str) -> list:
    try:
        lo, hi, n = text.split(",")
        return contraction.default_a_grid(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise InvalidRequestError(f"--a-grid expects LO,HI,N, got {text!r}") from exc


# ---------------------------------------------------------------------- analyses

class Context:
    def __init__(self, doc: dict, args):
        self.doc = doc
        self.law = GasLaw(float(doc["law"]["gamma"]), float(doc["law"]["beta"]))
        self.left = parse_state(doc["left"])
        out = doc.get("output", {})
        self.out = Path(args.out or out.get("dir") or "mhd_wavekit_out")
        self.formats = set(out.get("formats", ["json", "csv"]))
        tol_abs = args.tol_abs if args.tol_abs is not None else DEFAULT_TOL.abs
        tol_rel = args.tol_rel if args.tol_rel is not None else DEFAULT_TOL.rel
        self.tol = Tolerance(tol_abs, tol_rel)
        self.args = args
        self._wave = None

    def wave(self):
        if self._wave is None:
            req = self.doc.get("wave_request")
            if req is None:
                raise ScenarioError("field /wave_request: required for this analysis")
            if "shock" in req:
                r = req["shock"]
                sreq = wavecurves.ShockSolveRequest(self.left, r["family"], float(r["v_right"]), self.law)
                self._wave = wavecurves.solve_shock(sreq, self.tol)
            else:
                r = req["contact"]
                spec = wavecurves.ContactSpec(self.left, r["family"], float(r["angle"]))
                self._wave = wavecurves.contact_construct(spec, self.law)
        return self._wave

    def path(self, name: str) -> Path:
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"output directory {self.out} is not writable: {exc}") from exc
        return self.out / name


def wave_checks(wave, law, tol) -> dict:
    res, ok = wavecurves.rh_check(wave, law, rel=tol.rel)
    checks = {"rh": {"residual": res, "scale": wavecurves.rh_scale(wave, law), "passed": ok}}
    if wave.family in (3, 4):
        rep = wavecurves.lax_check(wave, law)
        checks["lax"] = {
            "passed": rep.passed, "min_margin": rep.min_margin,
            "inequalities": [{"name": i.name, "lower": i.lower, "upper": i.upper}
                             for i in rep.inequalities],
        }
        direct = wavecurves.dissipation_direct(wave, law)
        factored = wavecurves.dissipation_factored(wave, law)
        checks["dissipation"] = {"direct": direct, "factored": factored,
                                 "scale": wavecurves.dissipation_scale(wave, law),
                                 "nonpositive": direct <= 0.0 and factored <= 0.0}
        checks["signs"] = wavecurves.sign_checks(wave, law, tol)
    else:
        checks["lax"] = None
        checks["dissipation"] = {"direct": wavecurves.dissipation_direct(wave, law)}
        cls = wavecurves.condition_contact_AB(wave, tol)
        checks["contact_AB"] = {"label": cls.label, "components": cls.components,
                                "tension": cls.tension}
    return checks


def run_fields(ctx: Context, params: dict) -> tuple:
    W = as_fluid(ctx.left)
    law = ctx.law
    report = charfields.degeneracy_check(W, law)
    lam = charfields.eigenvalues(W, law)
    vecs, gnl = [], []
    for k in range(1, 7):
        try:
            vecs.append(charfields.eigenvector(W, law, k).tolist())
            gnl.append(charfields.gnl_derivative(W, law, k))
        except DegeneracyError:
            vecs.append(None)
            gnl.append(None)
    roots = charfields.alpha_roots(W, law)
    out = {
        "state": W.to_dict(),
        "alpha_minus": roots.alpha_minus,
        "alpha_plus": roots.alpha_plus,
        "eigenvalues": lam.tolist(),
        "eigenvectors": vecs,
        "gnl_derivatives": gnl,
        "degeneracy": {"degenerate": report.degenerate, "coincidence": report.coincidence,
                       "families": list(report.coinciding_families), "message": report.message},
    }
    if params.get("check") or ctx.args.check:
        import numpy as np
        A = charfields.char_matrix(W, law)
        residuals = []
        for k, r in enumerate(vecs, start=1):
            if r is None:
                residuals.append(None)
                continue
            r = np.asarray(r)
            lk = lam[k - 1]
            residuals.append(float(np.linalg.norm(A @ r - lk * r)
                                   / max(1.0, np.linalg.norm(A, 2)) / np.linalg.norm(r)))
        out["check"] = {"eigen_residuals": residuals,
                        "passed": all(x is None or x <= 1e-10 for x in residuals)}
    write_json(out, ctx.path("fields.json"))
    line = "fields: " + " ".join(f"{x:.6g}" for x in lam)
    if report.degenerate:
        line += f" [degenerate: {report.coincidence}]"
    return EXIT_OK, line


def run_wave(ctx: Context, params: dict, expect: str) -> tuple:
    req = ctx.doc.get("wave_request") or {}
    if expect not in req:
        raise ScenarioError(f"field /wave_request: analysis needs a '{expect}' request")
    wave = ctx.wave()
    checks = wave_checks(wave, ctx.law, ctx.tol)
    write_json(wave_to_dict(wave, checks), ctx.path("wave.json"))
    name = "hugoniot" if expect == "shock" else "contact"
    return EXIT_OK, (f"{name}: family={wave.family} sigma={wave.sigma:.17g} "
                     f"v_r={wave.right.v:.17g} rh={checks['rh']['residual']:.3e}")


def run_rarefaction(ctx: Context, params: dict) -> tuple:
    family = params.get("family", 1)
    origin_side = params.get("origin", "left")
    if origin_side == "right":
        origin = ctx.wave().right
    else:
        origin = ctx.left
    curve = wavecurves.rarefaction_integrate(as_fluid(origin), family, ctx.law,
                                             v_floor=params.get("v_floor"))
    if "csv" in ctx.formats:
        emit_plot_data(curve_rows(curve), curve_columns(family),
                       ctx.path(f"rarefaction_R{family}.csv"), wave=ctx._wave)
    return EXIT_OK, (f"rarefaction: family={family} samples={len(curve.samples)} "
                     f"v_end={curve.samples[-1][0]:.6g}")


def run_dissipation(ctx: Context, params: dict) -> tuple:
    wave = ctx.wave()
    direct = wavecurves.dissipation_direct(wave, ctx.law)
    out = {"wave": wave_to_dict(wave), "direct": direct}
    if not wave.is_contact:
        factored = wavecurves.dissipation_factored(wave, ctx.law)
        out.update(factored=factored, scale=wavecurves.dissipation_scale(wave, ctx.law),
                   gibbs=wavecurves.gibbs_term(wave.left.v, wave.right.v, ctx.law))
    write_json(out, ctx.path("dissipation.json"))
    line = f"dissipation: direct={direct:.17g}"
    if "factored" in out:
        line += f" factored={out['factored']:.17g}"
    return EXIT_OK, line


def _emit_certificate(ctx, cert, stem: str) -> dict:
    trace_file = None
    if "csv" in ctx.formats:
        p = emit_plot_data(f_trace_rows(cert), F_TRACE_COLUMNS, ctx.path(f"{stem}.csv"),
                           wave=cert.wave, a=cert.a, branch=cert.branch)
        trace_file = p.name
    return certificate_to_dict(cert, trace_file)


def run_certify(ctx: Context, params: dict) -> tuple:
    wave = ctx.wave()
    a = float(params["a"])
    cert = contraction.certify_noncontraction(wave, a, ctx.law, v_floor=params.get("v_floor"),
                                              tol=ctx.tol)
    write_json(_emit_certificate(ctx, cert, "certificate_trace"), ctx.path("certificate.json"))
    return EXIT_OK, (f"certify: a={a:.6g} branch={cert.branch} crossing_v={cert.crossing_v:.17g} "
                     f"|F|/scale={cert.relative_residual:.2e}")


def run_sweep(ctx: Context, params: dict) -> tuple:
    if ctx.args.a_grid:
        grid = parse_a_grid(ctx.args.a_grid)
    else:
        g = params.get("grid")
        if g is None:
            grid = contraction.default_a_grid()
        elif isinstance(g, dict):
            grid = contraction.default_a_grid(g["lo"], g["hi"], g["n"])
        else:
            grid = sorted(float(x) for x in g)
    wave = ctx.wave()
    entries = contraction.sweep_a(wave, ctx.law, grid, jobs=ctx.args.jobs,
                                  v_floor=params.get("v_floor"), tol=ctx.tol)
    results = []
    # files are written after all tasks finish, one path per entry
    for i, e in enumerate(entries):
        item = {"a": e.a, "outcome": e.outcome, "message": e.message}
        if e.certificate is not None:
            item["certificate"] = _emit_certificate(ctx, e.certificate, f"sweep_trace_{i:02d}")
        results.append(item)
    write_json({"wave": wave_to_dict(wave), "grid": grid, "entries": results},
               ctx.path("sweep.json"))
    n_ok = sum(e.outcome == "certificate" for e in entries)
    status = EXIT_OK if n_ok == len(entries) else EXIT_INCONCLUSIVE
    return status, f"sweep-a: {n_ok}/{len(entries)} certificates"


ANALYSES = {
    "fields": run_fields,
    "hugoniot": lambda ctx, p: run_wave(ctx, p, "shock"),
    "contact": lambda ctx, p: run_wave(ctx, p, "contact"),
    "rarefaction": run_rarefaction,
    "dissipation": run_dissipation,
    "certify": run_certify,
    "sweep-a": run_sweep,
}


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to its outcome class."""
    if isinstance(exc, (InconclusiveError, NoCrossingError)):
        return EXIT_INCONCLUSIVE
    if isinstance(exc, (NoShockError, AmbiguousShockError, InadmissibleWaveError,
                        DegenerateFunctionalError, RHResidualError, ResonanceError)):
        return EXIT_INADMISSIBLE
    if isinstance(exc, (InvalidRequestError, DomainError, DegeneracyError, OSError)):
        return EXIT_INPUT
    if isinstance(exc, StiffnessError):
        return EXIT_INADMISSIBLE
    return EXIT_INTERNAL


def run_scenario(path, subcommand: str = "run", args=None, stdout=None) -> int:
    """Run one scenario file; returns the process exit status."""
    stdout = stdout or sys.stdout
    if args is None:
        args = build_parser().parse_args([subcommand, "--scenario", str(path)])
    try:
        doc = load_scenario(path)
        analysis = doc.get("analysis")
        if analysis is None:
            if subcommand == "run":
                raise ScenarioError(f"{path}: field /analysis: required by 'run'")
            name, params = subcommand, {}
        else:
            (name, params), = analysis.items()
            if subcommand not in ("run", name):
                raise ScenarioError(
                    f"{path}: field /analysis: scenario requests '{name}' but the subcommand is '{subcommand}'")
        ctx = Context(doc, args)
        status, line = ANALYSES[name](ctx, params)
    except Exception as exc:  # every outcome class maps to an exit status
        status = exit_code_for(exc)
        label = type(exc).__name__
        if status == EXIT_INTERNAL:
            log.exception("internal failure")
        print(f"error [{label}]: {exc}", file=sys.stderr)
        print(f"{subcommand}: failed ({label}) exit={status}", file=stdout)
        return status
    print(line, file=stdout)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mhd-wavekit",
                                description="Wave analysis for isentropic planar MHD in Lagrangian form.")
    p.add_argument("subcommand", choices=SUBCOMMANDS + ("run",),
                   help="analysis to run; 'run' uses the scenario's own analysis field")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--tol-abs", type=float, dest="tol_abs")
    p.add_argument("--tol-rel", type=float, dest="tol_rel")
    p.add_argument("--a-grid", dest="a_grid", help="LO,HI,N log grid for sweep-a")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for sweep-a")
    p.add_argument("--check", action="store_true", help="run the eigen-residual suite (fields)")
    return p


def _configure_logging():
    level = os.environ.get("MHD_WAVEKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return run_scenario(args.scenario, args.subcommand, args)


if __name__ == "__main__":
    sys.exit(main())
