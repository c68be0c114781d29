"""``muntz`` command line: validate a JSON job spec and run it.

Exit codes: 0 for any honest outcome (Indeterminate included), 2 for input
errors, 3 for precision failures or an Inconsistent verdict.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

from jsonschema import Draft202012Validator

from .criteria import DEFAULT_GRID, B_alpha_profile, default_log_C, decide, envelope_f, leading_alpha
from .errors import MuntzError, NotAdmissible, PrecisionError, SpecError, TailBoundFail
from .exponents import m_of_r, sequence_from_spec
from .fuchs import FuchsProduct, check_lower_bound, check_upper_bound, lower_bound_grid, quarter_disc_grid
from .gram import error_sweep
from .numerics.tail import GridSpec
from .weight import admissibility_certificate, normality_probe, weight_from_spec, x_log_phi

SCHEMA_VERSION = "1.0"
TASKS = ("decide", "sweep", "eval_tables", "probe", "fuchs_check")
EXIT_OK, EXIT_INPUT, EXIT_PRECISION = 0, 2, 3

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pair = {"type": "array", "prefixItems": [_num, _pos], "minItems": 2, "maxItems": 2}

_WEIGHT_SCHEMAS = {
    "gamma_exp": {
        "type": "object", "required": ["type", "D", "alpha"], "additionalProperties": False,
        "properties": {"type": {"const": "gamma_exp"}, "beta": _num, "D": _pos, "alpha": _pos},
    },
    "product_osc": {
        "type": "object", "required": ["type", "osc", "terms"], "additionalProperties": False,
        "properties": {
            "type": {"const": "product_osc"}, "beta": _num,
            "osc": {"type": "object", "required": ["const"], "additionalProperties": False,
                    "properties": {"const": _num, "sin": {"type": "array", "items": _pair},
                                   "cos": {"type": "array", "items": _pair}}},
            "terms": {"type": "array", "minItems": 1,
                      "items": {"type": "array", "prefixItems": [_num, {"type": "number", "minimum": 0}],
                                "minItems": 2, "maxItems": 2}},
        },
    },
    "table": {
        "type": "object", "required": ["type", "t", "w", "decay"], "additionalProperties": False,
        "properties": {
            "type": {"const": "table"},
            "t": {"type": "array", "minItems": 2, "items": _pos},
            "w": {"type": "array", "minItems": 2, "items": _pos},
            "decay": {"type": "object", "required": ["rate", "power"], "additionalProperties": False,
                      "properties": {"rate": _pos, "power": _pos}},
            "small_t_power": _num, "alpha": _pos,
        },
    },
}

_SEQUENCE_SCHEMAS = {
    "arithmetic": {"type": "object", "required": ["type", "a1", "d"], "additionalProperties": False,
                   "properties": {"type": {"const": "arithmetic"}, "a1": _pos, "d": _pos}},
    "power": {"type": "object", "required": ["type", "c", "p"], "additionalProperties": False,
              "properties": {"type": {"const": "power"}, "c": _pos, "p": _pos}},
    "geometric": {"type": "object", "required": ["type", "a1", "q"], "additionalProperties": False,
                  "properties": {"type": {"const": "geometric"}, "a1": _pos,
                                 "q": {"type": "number", "exclusiveMinimum": 1}}},
    "explicit": {"type": "object", "required": ["type", "values"], "additionalProperties": False,
                 "properties": {"type": {"const": "explicit"},
                                "values": {"type": "array", "minItems": 1, "items": _pos}}},
}

_JOB_SCHEMA = {
    "type": "object", "required": ["weight", "sequence", "tasks"], "additionalProperties": False,
    "properties": {
        "weight": {"type": "object"}, "sequence": {"type": "object"},
        "tasks": {"type": "array", "minItems": 1, "uniqueItems": True, "items": {"enum": list(TASKS)}},
        "sweep_params": {
            "type": "object", "required": ["target_b"], "additionalProperties": False,
            "properties": {"target_b": _num,
                           "n_values": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}}},
        },
        "grids": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "envelope": {"type": "object", "additionalProperties": False,
                             "properties": {"j_min": {"type": "integer", "minimum": 0},
                                            "j_max": {"type": "integer", "minimum": 3}}},
                "fuchs": {"type": "object", "additionalProperties": False,
                          "properties": {"r_max": _pos, "n_radii": {"type": "integer", "minimum": 2},
                                         "n_angles": {"type": "integer", "minimum": 2}}},
            },
        },
        "probe": {"type": "object", "additionalProperties": False,
                  "properties": {"n_max": {"type": "integer", "minimum": 1, "maximum": 40}}},
        "tolerances": {"type": "object", "additionalProperties": False,
                       "properties": {"tail_tol": _pos}},
        "precision": {"enum": ["double", "compensated"]},
        "output_dir": {"type": "string"},
    },
}

DEFAULTS = {
    "grids": {"envelope": {"j_min": DEFAULT_GRID.j_min, "j_max": DEFAULT_GRID.j_max},
              "fuchs": {"r_max": 50.0, "n_radii": 24, "n_angles": 9}},
    "probe": {"n_max": 12},
    "tolerances": {"tail_tol": 1e-10},
    "precision": "compensated",
    "output_dir": "muntz-output",
}
DEFAULT_N_VALUES = list(range(1, 21))


# ---------------------------------------------------------------------------
# validation


def _pointer(base: str, path) -> str:
    return base + "".join(f"/{p}" for p in path)


def _schema_errors(schema: dict, instance, base: str) -> list:
    out = []
    for err in Draft202012Validator(schema).iter_errors(instance):
        if err.validator == "required":
            missing = [k for k in err.validator_value if k not in err.instance]
            out.extend((_pointer(base, list(err.absolute_path) + [k]), f"missing required field {k!r}")
                       for k in missing)
        elif err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            out.extend((_pointer(base, list(err.absolute_path) + [k]), f"unknown field {k!r}") for k in extra)
        else:
            out.append((_pointer(base, err.absolute_path), err.message))
    return out


def _variant_errors(obj, base: str, schemas: dict, label: str) -> list:
    if not isinstance(obj, dict):
        return []
    t = obj.get("type")
    if t is None:
        return [(base + "/type", f"missing required field 'type'; expected one of {', '.join(schemas)}")]
    if t not in schemas:
        return [(base + "/type", f"unknown {label} type {t!r}; expected one of {', '.join(schemas)}")]
    return _schema_errors(schemas[t], obj, base)


def _increasing(vals) -> bool:
    return all(b > a for a, b in zip(vals, vals[1:]))


def _semantic_errors(job: dict) -> list:
    out = []
    w = job.get("weight", {})
    beta = w.get("beta", 0.0)
    if isinstance(beta, (int, float)) and not isinstance(beta, bool) and not beta > -0.5:
        out.append(("/weight/beta", "beta must exceed -1/2"))
    if w.get("type") == "product_osc":
        osc = w.get("osc", {})
        amp = sum(abs(p[0]) for key in ("sin", "cos") for p in osc.get(key, []) if isinstance(p, list) and p)
        if isinstance(osc.get("const"), (int, float)) and not osc["const"] - amp > 0:
            out.append(("/weight/osc", "osc must stay positive: const must exceed the sum of |amplitudes|"))
        alphas = [p[1] for p in w.get("terms", []) if isinstance(p, list) and len(p) == 2]
        if alphas and not _increasing(alphas):
            out.append(("/weight/terms", "term exponents alpha must be strictly increasing"))
        terms = w.get("terms", [])
        if terms and isinstance(terms[-1], list) and terms[-1] and not (terms[-1][0] > 0 and terms[-1][1] > 0):
            out.append(("/weight/terms", "the last term needs D > 0 and alpha > 0"))
    if w.get("type") == "table":
        t, ws = w.get("t", []), w.get("w", [])
        if len(t) != len(ws):
            out.append(("/weight/w", "t and w must have the same length"))
        if not _increasing(t):
            out.append(("/weight/t", "t must be strictly increasing"))
    s = job.get("sequence", {})
    if s.get("type") == "explicit" and not _increasing(s.get("values", [])):
        out.append(("/sequence/values", "exponents must be strictly increasing"))
    sp = job.get("sweep_params", {})
    if "sweep" in job.get("tasks", []) and "sweep_params" not in job:
        out.append(("/sweep_params", "the sweep task needs sweep_params with target_b"))
    if sp and not _increasing(sp.get("n_values", DEFAULT_N_VALUES)):
        out.append(("/sweep_params/n_values", "n_values must be strictly increasing"))
    env = job.get("grids", {}).get("envelope", {})
    if {"j_min", "j_max"} <= set(env) and env["j_max"] - env["j_min"] < 3:
        out.append(("/grids/envelope", "envelope grid needs at least four points"))
    return out


def _with_defaults(job: dict) -> dict:
    out = copy.deepcopy(job)
    for key, val in DEFAULTS.items():
        if isinstance(val, dict):
            cur = out.setdefault(key, {})
            for k2, v2 in val.items():
                if isinstance(v2, dict):
                    sub = cur.setdefault(k2, {})
                    for k3, v3 in v2.items():
                        sub.setdefault(k3, v3)
                else:
                    cur.setdefault(k2, v2)
        else:
            out.setdefault(key, val)
    out["weight"].setdefault("beta", 0.0)
    if "sweep_params" in out:
        out["sweep_params"].setdefault("n_values", list(DEFAULT_N_VALUES))
    return out


@dataclass
class JobSpec:
    raw: dict  # normalized, defaults filled

    @property
    def tasks(self) -> list:
        return list(self.raw["tasks"])

    @property
    def precision(self) -> str:
        return self.raw["precision"]

    @property
    def output_dir(self) -> str:
        return self.raw["output_dir"]

    def grid(self) -> GridSpec:
        e = self.raw["grids"]["envelope"]
        return GridSpec(e["j_min"], e["j_max"])


def validate_spec(raw: str) -> JobSpec:
    """Parse and fully validate a job spec; raises :class:`SpecError` with all problems."""
    try:
        job = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecError([("", f"invalid JSON: {exc}")]) from exc
    errors = _schema_errors(_JOB_SCHEMA, job, "")
    if isinstance(job, dict):
        errors += _variant_errors(job.get("weight"), "/weight", _WEIGHT_SCHEMAS, "weight")
        errors += _variant_errors(job.get("sequence"), "/sequence", _SEQUENCE_SCHEMAS, "sequence")
        try:
            errors += _semantic_errors(job)
        except (TypeError, AttributeError, KeyError, IndexError):
            pass  # malformed structure is already reported by the schema pass
    if errors:
        raise SpecError(sorted(set(errors)))
    spec = JobSpec(_with_defaults(job))
    for key, build in (("weight", weight_from_spec), ("sequence", sequence_from_spec)):
        try:
            build(spec.raw[key])
        except (ValueError, MuntzError) as exc:
            raise SpecError([(f"/{key}", str(exc))]) from exc
    return spec


# ---------------------------------------------------------------------------
# running


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps_document(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _tables(w, seq, grid: GridSpec) -> str:
    alpha = leading_alpha(w)
    rs = grid.points()
    logB = dict(B_alpha_profile(w, alpha, rs, default_log_C(w, alpha))) if alpha else {}
    rows = []
    for r in rs:
        s = envelope_f(w, seq, r)
        lb = logB.get(r, math.nan)
        rows.append([r, s.m, 2.0 * s.m, s.f_sharp, s.f_thm4, s.branch.value,
                     s.x_star if s.x_star is not None else "", x_log_phi(w, r), lb,
                     lb + 2.0 * alpha * m_of_r(seq, r) if alpha else math.nan])
    return _csv_text(["r", "m", "log_psi", "f_sharp", "f_thm4", "branch", "x_star",
                      "x_log_phi_r", "log_B_alpha", "log_h"], rows)


def _fuchs(seq, spec: JobSpec, files: dict) -> dict:
    p = spec.raw["grids"]["fuchs"]
    try:
        fp = FuchsProduct(seq, tail_tol=spec.raw["tolerances"]["tail_tol"])
        up = check_upper_bound(fp, quarter_disc_grid(p["r_max"], p["n_radii"], p["n_angles"]))
        lo = check_lower_bound(fp, lower_bound_grid(fp, p["r_max"], p["n_radii"], p["n_angles"]))
    except (ValueError, TailBoundFail) as exc:
        return {"error": str(exc)}
    header = ["re_z", "im_z", "log_abs_H", "bound_rhs"]
    files["fuchs.csv"] = _csv_text(header, [[r.z.real, r.z.imag, r.log_abs_H, r.bound_rhs] for r in up.rows])
    files["fuchs_lower.csv"] = _csv_text(header, [[r.z.real, r.z.imag, r.log_abs_H, r.bound_rhs] for r in lo.rows])
    return {"C_fit": up.constant, "max_violation": up.extreme, "C2_fit": lo.constant,
            "min_margin": lo.extreme, "exclusion_radius": fp.exclusion_radius,
            "grid_points": {"upper": len(up.rows), "lower": len(lo.rows)}}


def run_job(spec: JobSpec) -> tuple[int, dict, dict]:
    """Run a validated job; returns ``(exit_code, document, {filename: text})``."""
    t0 = time.perf_counter()
    w = weight_from_spec(spec.raw["weight"])
    seq = sequence_from_spec(spec.raw["sequence"])
    grid = spec.grid()
    code = EXIT_OK
    files: dict = {}
    doc = {"schema_version": SCHEMA_VERSION, "job": spec.raw,
           "environment": {"precision": spec.precision, "envelope_grid_points": len(grid.points()),
                           "fuchs_grid": spec.raw["grids"]["fuchs"]}}
    tasks = spec.tasks
    if "decide" in tasks:
        rep = decide(w, seq, grid, precision=spec.precision)
        doc["report"] = rep.to_dict()
        doc["verdict"] = rep.verdict.value
        if rep.verdict.value == "Inconsistent":
            code = EXIT_PRECISION
    if "probe" in tasks:
        probe: dict = {}
        try:
            probe["admissibility"] = admissibility_certificate(w).to_dict()
        except NotAdmissible as exc:
            cert = getattr(exc, "certificate", None)
            probe["admissibility"] = cert.to_dict() if cert else {"admissible": False, "reason": str(exc)}
        try:
            probe["normality"] = normality_probe(w, spec.raw["probe"]["n_max"], spec.precision).to_dict()
        except PrecisionError as exc:
            probe["normality"] = {"verdict": "Fail", "reason": str(exc)}
        doc["probe"] = probe
    if "sweep" in tasks:
        sp = spec.raw["sweep_params"]
        res = error_sweep(w, seq, sp["target_b"], sp["n_values"], spec.precision)
        doc["sweep"] = res.to_dict()
        files["sweep.csv"] = _csv_text(["n", "dist", "cond_estimate"],
                                       [[r.n, r.dist, r.cond_estimate] for r in res.rows])
    if "eval_tables" in tasks:
        files["tables.csv"] = _tables(w, seq, grid)
    if "fuchs_check" in tasks:
        doc["fuchs"] = _fuchs(seq, spec, files)
    doc["outputs"] = sorted(["verdict.json", *files])
    doc["timing"] = {"seconds": time.perf_counter() - t0}
    files["verdict.json"] = dumps_document(doc)
    return code, doc, files


def write_outputs(out_dir: str, files: dict) -> None:
    """Write every file via a temp file and rename; nothing is left half-written."""
    os.makedirs(out_dir, exist_ok=True)
    staged = []
    try:
        for name, text in sorted(files.items()):
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, os.path.join(out_dir, name)))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _report_spec_error(exc: SpecError) -> None:
    for ptr, msg in exc.errors:
        print(f"{ptr or '/'}: {msg}", file=sys.stderr)


def main(argv: Optional[list] = None) -> int:
    ap = argparse.ArgumentParser(prog="muntz", description="Completeness of Müntz systems in weighted L2(0, inf).")
    sub = ap.add_subparsers(dest="command", required=True)
    an = sub.add_parser("analyze", help="run the tasks of a job spec")
    an.add_argument("spec")
    an.add_argument("--out", help="output directory (overrides output_dir)")
    an.add_argument("--precision", choices=["double", "compensated"])
    va = sub.add_parser("validate", help="validate a job spec and print it with defaults filled")
    va.add_argument("spec")
    args = ap.parse_args(argv)

    try:
        spec = validate_spec(_read(args.spec))
    except OSError as exc:
        print(f"cannot read {args.spec}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpecError as exc:
        _report_spec_error(exc)
        return EXIT_INPUT
    if args.command == "validate":
        sys.stdout.write(json.dumps(spec.raw, sort_keys=True, indent=2) + "\n")
        return EXIT_OK
    if args.precision:
        spec.raw["precision"] = args.precision
    if args.out:
        spec.raw["output_dir"] = args.out
    try:
        code, doc, files = run_job(spec)
    except PrecisionError as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except MuntzError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    write_outputs(spec.output_dir, files)
    print(f"{doc.get('verdict', 'done')}: wrote {', '.join(doc['outputs'])} to {spec.output_dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
