"""Command-line front end: ``reskit solve | stability-lab | study | schema``.

Exit codes: 0 success, 2 invalid configuration or flags, 3 solver failure,
4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import jsonschema

from .basis import Kernel
from .errors import InvalidArgument, InvalidConfiguration, NotFound, ReskitError
from .geometry import Domain, boundary_points, interior_points
from .methods import (
    MIN_OVERSAMPLING, convergence_study, solve_collocation, solve_drm, solve_mfs, solve_mps,
    solve_trefftz,
)
from .operators import manufactured
from .solve import LsqOptions
from .stability import lab_csv, stability_lab

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

_DOMAIN = {
    "oneOf": [
        {"type": "object", "properties": {"kind": {"const": "unit_disk"}},
         "required": ["kind"], "additionalProperties": False},
        {"type": "object",
         "properties": {"kind": {"const": "rectangle"},
                        "bounds": {"type": "array", "items": {"type": "number"},
                                   "minItems": 4, "maxItems": 4}},
         "required": ["kind", "bounds"], "additionalProperties": False},
    ]
}
_POS_INT = {"type": "integer", "minimum": 1}
_KERNEL = {"enum": ["matern52", "matern72", "gaussian"]}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "reskit run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["problem", "method"],
    "properties": {
        "problem": {
            "type": "object", "additionalProperties": False, "required": ["case"],
            "properties": {
                "domain": _DOMAIN,
                "operator": {"enum": ["none", "neg_laplace", "id_minus_laplace"]},
                "case": {"type": "string"},
            },
        },
        "method": {
            "type": "object", "additionalProperties": False, "required": ["name"],
            "properties": {
                "name": {"enum": ["trefftz", "mfs", "mps", "drm", "collocation"]},
                "K": _POS_INT,
                "n_charges": _POS_INT,
                "factor": {"type": "number", "exclusiveMinimum": 1},
                "h": {"type": "number", "exclusiveMinimum": 0},
                "kernel": _KERNEL,
                "shape": {"type": "number", "exclusiveMinimum": 0},
                "boundary": {
                    "type": "object", "additionalProperties": False, "required": ["method"],
                    "properties": {
                        "method": {"enum": ["trefftz", "mfs"]},
                        "K": _POS_INT, "n_charges": _POS_INT,
                        "factor": {"type": "number", "exclusiveMinimum": 1},
                        "n_boundary": _POS_INT,
                    },
                },
            },
        },
        "discretization": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "n_interior": _POS_INT,
                "n_boundary": _POS_INT,
                "family": {"enum": ["equidistant", "chebyshev"]},
                "oversampling": {"type": "number", "minimum": MIN_OVERSAMPLING},
            },
        },
        "solver": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "name": {"enum": ["lsq", "lawson"]},
                "svd_tol": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "max_iter": _POS_INT,
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {"dir": {"type": "string"}, "certificate": {"type": "string"}},
        },
        "report_stability": {"type": "boolean"},
    },
}

_RESIDUAL_KEYS = ["discrete_sup", "discrete_l2", "fine_sup_interior", "fine_sup_boundary", "combined"]
_NUM_OR_NULL = {"type": ["number", "null"]}

CERTIFICATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "reskit certificate",
    "type": "object",
    "required": ["method", "M", "n_interior", "n_boundary", "oversampling_ratio",
                 "residual", "bound", "flags"],
    "properties": {
        "method": {"type": "string"},
        "M": {"type": "integer", "minimum": 1},
        "n_interior": {"type": "integer", "minimum": 0},
        "n_boundary": {"type": "integer", "minimum": 0},
        "oversampling_ratio": {"type": "number", "exclusiveMinimum": 0},
        "residual": {
            "type": "object", "required": _RESIDUAL_KEYS, "additionalProperties": False,
            "properties": {k: _NUM_OR_NULL for k in _RESIDUAL_KEYS},
        },
        "bound": {
            "type": "object", "required": ["value", "kind"], "additionalProperties": False,
            "properties": {"value": {"type": "number", "minimum": 0},
                           "kind": {"enum": ["max-principle", "residual-only"]}},
        },
        "stability": {
            "type": "object", "required": ["C", "method"],
            "properties": {"C": {"type": "number"}, "method": {"type": "string"}},
        },
        "truth": {"type": "object", "required": ["sup_error"],
                  "properties": {"sup_error": {"type": "number", "minimum": 0}}},
        "flags": {"type": "array", "items": {"type": "string"}},
        "coefficients": {"type": "array", "items": {"type": "number"}},
        "details": {"type": "object"},
        "timestamp": {"type": "string"},
    },
}


class ConfigError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"reskit: {msg}", file=sys.stderr)


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _inside(base: Path, name: str) -> Path:
    out = (base / name).resolve()
    if base.resolve() not in (out, *out.parents):
        raise ConfigError(f"output file {name!r} escapes the output directory")
    return out


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def validate_config(cfg) -> None:
    """Raise :class:`ConfigError` with a readable message when ``cfg`` is invalid."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        msg = f"config invalid at {where}: {exc.message}"
        if exc.absolute_path and exc.absolute_path[-1] == "oversampling":
            msg += f" (oversampling floor is {MIN_OVERSAMPLING:g}x: rows >= {MIN_OVERSAMPLING:g} x columns)"
        raise ConfigError(msg) from None


def run_config(cfg: dict):
    """Run the method described by a validated config and return its certificate."""
    prob = cfg["problem"]
    domain = Domain.from_config(prob.get("domain", {"kind": "unit_disk"}))
    case = manufactured(prob["case"])
    meth = dict(cfg["method"])
    name = meth.pop("name")
    disc = cfg.get("discretization", {})
    ratio = disc.get("oversampling", MIN_OVERSAMPLING)
    family = disc.get("family", "equidistant")
    sv = dict(cfg.get("solver", {}))
    solver = sv.pop("name", "lsq")
    opts = LsqOptions(**sv)
    stab = cfg.get("report_stability", False)
    kernel = Kernel(meth.get("kernel", "matern72" if name == "collocation" else "matern52"),
                    meth.get("shape", 1.0))
    default_op = {"trefftz": "none", "mfs": "none", "mps": "id_minus_laplace"}.get(name, "neg_laplace")
    operator = prob.get("operator", default_op)

    if name in ("trefftz", "mfs") and operator != "none":
        raise InvalidConfiguration(f"{name} fits boundary data only; operator must be 'none'")
    if name == "trefftz":
        K = meth.get("K", 8)
        nb = disc.get("n_boundary") or math.ceil(ratio * (2 * K + 1))
        return solve_trefftz(domain, case, K, nb, solver, opts, family, ratio, stab)
    if name == "mfs":
        n = meth.get("n_charges", 16)
        nb = disc.get("n_boundary") or math.ceil(ratio * n)
        return solve_mfs(domain, case, n, meth.get("factor", 2.0), nb, solver, opts, family, ratio, stab)
    if name == "mps":
        return solve_mps(domain, case, meth.get("h", 0.2), kernel, operator, solver, opts, ratio, stab)
    if name == "drm":
        bnd = dict(meth.get("boundary", {"method": "trefftz", "K": 12}))
        if bnd["method"] == "trefftz":
            bnd.setdefault("K", 12)
            bnd.setdefault("n_boundary", math.ceil(ratio * (2 * bnd["K"] + 1)))
        else:
            bnd.setdefault("n_charges", 32)
            bnd.setdefault("factor", 2.0)
            bnd.setdefault("n_boundary", math.ceil(ratio * bnd["n_charges"]))
        bnd.update(solver=solver, opts=opts, oversampling=ratio)
        mps = {"h": meth.get("h", 0.2), "kernel": kernel, "solver": solver, "opts": opts,
               "oversampling": ratio}
        return solve_drm(domain, case, mps, bnd, operator)
    ni = disc.get("n_interior", 64)
    nb = disc.get("n_boundary", 32)
    return solve_collocation(domain, case, kernel, interior_points(domain, ni),
                             boundary_points(domain, nb, family), operator)


def _load_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    validate_config(cfg)
    return cfg


def cmd_solve(args) -> int:
    try:
        cfg = _load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    out = cfg.get("output", {})
    base = Path(args.out_dir or out.get("dir", "."))
    try:
        target = _inside(base, out.get("certificate", "certificate.json"))
        cert = run_config(cfg)
    except (ConfigError, InvalidConfiguration, InvalidArgument, NotFound) as exc:
        _err(f"config invalid: {exc}")
        return EXIT_CONFIG
    except ReskitError as exc:
        _err(f"solver failure: {type(exc).__name__}: {exc}")
        return EXIT_SOLVER
    doc = cert.to_json()
    try:
        write_atomic(target, dump_json(doc))
    except OSError as exc:
        _err(f"cannot write {target}: {exc}")
        return EXIT_IO
    if cert.flags:
        _err("flags: " + ", ".join(cert.flags))
    print(f"{cert.method} M={cert.M} N={cert.n_interior + cert.n_boundary} "
          f"combined={cert.residual.combined:.3e} bound={cert.bound:.3e} ({cert.bound_kind})")
    return EXIT_OK


def _int_list(text):
    items = [t for t in text.split(",") if t.strip()]
    try:
        vals = [int(t) for t in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text):
    items = [t for t in text.split(",") if t.strip()]
    try:
        vals = [float(t) for t in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def cmd_stability_lab(args) -> int:
    try:
        reports = stability_lab(args.family, args.orders, args.oversampling, args.fine_factor)
    except InvalidArgument as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except ReskitError as exc:
        _err(f"solver failure: {exc}")
        return EXIT_SOLVER
    text = lab_csv(reports)
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        write_atomic(Path(args.out), text)
    except OSError as exc:
        _err(f"cannot write {args.out}: {exc}")
        return EXIT_IO
    return EXIT_OK


def cmd_study(args) -> int:
    try:
        case = manufactured(args.case)
        domain = Domain.from_config(json.loads(args.domain))
        options = json.loads(args.options) if args.options else {}
        if not isinstance(options, dict):
            raise InvalidConfiguration("--options must be a JSON object")
        study = convergence_study(args.method, args.ladder, case, options, domain)
    except (InvalidConfiguration, InvalidArgument, NotFound, json.JSONDecodeError) as exc:
        _err(f"invalid study request: {exc}")
        return EXIT_CONFIG
    base = Path(args.out_dir)
    try:
        write_atomic(base / "study.csv", study.csv())
        for size, cert in zip(args.ladder, study.certificates):
            if cert is not None:
                write_atomic(base / f"certificate_{args.method}_{size:g}.json", dump_json(cert.to_json()))
    except OSError as exc:
        _err(f"cannot write to {base}: {exc}")
        return EXIT_IO
    if study.n_failed:
        for r in study.rows:
            if r["status"] != "ok":
                _err(f"size {r['size']:g}: {r['status']}")
    if study.n_failed == len(study.rows):
        return EXIT_SOLVER
    return EXIT_OK


def cmd_schema(args) -> int:
    sys.stdout.write(dump_json(CERTIFICATE_SCHEMA if args.certificate else CONFIG_SCHEMA))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reskit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one method from a JSON config")
    s.add_argument("config")
    s.add_argument("--out-dir", help="override output.dir from the config")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("stability-lab", help="sup-norm stability constants of 1D polynomial sampling")
    s.add_argument("--family", choices=["chebyshev", "equidistant"], required=True)
    s.add_argument("--oversampling", choices=["none", "pi", "msquared"], default="none")
    s.add_argument("--orders", type=_int_list, required=True, help="comma-separated, ascending")
    s.add_argument("--fine-factor", type=int, default=16)
    s.add_argument("--out", help="CSV path ('-' or omitted: stdout)")
    s.set_defaults(func=cmd_stability_lab)

    s = sub.add_parser("study", help="convergence study over a size ladder")
    s.add_argument("--method", required=True)
    s.add_argument("--case", required=True)
    s.add_argument("--ladder", type=_float_list, required=True,
                   help="K (trefftz), charges (mfs), 1/h (mps, drm) or boundary count/2 (collocation)")
    s.add_argument("--domain", default='{"kind": "unit_disk"}', help="domain as JSON")
    s.add_argument("--options", help="method options as a JSON object")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_study)

    s = sub.add_parser("schema", help="print the config JSON schema")
    s.add_argument("--certificate", action="store_true", help="print the certificate schema instead")
    s.set_defaults(func=cmd_schema)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
