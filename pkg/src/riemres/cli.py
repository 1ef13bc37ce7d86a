"""Command-line front end.

    riemres riemann   --config cfg.json [--eps 0.02,0.05] [--order N] [--tol X] [--out report.json]
    riemres limit-map --config cfg.json
    riemres residue   --config cfg.json
    riemres pairing   --config cfg.json [--eps GRID] [--csv values.csv]
    riemres variation --config cfg.json [--eps GRID] [--csv values.csv]
    riemres verify    [--suite series|riemann|residue|pairing|all]

A config is ``{"kind": ..., "payload": {...}, "options": {...}}``; it is
validated against a strict schema before anything is computed.  Command-line
options override config options.  Exit codes: 0 success, 2 invalid input,
3 numerical failure (including failed verification), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone

import jsonschema
import numpy as np

from . import pairing as pr
from .errors import RiemresError
from .residue import (CutoffSpec, Form1D, HoloForm, pole_reduce, res_classical,
                      res_dolbeault)
from .riemann import (AnalyticWeight, SolveOptions, best_certificate,
                      boundary_residual, limit_map, solve)
from .series import Jet2
from .verify import SUITES, run_suite

log = logging.getLogger("riemres")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
KINDS = ("riemann", "limit-map", "residue", "pairing", "variation", "verify")


class ValidationError(Exception):
    pass


# -- schemas -----------------------------------------------------------------
_NUM = {"type": "number"}
_IDX = {"type": "integer", "minimum": 0}
_JET_TERM = {"type": "array", "items": [_IDX, _IDX, _NUM, _NUM], "minItems": 4, "maxItems": 4}
_PAIR = {"type": "array", "items": [_NUM, _NUM], "minItems": 2, "maxItems": 2}


def _obj(props, required=None):
    return {"type": "object", "properties": props, "additionalProperties": False,
            "required": list(props) if required is None else required}


JET2 = _obj({"order": _IDX, "coeffs": {"type": "array", "items": _JET_TERM}})
SERIES1 = _obj({"coeffs": {"type": "array", "items": _PAIR, "minItems": 1},
                "normalized": {"type": "boolean"}}, required=["coeffs"])
WEIGHT = _obj({"c": {"type": "array", "items": _JET_TERM, "minItems": 1}, "order": _IDX})
FORM = _obj({"m": _IDX, "P": JET2, "rho": {"type": "number", "exclusiveMinimum": 0}})
HOLO = _obj({"b": SERIES1})
CUTOFF = _obj({"eta": JET2})

PAYLOADS = {
    "riemann": _obj({"weight": WEIGHT}),
    "limit-map": _obj({"weight": WEIGHT}),
    "residue": _obj({"form": FORM}),
    "pairing": _obj({"alpha": FORM, "beta": HOLO, "cutoff": CUTOFF}),
    "variation": _obj({"alpha": FORM, "beta": HOLO, "cutoff": CUTOFF, "phi": JET2}),
    "verify": _obj({"suite": {"enum": ["all", *SUITES]}}, required=[]),
}

_POS = {"type": "number", "exclusiveMinimum": 0}
OPTIONS = _obj({
    "order": {"type": "integer", "minimum": 1},
    "tol": _POS,
    "eps": {"oneOf": [_POS, {"type": "array", "items": _POS, "minItems": 1}]},
    "remainder": {"type": "integer", "minimum": 0},
    "out": {"type": "string"},
    "csv": {"type": "string"},
}, required=[])


def config_schema(kind):
    return _obj({"kind": {"const": kind}, "payload": PAYLOADS[kind], "options": OPTIONS},
                required=["kind", "payload"])


# -- helpers -----------------------------------------------------------------
def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _parse_eps(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ValidationError(f"--eps expects a comma-separated list of numbers: {exc}")
    if not vals or any(v <= 0 for v in vals):
        raise ValidationError("--eps values must be positive")
    return vals


def _load_config(path, kind):
    with open(path) as fh:
        text = fh.read()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}")
    try:
        jsonschema.Draft7Validator(config_schema(kind)).validate(cfg)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"config invalid at {where}: {exc.message}")
    return cfg


def _options(cfg, args):
    opts = dict(cfg.get("options", {}))
    for key in ("order", "tol", "out", "csv"):
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    if getattr(args, "eps", None) is not None:
        opts["eps"] = _parse_eps(args.eps)
    eps = opts.get("eps")
    if eps is not None and not isinstance(eps, list):
        opts["eps"] = [eps]
    return opts


def _build(kind, payload):
    """Turn a validated payload into library objects (semantic checks raise ValueError)."""
    if kind in ("riemann", "limit-map"):
        return {"weight": AnalyticWeight.from_json(payload["weight"])}
    if kind == "residue":
        return {"form": Form1D.from_json(payload["form"])}
    if kind in ("pairing", "variation"):
        out = {"alpha": Form1D.from_json(payload["alpha"]),
               "beta": HoloForm.from_json(payload["beta"]),
               "cutoff": CutoffSpec.from_json(payload["cutoff"])}
        if out["beta"].b.normalized:
            raise ValueError("beta numerator must be a plain series")
        if kind == "variation":
            phi = Jet2.from_json(payload["phi"])
            if not phi.is_hermitian():
                raise ValueError("phi must be real-valued")
            out["phi"] = Jet2(phi.coeffs, real=True)
        return out
    return {}


# -- commands ----------------------------------------------------------------
def cmd_riemann(obj, opts):
    mu = obj["weight"]
    sopts = SolveOptions(order=opts.get("order", 16), tol=opts.get("tol", 1e-12))
    cert = best_certificate(mu)
    eps_list = opts.get("eps") or [0.5 * cert.eps_radius]
    solves, warnings = [], []
    for e in eps_list:
        if e > cert.eps_radius / 2:
            msg = f"eps={e:g} exceeds half the certified radius {cert.eps_radius:g}"
            log.warning(msg)
            warnings.append(msg)
        sol = solve(mu, e, sopts)
        solves.append({"eps": e, "a": [_pair(v) for v in sol.a], "R": sol.R,
                       "delta": cert.delta, "theta": cert.theta, "iters": sol.iters,
                       "boundary_residual": boundary_residual(mu, e, sol)})
    report = {"certificate": {"R": cert.R, "delta": cert.delta, "theta": cert.theta,
                              "eps_radius": cert.eps_radius},
              "solves": solves, "limit_map": limit_map(mu).to_json(), "warnings": warnings}
    return report, None


def cmd_limit_map(obj, opts):
    return {"limit_map": limit_map(obj["weight"]).to_json()}, None


def cmd_residue(obj, opts):
    alpha = obj["form"]
    reduced, _ = pole_reduce(alpha)
    report = {"pole_order": alpha.m, "res_dolbeault": _pair(res_dolbeault(alpha)),
              "reduced_pole_order": reduced.m,
              "res_after_pole_reduce": _pair(res_dolbeault(reduced))}
    if alpha.m == 1 and not alpha.P.depends_on_zbar():
        report["res_classical"] = _pair(res_classical(alpha))
    return report, None


def _grid(opts):
    return tuple(opts["eps"]) if opts.get("eps") else pr.DEFAULT_GRID


def cmd_pairing(obj, opts):
    fit = pr.divergence_fit(obj["alpha"], obj["beta"], obj["cutoff"], _grid(opts),
                            opts.get("remainder", 2))
    return fit.to_json(), fit.csv_text()


def cmd_variation(obj, opts):
    v = pr.variation(obj["alpha"], obj["beta"], obj["cutoff"], obj["phi"], _grid(opts),
                     opts.get("remainder", 2))
    base, moved = v["fits"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "log_eps", "re_base", "im_base", "re_moved", "im_moved"])
    for e, a, b in zip(base.eps_grid, base.values, moved.values):
        w.writerow([repr(float(e)), repr(float(np.log(e))),
                    *(repr(float(x)) for x in (a.real, a.imag, b.real, b.imag))])
    report = {"measured": _pair(v["measured"]), "predicted": _pair(v["predicted"]),
              "base": base.to_json(), "moved": moved.to_json()}
    return report, buf.getvalue()


COMMANDS = {"riemann": cmd_riemann, "limit-map": cmd_limit_map, "residue": cmd_residue,
            "pairing": cmd_pairing, "variation": cmd_variation}


def _emit(report, csv_text, opts):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if csv_text is not None and opts.get("csv"):
        with open(opts["csv"], "w", newline="") as fh:
            fh.write(csv_text)
    if opts.get("out"):
        with open(opts["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# -- entry point -------------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog="riemres", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        s = sub.add_parser(kind)
        s.add_argument("--config", required=(kind != "verify"))
        s.add_argument("--out")
        if kind == "verify":
            s.add_argument("--suite", default=None, choices=["all", *SUITES])
            continue
        s.add_argument("--csv")
        s.add_argument("--order", type=int)
        s.add_argument("--tol", type=float)
        s.add_argument("--eps")
    return p


def _run(args):
    kind = args.kind
    cfg = _load_config(args.config, kind) if args.config else {"kind": kind, "payload": {}}
    opts = _options(cfg, args)
    if opts.get("order") is not None and opts["order"] < 1:
        raise ValidationError("--order must be >= 1")
    if opts.get("tol") is not None and opts["tol"] <= 0:
        raise ValidationError("--tol must be positive")
    if kind == "verify":
        suite = args.suite or cfg["payload"].get("suite", "all")
        ok, checks = run_suite(suite)
        report = {"kind": kind, "suite": suite, "passed": ok, "checks": checks,
                  "timestamp": _timestamp()}
        _emit(report, None, opts)
        return EXIT_OK if ok else EXIT_NUMERICAL
    try:
        obj = _build(kind, cfg["payload"])
        if kind in ("pairing", "variation"):
            pr._check_grid(_grid(opts))
    except (ValueError, RiemresError) as exc:
        raise ValidationError(str(exc))
    report, csv_text = COMMANDS[kind](obj, opts)
    report = {"kind": kind, **report, "timestamp": _timestamp()}
    _emit(report, csv_text, opts)
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except RiemresError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
