"""Command-line experiment runner.

Each subcommand reads a JSON config, runs the library and writes either a
self-contained JSON report or CSV extracts to ``--out``.

Exit codes: 0 success, 2 invalid config, 3 hypothesis or precondition
violated, 4 I/O failure, 5 a requested check failed.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from .errors import ConfigError, HypothesisViolation, PreconditionError
from .multidim import (MultiIndexSeq, approx_eigen_residual_multi, joint_exclusion_test,
                       joint_region_separable, outside_certificate_multi,
                       predicted_sigma_multiplier_multi)
from .operators import OperatorSpec
from .spaces import FiniteSeq, SpaceSpec
from .spectra import (OUTSIDE, predicted_sigma_multiplier, predicted_sigma_shift,
                      predicted_sigma_toeplitz, predicted_sigma_unilateral, region_contains)
from .verify import (BLOWUP_WITNESS, INCONCLUSIVE, INSIDE_WITNESS, OUTSIDE_BOUND,
                     approx_eigen_residual, blowup_witness, neumann_outside_certificate,
                     outside_certificate, toeplitz_outside_certificate, verify_point)
from .weights import Domain, WeightFamily, boundedness, shift_norm, spectral_radius_shift

EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_IO, EXIT_CHECK = 0, 2, 3, 4, 5
TASKS = ("radius", "predict", "verify", "joint", "conjecture-gap")

# ---------------------------------------------------------------------------
# config schema

_COMPLEX = {"oneOf": [{"type": "number"},
                      {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_WEIGHT = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["constant", "geometric", "two_sided_exp", "polynomial",
                          "piecewise_super_exp", "table"]},
        "a": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number"},
        "s": {"type": "number"},
        "entries": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 1},
        "offset": {"type": "integer"},
        "tail": {"enum": ["constant", "geometric"]},
        "tail_ratio": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_SPACE = {
    "type": "object",
    "required": ["weight"],
    "properties": {
        "domain": {"enum": ["bilateral", "unilateral"]},
        "weight": _WEIGHT,
        "p": {"type": "number", "minimum": 1},
    },
    "additionalProperties": False,
}
_SEQ = {
    "type": "object",
    "properties": {
        "offset": {"type": "integer"},
        "coeffs": {"type": "array", "items": _COMPLEX},
        "terms": {"type": "object", "patternProperties": {"^-?[0-9]+$": _COMPLEX},
                  "additionalProperties": False},
    },
    "additionalProperties": False,
}
_MULTI_SEQ = {
    "type": "object",
    "required": ["entries"],
    "properties": {
        "entries": {"type": "array", "items": {
            "type": "array", "minItems": 2, "maxItems": 2,
            "prefixItems": [{"type": "array", "items": {"type": "integer"}}, _COMPLEX]}},
    },
    "additionalProperties": False,
}
_GRID = {
    "type": "object",
    "properties": {
        "re": {"type": "array", "minItems": 3, "maxItems": 3},
        "im": {"type": "array", "minItems": 3, "maxItems": 3},
    },
    "required": ["re", "im"],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "task": {"enum": list(TASKS)},
        "space": _SPACE,
        "spaces": {"type": "array", "items": _SPACE, "minItems": 2, "maxItems": 3},
        "operator": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["multiplier", "toeplitz", "shift"]},
                "phi": _SEQ,
                "k": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "phi": _MULTI_SEQ,
        "lambdas": {"type": "array", "items": _COMPLEX},
        "lambda_grid": _GRID,
        "points": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
        "expect": {"type": "array", "items": {"enum": [INSIDE_WITNESS, BLOWUP_WITNESS,
                                                       OUTSIDE_BOUND, INCONCLUSIVE,
                                                       "excluded", "unknown"]}},
        "Ns": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "N": {"type": "integer", "minimum": 1},
        "grids": {"type": "object", "properties": {
            "radial": {"type": "integer", "minimum": 1},
            "angular": {"type": "integer", "minimum": 16}}, "additionalProperties": False},
        "horizon": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 64},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "samples": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}


def validate_config(cfg: dict, task: str) -> dict:
    """Schema check plus the cross-field requirements of ``task``."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from None
    if cfg.get("task", task) != task:
        raise ConfigError(f"config is for task {cfg['task']!r}, not {task!r}")
    need = {"radius": ["space"], "predict": ["space", "operator"],
            "verify": ["space", "operator"], "joint": ["spaces", "phi"],
            "conjecture-gap": ["space", "operator"]}[task]
    missing = [k for k in need if k not in cfg]
    if missing:
        raise ConfigError(f"task {task!r} needs {', '.join(missing)}")
    if task == "verify" and "lambdas" not in cfg:
        raise ConfigError("task 'verify' needs lambdas")
    if task == "conjecture-gap" and not ("lambdas" in cfg or "lambda_grid" in cfg):
        raise ConfigError("task 'conjecture-gap' needs lambdas or lambda_grid")
    if "expect" in cfg:
        n = len(cfg.get("lambdas", [])) + len(cfg.get("points", []))
        if len(cfg["expect"]) != n:
            raise ConfigError("expect must list one verdict per lambda / point")
    return cfg


# ---------------------------------------------------------------------------
# config parsing

def parse_complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def parse_space(d: dict) -> SpaceSpec:
    dom = Domain(d.get("domain", "bilateral"))
    try:
        w = WeightFamily.from_dict({**d["weight"], "domain": dom.value})
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad weight description: {exc}") from None
    return SpaceSpec.lp(w, d.get("p", 2.0), dom)


def parse_seq(d: dict) -> FiniteSeq:
    if "terms" in d:
        return FiniteSeq.from_mapping({int(k): parse_complex(v) for k, v in d["terms"].items()})
    return FiniteSeq(d.get("offset", 0), [parse_complex(v) for v in d.get("coeffs", [])])


def parse_multi(d: dict) -> MultiIndexSeq:
    mapping = {}
    for n, v in d["entries"]:
        mapping[tuple(n)] = mapping.get(tuple(n), 0) + parse_complex(v)
    return MultiIndexSeq.from_mapping(mapping)


def parse_operator(d: dict, space: SpaceSpec) -> OperatorSpec:
    kind = d["kind"]
    if kind == "shift":
        if "k" not in d:
            raise ConfigError("shift operator needs k")
        return OperatorSpec.shift(d["k"], space)
    if "phi" not in d:
        raise ConfigError(f"{kind} operator needs phi")
    return OperatorSpec(kind, space, parse_seq(d["phi"]))


def lambda_list(cfg: dict) -> list:
    if "lambdas" in cfg:
        return [parse_complex(v) for v in cfg["lambdas"]]
    g = cfg["lambda_grid"]
    re = np.linspace(g["re"][0], g["re"][1], int(g["re"][2]))
    im = np.linspace(g["im"][0], g["im"][1], int(g["im"][2]))
    return [complex(a, b) for b in im for a in re]


# ---------------------------------------------------------------------------
# JSON helpers

def _ext(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def to_jsonable(obj):
    """Plain-JSON form: complex as [re, im], infinities as strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _ext(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_ext(float(obj.real)), _ext(float(obj.imag))]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# tasks; each returns (results, csv_tables, failures)

def _bracket(br) -> list:
    return [br.lower, br.upper]


def run_radius(cfg: dict, seed: int, workers: int):
    space = parse_space(cfg["space"])
    horizon = cfg.get("horizon", 64)
    res = {}
    rows = []
    for d in ("forward", "backward"):
        br = spectral_radius_shift(space, d, horizon)
        bd = boundedness(space, d)
        res[d] = {"radius": _bracket(br), "exact": br.exact, "bounded": bd.bounded,
                  "norm": shift_norm(space, 1 if d == "forward" else -1)}
        rows.append([d, br.lower, br.upper])
    if space.domain is Domain.BILATERAL:
        res["region"] = predicted_sigma_shift(space, horizon).to_dict()
    else:
        res["region"] = {d: predicted_sigma_unilateral(space, d, horizon).to_dict()
                         for d in ("forward", "backward")}
    return res, {"radius.csv": (["direction", "lower", "upper"], rows)}, []


def _grids(cfg: dict):
    g = cfg.get("grids", {})
    return g.get("radial", 65), g.get("angular", 1024)


def _prediction(op: OperatorSpec, radial: int, angular: int):
    space = op.space
    if op.kind == "multiplier" or (op.kind == "shift" and not op.unilateral):
        return predicted_sigma_multiplier(op.phi, space, radial, angular)
    phi = op.phi
    if phi.lo >= 0:
        return predicted_sigma_toeplitz(phi, space, "S", radial, angular)
    if phi.hi <= 0:
        return predicted_sigma_toeplitz(phi, space, "S-1", radial, angular)
    raise PreconditionError("a two-sided Toeplitz symbol commutes with neither shift")


def _cloud_summary(pts: np.ndarray) -> dict:
    a = np.abs(pts)
    return {"size": int(pts.size), "min_modulus": float(a.min()), "max_modulus": float(a.max()),
            "re_range": [float(pts.real.min()), float(pts.real.max())],
            "im_range": [float(pts.imag.min()), float(pts.imag.max())]}


def _cloud_rows(pts: np.ndarray) -> list:
    return [[float(p.real), float(p.imag)] for p in pts]


def run_predict(cfg: dict, seed: int, workers: int):
    space = parse_space(cfg["space"])
    op = parse_operator(cfg["operator"], space)
    radial, angular = _grids(cfg)
    img = _prediction(op, radial, angular)
    res = {"region": img.to_dict(), "cloud": _cloud_summary(img.points), "pitch": img.pitch}
    return res, {"cloud.csv": (["re", "im"], _cloud_rows(img.points))}, []


def _verify_one(args):
    op, lam, Ns, tol, m, horizon = args
    return verify_point(op, lam, Ns, tol, m, horizon)


def _pmap(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def run_verify(cfg: dict, seed: int, workers: int):
    space = parse_space(cfg["space"])
    op = parse_operator(cfg["operator"], space)
    lams = lambda_list(cfg)
    Ns = tuple(cfg.get("Ns", [20, 30, 40, 50, 60]))
    jobs = [(op, lam, Ns, cfg.get("tol", 1e-2), cfg.get("m", 256), cfg.get("horizon", 64))
            for lam in lams]
    certs = _pmap(_verify_one, jobs, workers)
    tables, failures, results = {}, [], []
    expect = cfg.get("expect")
    for i, (lam, c) in enumerate(zip(lams, certs)):
        results.append({"lambda": lam, **c.to_dict()})
        if "growth" in c.evidence:
            tables[f"growth_{i}.csv"] = (["N", "value"], c.evidence["growth"])
        if "residuals" in c.evidence:
            tables[f"residuals_{i}.csv"] = (["N", "value"],
                                            [[n, v] for n, v in sorted(c.evidence["residuals"].items())])
        if expect is not None and c.verdict != expect[i]:
            failures.append(f"lambda {lam}: expected {expect[i]}, got {c.verdict}")
        elif expect is None and c.verdict == INCONCLUSIVE:
            failures.append(f"lambda {lam}: inconclusive ({c.reason})")
    return {"certificates": results}, tables, failures


def run_joint(cfg: dict, seed: int, workers: int):
    spaces = [parse_space(s) for s in cfg["spaces"]]
    phi = parse_multi(cfg["phi"])
    region = joint_region_separable(spaces)
    g = cfg.get("grids", {})
    cloud = predicted_sigma_multiplier_multi(phi, spaces, g.get("angular", 256), g.get("radial", 9))
    res = {"region": region.to_dict(), "cloud": _cloud_summary(cloud.points),
           "pitch": cloud.metadata["pitch"]}
    expect = list(cfg.get("expect", []))
    failures = []
    certs = []
    for lam in [parse_complex(v) for v in cfg.get("lambdas", [])]:
        c = outside_certificate_multi(phi, lam, spaces, cfg.get("m", 512))
        certs.append({"lambda": lam, **c.to_dict()})
    res["certificates"] = certs
    excl = []
    for z in cfg.get("points", []):
        zz = [parse_complex(v) for v in z]
        e = joint_exclusion_test(zz, spaces, seed=seed)
        excl.append({"z": zz, "verdict": e.verdict,
                     "witness": e.witness.to_dict() if e.witness is not None else None,
                     "value": e.value, "bound": e.bound})
    res["exclusions"] = excl
    if cfg.get("samples"):
        N = cfg.get("N", 60)
        pts = region.sample(cfg["samples"], seed)
        res["residuals"] = [{"z": list(p), "N": N,
                             "residual": approx_eigen_residual_multi(phi, p, spaces, N)}
                            for p in pts]
    verdicts = [c["verdict"] for c in certs] + [e["verdict"] for e in excl]
    for i, (want, got) in enumerate(zip(expect, verdicts)):
        if want != got:
            failures.append(f"item {i}: expected {want}, got {got}")
    return res, {"cloud.csv": (["re", "im"], _cloud_rows(cloud.points))}, failures


def _gap_one(args):
    phi, lam, space, side = args
    return toeplitz_outside_certificate(phi, lam, space, side)


def run_conjecture_gap(cfg: dict, seed: int, workers: int):
    """Compare the inclusion-only Toeplitz prediction with outside certificates.

    Each lambda is classified as predicted (near the sampled image),
    certified outside, both (a contradiction) or neither (the uncertified
    band where the prediction might be incomplete).
    """
    space = parse_space(cfg["space"])
    op = parse_operator(cfg["operator"], space)
    if not op.unilateral:
        raise PreconditionError("conjecture-gap runs on a unilateral space")
    radial, angular = _grids(cfg)
    img = _prediction(op, radial, angular)
    side = img.metadata["side"]
    tol = max(cfg.get("tol", 0.0), img.pitch)
    lams = lambda_list(cfg)
    certs = _pmap(_gap_one, [(op.phi, lam, space, side) for lam in lams], workers)
    rows, counts, failures = [], {"predicted": 0, "certified": 0, "both": 0, "gap": 0}, []
    for lam, c in zip(lams, certs):
        inside = region_contains(img, lam, tol) != OUTSIDE
        cls = {(True, True): "both", (True, False): "predicted",
               (False, True): "certified", (False, False): "gap"}[(inside, c.outside)]
        counts[cls] += 1
        rows.append([lam.real, lam.imag, cls])
        if cls == "both":
            failures.append(f"lambda {lam} is predicted in the spectrum yet certified outside")
    res = {"region": img.to_dict(), "tolerance": tol, "counts": counts,
           "gap": [[r[0], r[1]] for r in rows if r[2] == "gap"]}
    return res, {"gap.csv": (["re", "im", "class"], rows)}, failures


RUNNERS = {"radius": run_radius, "predict": run_predict, "verify": run_verify,
           "joint": run_joint, "conjecture-gap": run_conjecture_gap}


# ---------------------------------------------------------------------------
# selftest

def selftest_checks() -> list:
    """Quick closed-form checks across the modules: ``[(name, passed, detail)]``."""
    out = []
    bil = SpaceSpec.lp(WeightFamily.constant())
    uni = SpaceSpec.lp(WeightFamily.constant(Domain.UNILATERAL))
    tse = SpaceSpec.lp(WeightFamily.two_sided_exp(1.0))

    br = spectral_radius_shift(SpaceSpec.lp(WeightFamily.geometric(2.0)), "forward")
    out.append(("geometric radius", abs(br.upper - 2.0) <= 1e-12, br.upper))
    reg = predicted_sigma_shift(tse)
    ok = abs(reg.rmin - math.exp(-1)) <= 1e-9 and abs(reg.rmax - math.e) <= 1e-9
    out.append(("two-sided exponential annulus", ok, [reg.rmin, reg.rmax]))
    phi = FiniteSeq.from_mapping({1: 1.0, -1: 1.0})
    c = outside_certificate(phi, 3.0, bil)
    out.append(("Laurent outside certificate", c.outside, c.evidence.get("B")))
    c = neumann_outside_certificate(OperatorSpec.shift(1, uni), 1.5)
    out.append(("Neumann outside certificate", c.outside and c.evidence["B"] <= 2.001,
                c.evidence.get("B")))
    g = blowup_witness(OperatorSpec.shift(1, uni), 0.5, [20, 30, 40])
    out.append(("section blow-up", g.monotone and min(g.step_factors()) > 1.9, list(g.norms)))
    r = approx_eigen_residual(OperatorSpec.multiplier(phi, bil), np.exp(1j * math.pi / 3), 200)
    out.append(("approximate eigenvector", r <= 0.2, r))
    return out


# ---------------------------------------------------------------------------
# output

def _write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def emit(report: dict, tables: dict, out_dir: str, fmt: str) -> list:
    """Write the report (json) or its CSV extracts; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt == "json":
        path = os.path.join(out_dir, "report.json")
        with open(path, "w", newline="\n") as fh:
            fh.write(dumps(report))
        written.append(path)
    else:
        for name in sorted(tables):
            header, rows = tables[name]
            path = os.path.join(out_dir, name)
            _write_csv(path, header, rows)
            written.append(path)
    return written


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shiftspec",
                                description="Spectra of weighted shifts, multipliers and Toeplitz operators.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in TASKS + ("selftest",):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name != "selftest", help="JSON experiment config")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None)
    return p


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    if args.command == "selftest":
        checks = selftest_checks()
        for name, ok, _ in checks:
            print(f"{'PASS' if ok else 'FAIL'} {name}")
        report = {"task": "selftest", "version": __version__,
                  "results": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks]}
        failures = [n for n, ok, _ in checks if not ok]
        tables = {"selftest.csv": (["name", "passed"], [[n, int(ok)] for n, ok, _ in checks])}
    else:
        try:
            cfg = validate_config(_load_config(args.config), args.command)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        try:
            results, tables, failures = RUNNERS[args.command](cfg, seed, args.workers)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (HypothesisViolation, PreconditionError) as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_HYPOTHESIS
        echo = copy.deepcopy(cfg)
        echo.setdefault("task", args.command)
        echo["seed"] = seed
        report = {"task": args.command, "config": echo, "results": results,
                  "failures": failures, "version": __version__}
    report["timing"] = {"seconds": time.perf_counter() - t0}
    try:
        emit(report, tables, args.out, args.format)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    for f in failures:
        print(f"check failed: {f}", file=sys.stderr)
    return EXIT_CHECK if failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
