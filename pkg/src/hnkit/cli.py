"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 quadrature
or extrapolation did not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance, catalog, conditions, symmetry
from .core import (DomainError, NoConvergence, NotConverged, PreconditionError, classify)
from .measures import MEASURE_SCHEMA, QuadratureSpec, measure_from_json
from .representation import (DATA_SCHEMA, FunctionOracle, RepresentationData, evaluate_many,
                             oracle_from_data, recover_a, recover_b, recover_c)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_NOCONV = 0, 1, 2, 3

log = logging.getLogger("hnkit")


class InputError(Exception):
    pass


def _pair(c) -> list:
    return [float(np.real(c)), float(np.imag(c))]


def _load_json(text: str):
    """Inline JSON or a path to a JSON file."""
    path = Path(text)
    try:
        if path.is_file():
            return json.loads(path.read_text())
        return json.loads(text)
    except (json.JSONDecodeError, OSError) as exc:
        raise InputError(f"cannot read JSON from {text!r}: {exc}") from exc


def _validate(obj, schema, what):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{what} does not match its schema: {exc.message}") from exc


def load_data(text: str) -> RepresentationData:
    """Data JSON, a catalog dump entry (with a ``data`` key) or a catalog name."""
    if text in {e.name for e in catalog.entries()}:
        return catalog.get(text).data
    obj = _load_json(text)
    if isinstance(obj, dict) and "data" in obj:
        obj = obj["data"]
    _validate(obj, DATA_SCHEMA, "data")
    try:
        return RepresentationData.from_json(obj)
    except DomainError as exc:
        raise InputError(str(exc)) from exc


def load_measure(text: str):
    obj = _load_json(text)
    if isinstance(obj, dict) and "data" in obj:
        obj = obj["data"]
    if isinstance(obj, dict) and "mu" in obj:
        obj = obj["mu"]
    _validate(obj, MEASURE_SCHEMA, "measure")
    try:
        return measure_from_json(obj)
    except DomainError as exc:
        raise InputError(str(exc)) from exc


_BARE_I = re.compile(r"(?<![\d.eE])([ij])")


def _complex(token) -> complex:
    if isinstance(token, (list, tuple)) and len(token) == 2:
        return complex(float(token[0]), float(token[1]))
    if isinstance(token, (int, float)):
        return complex(token)
    s = str(token).replace(" ", "")
    s = _BARE_I.sub(r"1\1", s).replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {token!r}") from exc


def _is_pair(x) -> bool:
    return isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x)


def parse_points(text: str, n: int) -> np.ndarray:
    """Points as JSON (``[[re, im], ...]`` per point) or as ``[i, 1+2i, ...]``.

    Several points are separated by ``;`` or given as a JSON list of points.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        rows = [r.strip().strip("[]") for r in text.strip().strip("[]").split(";") if r.strip()]
        obj = [[c for c in r.split(",") if c.strip()] for r in rows]
    if not isinstance(obj, list) or not obj:
        raise InputError(f"cannot parse points from {text!r}")
    if not isinstance(obj[0], list) or (len(obj) == n and all(map(_is_pair, obj))):
        # one point: flat coordinates, or n pairs [re, im] (real points are invalid anyway)
        obj = [obj]
    pts = []
    for row in obj:
        if not isinstance(row, list):
            raise InputError(f"cannot parse point {row!r}")
        pts.append([_complex(c) for c in row])
    Z = np.array(pts, dtype=complex)
    if Z.ndim != 2 or Z.shape[1] != n:
        raise InputError(f"points must have {n} coordinates, got shape {Z.shape}")
    if np.any(Z.imag == 0):
        raise InputError("points must be off the real axis")
    return Z


def _spec(args) -> QuadratureSpec:
    kw = {"rel_tol": args.rel_tol, "abs_tol": args.abs_tol}
    if args.max_panels is not None:
        kw["max_panels"] = args.max_panels
    return QuadratureSpec(**kw)


def _emit(args, report: dict, rows=None, header=None):
    """Write the report as JSON, or ``rows`` as CSV when requested."""
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_evaluate(args) -> int:
    if not args.data:
        raise InputError("evaluate needs --data")
    data = load_data(args.data)
    if not args.at:
        raise InputError("evaluate needs --at")
    Z = parse_points(args.at, data.n)
    ev = evaluate_many(data, Z, _spec(args))
    report = {"verb": "evaluate", "n": data.n,
              "points": [[_pair(c) for c in z] for z in Z],
              "values": [_pair(v) for v in ev.values],
              "error_estimates": [float(e) for e in ev.errors],
              "converged": ev.converged}
    header = [f"{p} z{j}" for j in range(1, data.n + 1) for p in ("re", "im")] + ["re q", "im q"]
    rows = [[x for c in z for x in _pair(c)] + _pair(v) for z, v in zip(Z, ev.values)]
    _emit(args, report, rows, header)
    return EXIT_PASS


def cmd_verify(args) -> int:
    src = args.inp or args.data
    if not src:
        raise InputError("verify-measure needs --in")
    mu = load_measure(src)
    rep = conditions.full_admissibility(mu, _spec(args), args.degree_cutoff, args.samples, args.seed)
    report = {"verb": "verify-measure", "n": mu.dim, **rep.as_dict()}
    if mu.dim >= 2:
        report["structural"] = conditions.structural_checks(mu, _spec(args)).as_dict()
    rows = [[r.form, json.dumps(w["witness"]), w["residual"],
             w["error_estimate"], w["passed"]] for r in rep.reports for w in r.witnesses]
    _emit(args, report, rows, ["form", "witness", "residual", "error_estimate", "passed"])
    if not rep.verdict:
        for r in rep.reports:
            if not r.verdict:
                worst = max(r.witnesses, key=lambda w: w["residual"])
                print(f"{r.form}: fails at {worst['witness']} with residual {worst['residual']:.6g}",
                      file=sys.stderr)
    return EXIT_PASS if rep.verdict else EXIT_FAIL


def _oracle(args):
    if args.name:
        try:
            e = catalog.get(args.name)
        except KeyError as exc:
            raise InputError(str(exc)) from exc
        return FunctionOracle(e.closed_form, e.n), e
    if args.data:
        data = load_data(args.data)
        return oracle_from_data(data, _spec(args)), None
    raise InputError("recover needs --name or --data")


def cmd_recover(args) -> int:
    q, entry = _oracle(args)
    a = recover_a(q)
    bs = [recover_b(q, j) for j in range(1, q.n + 1)]
    cs = [recover_c(q, j) for j in range(1, q.n + 1)]
    report = {"verb": "recover", "n": q.n, "a": a,
              "b": [r.value for r in bs], "c": [r.value for r in cs],
              "warnings": [w for r in bs + cs for w in r.warnings]}
    ok = True
    if entry is not None and entry.known:
        err = max([abs(a - entry.known["a"])]
                  + [abs(r.value - k) for r, k in zip(bs, entry.known["b"])]
                  + [abs(r.value - k) for r, k in zip(cs, entry.known.get("c", []))])
        report["known"] = entry.known
        report["max_error"] = err
        ok = err <= 1e-4
        report["verdict"] = "pass" if ok else "fail"
    rows = [["a", "", a]] + [["b", j, r.value] for j, r in enumerate(bs, 1)] \
        + [["c", j, r.value] for j, r in enumerate(cs, 1)]
    _emit(args, report, rows, ["quantity", "coordinate", "value"])
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_symmetry(args) -> int:
    if not args.data:
        raise InputError("symmetry needs --data")
    data = load_data(args.data)
    if not args.at:
        raise InputError("symmetry needs --at")
    Z = parse_points(args.at, data.n)
    spec = _spec(args)
    direct = evaluate_many(data, Z, spec).values
    sym = symmetry.symmetric_values_q(data, Z, spec)
    diff = np.abs(sym - direct)
    points = []
    ok = True
    for z, d, s, r in zip(Z, direct, sym, diff):
        entry = {"point": [_pair(c) for c in z], "classification": classify(z).as_dict(),
                 "direct": _pair(d), "symmetric": _pair(s), "difference": float(r)}
        ok &= r <= args.tolerance
        cls = classify(z)
        if (cls.c_minus.k or cls.i_minus.k) and cls.c_plus.k:
            ind = symmetry.check_cplus_independence(data, z, spec=spec)
            entry["independence"] = ind.as_dict()
        points.append(entry)
    report = {"verb": "symmetry", "n": data.n, "tolerance": args.tolerance, "points": points,
              "verdict": "pass" if ok else "fail"}
    rows = [[x for c in z for x in _pair(c)] + _pair(d) + _pair(s) + [float(r)]
            for z, d, s, r in zip(Z, direct, sym, diff)]
    header = [f"{p} z{j}" for j in range(1, data.n + 1) for p in ("re", "im")] \
        + ["re direct", "im direct", "re symmetric", "im symmetric", "difference"]
    _emit(args, report, rows, header)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_catalog(args) -> int:
    entries = catalog.entries()
    if args.name:
        try:
            entries = [catalog.get(args.name)]
        except KeyError as exc:
            raise InputError(str(exc)) from exc
    if args.dump:
        report = entries[0].to_json() if args.name else {"entries": [e.to_json() for e in entries]}
    else:
        report = {"entries": [{"name": e.name, "n": e.n, "admissible": e.admissible,
                               "notes": e.notes} for e in entries]}
    rows = [[e.name, e.n, e.admissible, e.notes] for e in entries]
    _emit(args, report, rows, ["name", "n", "admissible", "notes"])
    return EXIT_PASS


def cmd_selftest(args) -> int:
    numbers = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    echo = (lambda line: print(line, file=sys.stderr, flush=True)) if args.out or args.format == "csv" \
        else (lambda line: print(line, flush=True))
    results = acceptance.run_all(numbers, args.seed, echo=echo)
    passed = all(r.passed for r in results)
    report = {"verb": "selftest", "results": [r.as_dict() for r in results],
              "passed": sum(r.passed for r in results), "total": len(results),
              "verdict": "pass" if passed else "fail"}
    if args.out or args.format == "csv":
        rows = [[r.number, r.title, "pass" if r.passed else "fail", round(r.seconds, 3)]
                for r in results]
        _emit(args, report, rows, ["criterion", "title", "verdict", "seconds"])
    else:
        print(f"{report['passed']}/{report['total']} criteria passed")
    return EXIT_PASS if passed else EXIT_FAIL


VERBS = {"evaluate": cmd_evaluate, "verify-measure": cmd_verify, "recover": cmd_recover,
         "symmetry": cmd_symmetry, "catalog": cmd_catalog, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hnkit", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--in", dest="inp", help="measure or data JSON (path or inline)")
    p.add_argument("--data", help="data JSON (path or inline) or a catalog name")
    p.add_argument("--name", help="catalog entry name")
    p.add_argument("--at", help="points, e.g. '[i,i,i]' or '[1+2i,-i]; [i,i]'")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--max-panels", type=int, default=None)
    p.add_argument("--degree-cutoff", type=int, default=conditions.DEFAULT_DEGREE)
    p.add_argument("--samples", type=int, default=conditions.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=conditions.DEFAULT_SEED)
    p.add_argument("--tolerance", type=float, default=1e-5,
                   help="symmetry: allowed gap between formula and direct value")
    p.add_argument("--dump", action="store_true", help="catalog: emit data JSON")
    p.add_argument("--criteria", help="selftest: comma-separated criterion numbers")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return VERBS[args.verb](args)
    except (InputError, DomainError, PreconditionError, jsonschema.SchemaError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotConverged, NoConvergence) as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
