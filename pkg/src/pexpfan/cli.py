"""Batch command-line front end.

Reads fans and piecewise exponential functions from JSON files, runs one
computation per invocation, and writes a canonical JSON (or aligned text)
document to stdout.  Exit codes: 0 on success, 2 when a well-posed check
returns a mathematical negative (GKM violation, non-descendable function,
class outside a span, invalid fan under ``validate-fan``), 1 for structural
problems (missing files, malformed JSON, rank mismatches).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import errors
from .fan import Fan, SubdivisionMap, resolve
from .ktheory import chi, decompose, dual_basis_solve, gram_matrix, kronecker_pair
from .laurent import LaurentPoly, format_poly, poly_from_json, poly_to_json
from .pexp import (
    PiecewiseExponential,
    gkm_validate,
    descend,
    pexp_to_json,
)

MATH_NEGATIVES = (
    errors.MathNegative,
)
FAN_VALIDATION_ERRORS = (
    errors.NotAFan,
    errors.NotStronglyConvex,
    errors.NonPrimitiveRay,
)


class CliFailure(Exception):
    def __init__(self, code: int, doc: dict):
        self.code = code
        self.doc = doc
        super().__init__(doc.get("detail", "command failed"))


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliFailure(1, {"status": "error", "kind": "io", "detail": str(exc)})
    except json.JSONDecodeError as exc:
        raise CliFailure(
            1, {"status": "error", "kind": "json", "detail": f"{path}: {exc}"}
        )


def _load_fan(path: str) -> Fan:
    return Fan.from_json(_load_json(path))


def _resolve_fan_field(obj: dict, base_dir: str, fan: Fan | None) -> Fan:
    embedded = obj.get("fan")
    if isinstance(embedded, str):
        embedded = _load_json(os.path.join(base_dir, embedded))
    if embedded is not None:
        candidate = Fan.from_json(embedded)
        if fan is not None and candidate != fan:
            raise ValueError("embedded fan differs from the --fan argument")
        return candidate
    if fan is None:
        raise ValueError("no fan given: pass --fan or embed one in the file")
    return fan


def _load_values(obj: dict) -> list[LaurentPoly]:
    if "values" not in obj:
        raise ValueError("piecewise exponential JSON needs 'values'")
    return [poly_from_json(v) for v in obj["values"]]


def _load_pexp(path: str, fan: Fan | None) -> PiecewiseExponential:
    obj = _load_json(path)
    use_fan = _resolve_fan_field(obj, os.path.dirname(path), fan)
    values = _load_values(obj)
    report = gkm_validate(use_fan, values)
    if not report.ok:
        raise CliFailure(2, _violation_doc(report))
    return report.function


def _load_pexp_list(path: str, fan: Fan | None) -> list[PiecewiseExponential]:
    obj = _load_json(path)
    if not isinstance(obj, list):
        raise ValueError(f"{path}: expected a JSON array of functions")
    out = []
    for item in obj:
        use_fan = _resolve_fan_field(item, os.path.dirname(path), fan)
        report = gkm_validate(use_fan, _load_values(item))
        if not report.ok:
            raise CliFailure(2, _violation_doc(report))
        out.append(report.function)
    return out


def _parse_cone(fan: Fan, spec) -> tuple[int, ...]:
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, list):
        raise ValueError("a cone is a JSON array of generator coordinate arrays")
    return fan.rayset_from_vectors([tuple(v) for v in spec])


def _violation_doc(report) -> dict:
    return {
        "status": "violation",
        "kind": "gkm",
        "violations": [
            {
                "cone_a": v.cone_a,
                "cone_b": v.cone_b,
                "face": list(v.face),
                "restriction_a": poly_to_json(v.restriction_a),
                "restriction_b": poly_to_json(v.restriction_b),
            }
            for v in report.violations
        ],
    }


# -- command handlers -------------------------------------------------------


def _cmd_validate_fan(args) -> dict:
    try:
        fan = _load_fan(args.fan)
    except FAN_VALIDATION_ERRORS as exc:
        raise CliFailure(
            2,
            {"status": "invalid", "kind": type(exc).__name__, "detail": str(exc)},
        )
    return {"status": "ok", "result": fan.to_json()}


def _cmd_resolve(args) -> dict:
    fan = _load_fan(args.fan)
    rng = random.Random(args.seed) if args.seed is not None else None
    sub = resolve(fan, rng=rng, extra_rounds=args.extra_rounds)
    return {"status": "ok", "result": sub.to_json()}


def _cmd_gkm_check(args) -> dict:
    fan = _load_fan(args.fan) if args.fan else None
    obj = _load_json(args.pexp)
    use_fan = _resolve_fan_field(obj, os.path.dirname(args.pexp), fan)
    report = gkm_validate(use_fan, _load_values(obj))
    if not report.ok:
        raise CliFailure(2, _violation_doc(report))
    return {"status": "ok", "result": pexp_to_json(report.function)}


def _cmd_restrict(args) -> dict:
    fan = _load_fan(args.fan)
    f = _load_pexp(args.pexp, fan)
    rayset = _parse_cone(fan, args.cone)
    value = f.restrict(rayset)
    return {"status": "ok", "result": poly_to_json(value), "_poly": value}


def _cmd_chi(args) -> dict:
    fan = _load_fan(args.fan)
    f = _load_pexp(args.pexp, fan)
    value = chi(fan, f, epsilon=args.epsilon)
    return {"status": "ok", "result": poly_to_json(value), "_poly": value}


def _cmd_pair(args) -> dict:
    fan = _load_fan(args.fan)
    f = _load_pexp(args.pexp, fan)
    rayset = _parse_cone(fan, args.cone)
    value = kronecker_pair(fan, f, rayset, epsilon=args.epsilon)
    return {"status": "ok", "result": poly_to_json(value), "_poly": value}


def _cmd_gram(args) -> dict:
    fan = _load_fan(args.fan)
    fns = _load_pexp_list(args.functions, fan)
    cone_specs = _load_json(args.cones)
    raysets = [_parse_cone(fan, c) for c in cone_specs]
    matrix = gram_matrix(fan, fns, raysets, epsilon=args.epsilon)
    return {"status": "ok", "result": matrix.to_json(), "_matrix": matrix}


def _cmd_decompose(args) -> dict:
    fan = _load_fan(args.fan)
    f = _load_pexp(args.pexp, fan)
    basis = _load_pexp_list(args.basis, fan)
    try:
        coeffs = decompose(f, basis)
    except (errors.NotInSpan, errors.NotIntegral, errors.DependentBasis) as exc:
        raise CliFailure(
            2, {"status": "negative", "kind": type(exc).__name__, "detail": str(exc)}
        )
    return {
        "status": "ok",
        "result": {"coefficients": [poly_to_json(c) for c in coeffs]},
        "_polys": list(coeffs),
    }


def _cmd_dual_basis(args) -> dict:
    fan = _load_fan(args.fan)
    spanning = _load_pexp_list(args.spanning, fan)
    cone_specs = _load_json(args.cones)
    raysets = [_parse_cone(fan, c) for c in cone_specs]
    try:
        duals = dual_basis_solve(fan, raysets, spanning, epsilon=args.epsilon)
    except (errors.SingularGram, errors.NotIntegral) as exc:
        raise CliFailure(
            2, {"status": "negative", "kind": type(exc).__name__, "detail": str(exc)}
        )
    return {
        "status": "ok",
        "result": {"functions": [pexp_to_json(g) for g in duals]},
    }


def _cmd_descend(args) -> dict:
    sub = SubdivisionMap.from_json(_load_json(args.map))
    f = _load_pexp(args.pexp, sub.fine)
    try:
        g = descend(f, sub)
    except errors.NotDescendable as exc:
        raise CliFailure(
            2,
            {
                "status": "negative",
                "kind": "NotDescendable",
                "coarse_cone": exc.coarse_index,
                "value_a": poly_to_json(exc.value_a),
                "value_b": poly_to_json(exc.value_b),
            },
        )
    return {"status": "ok", "result": pexp_to_json(g)}


def _render(doc: dict, fmt: str) -> str:
    if fmt == "text":
        if "_poly" in doc:
            return format_poly(doc["_poly"]) + "\n"
        if "_polys" in doc:
            return "\n".join(format_poly(p) for p in doc["_polys"]) + "\n"
        if "_matrix" in doc:
            m = doc["_matrix"]
            lines = ["\t" + "\t".join(m.col_labels)]
            for label, row in zip(m.row_labels, m.entries):
                lines.append(label + "\t" + "\t".join(format_poly(x) for x in row))
            return "\n".join(lines) + "\n"
    clean = {k: v for k, v in doc.items() if not k.startswith("_")}
    return json.dumps(clean, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pexpfan",
        description="exact computations with piecewise exponential functions on fans",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("-o", "--output", help="write the result document to a file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **arguments):
        p = sub.add_parser(name, parents=[common])
        for flag, opts in arguments.items():
            p.add_argument(flag, **opts)
        p.set_defaults(handler=handler)
        return p

    add("validate-fan", _cmd_validate_fan, **{"--fan": {"required": True}})
    p = add(
        "resolve",
        _cmd_resolve,
        **{"--fan": {"required": True}},
    )
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--extra-rounds", type=int, default=0)
    add(
        "gkm-check",
        _cmd_gkm_check,
        **{"--fan": {"required": False}, "--pexp": {"required": True}},
    )
    add(
        "restrict",
        _cmd_restrict,
        **{"--fan": {"required": True}, "--pexp": {"required": True}, "--cone": {"required": True}},
    )
    for name, handler in (("chi", _cmd_chi),):
        p = add(name, handler, **{"--fan": {"required": True}, "--pexp": {"required": True}})
        p.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    p = add(
        "pair",
        _cmd_pair,
        **{"--fan": {"required": True}, "--pexp": {"required": True}, "--cone": {"required": True}},
    )
    p.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    p = add(
        "gram",
        _cmd_gram,
        **{"--fan": {"required": True}, "--functions": {"required": True}, "--cones": {"required": True}},
    )
    p.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    add(
        "decompose",
        _cmd_decompose,
        **{"--fan": {"required": True}, "--pexp": {"required": True}, "--basis": {"required": True}},
    )
    p = add(
        "dual-basis",
        _cmd_dual_basis,
        **{"--fan": {"required": True}, "--spanning": {"required": True}, "--cones": {"required": True}},
    )
    p.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    add(
        "descend",
        _cmd_descend,
        **{"--map": {"required": True}, "--pexp": {"required": True}},
    )
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.handler(args)
        code = 0
    except CliFailure as exc:
        doc, code = exc.doc, exc.code
    except MATH_NEGATIVES as exc:
        doc, code = (
            {"status": "negative", "kind": type(exc).__name__, "detail": str(exc)},
            2,
        )
    except (errors.StructuralError, ValueError) as exc:
        doc, code = (
            {"status": "error", "kind": type(exc).__name__, "detail": str(exc)},
            1,
        )
    text = _render(doc, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
