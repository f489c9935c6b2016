"""Command line entry point.

    henselab verify --scenario s.json [--out r.json] [--seed N] [--prec-max N]
    henselab witness [--scenario s.json] ...
    henselab axioms [--basis NAME | --scenario s.json] ...
    henselab report-diff a.json b.json

Exit codes: 0 when every verdict passes, 1 on any failing verdict (or a
report difference), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import List, Optional

import jsonschema

from .errors import HenselabError
from .report import Report
from .scenarios import run
from .series import precision_cap, registry_scope

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class ScenarioError(ValueError):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("henselab.schemas").joinpath(name).read_text(encoding="utf-8"))


def _field_path(err: jsonschema.ValidationError) -> str:
    if err.validator == "required":
        missing = err.message.split("'")[1] if "'" in err.message else "?"
        return ".".join([*map(str, err.absolute_path), missing])
    if err.validator == "additionalProperties":
        return err.message
    return ".".join(map(str, err.absolute_path)) or "<root>"


def validate_scenario(sc) -> dict:
    validator = jsonschema.Draft202012Validator(load_schema("scenario.schema.json"))
    errors = sorted(validator.iter_errors(sc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ScenarioError(f"scenario field '{_field_path(err)}': {err.message}")
    return sc


def read_scenario(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            sc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
    return validate_scenario(sc)


def execute(sc: dict, seed: Optional[int] = None, prec_max: Optional[int] = None) -> Report:
    """Run a validated scenario in a fresh generator registry (deterministic output)."""
    sc = dict(sc)
    if seed is not None:
        sc["seed"] = seed
    cap = prec_max if prec_max is not None else sc.get("precision_cap")
    with registry_scope():
        if cap is not None:
            with precision_cap(cap):
                report = run(sc)
                report.precision_cap = cap
        else:
            report = run(sc)
    return report


def run_scenario(path: str, out: Optional[str] = None, seed: Optional[int] = None,
                 prec_max: Optional[int] = None, kinds=None) -> int:
    try:
        sc = read_scenario(path)
        if kinds and sc["kind"] not in kinds:
            raise ScenarioError(f"scenario field 'kind': {sc['kind']!r} not accepted here (use one of {sorted(kinds)})")
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return _emit(sc, out, seed, prec_max)


def _emit(sc: dict, out, seed, prec_max) -> int:
    try:
        report = execute(sc, seed, prec_max)
    except HenselabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = report.to_json()
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report.to_dict()["summary"]
    print(f"{report.scenario}: {s['pass']} pass, {s['fail']} fail, {s['outside-domain']} outside-domain",
          file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def report_diff(a: str, b: str) -> int:
    try:
        with open(a, encoding="utf-8") as fa, open(b, encoding="utf-8") as fb:
            ta, tb = fa.read(), fb.read()
        ra, rb = json.loads(ta), json.loads(tb)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if ta == tb:
        print("identical")
        return EXIT_OK
    va, vb = ra.get("verdicts", []), rb.get("verdicts", [])
    for i, (x, y) in enumerate(zip(va, vb)):
        if x != y:
            print(f"verdict {i} differs: {x.get('check')} {x.get('status')} vs {y.get('check')} {y.get('status')}")
            return EXIT_FAIL
    if len(va) != len(vb):
        print(f"verdict counts differ: {len(va)} vs {len(vb)}")
    else:
        for key in ("scenario", "summary", "environment"):
            if ra.get(key) != rb.get(key):
                print(f"field '{key}' differs")
                break
        else:
            print("reports differ in formatting only")
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="henselab", description="Exact checks for derivation-refined field topologies.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario_required):
        sp.add_argument("--scenario", required=scenario_required, metavar="PATH")
        sp.add_argument("--out", metavar="PATH", help="write the JSON report here (default stdout)")
        sp.add_argument("--seed", type=int, metavar="N", help="override the scenario seed")
        sp.add_argument("--prec-max", type=int, metavar="N", help="series precision cap")

    common(sub.add_parser("verify", help="run any scenario file"), True)
    common(sub.add_parser("witness", help="witness, incomparable and boundedness scenarios"), False)
    ax = sub.add_parser("axioms", help="neighborhood-basis axiom checklist")
    common(ax, False)
    ax.add_argument("--basis", default="t-adic-balls")
    ax.add_argument("--samples", type=int, default=20)
    rd = sub.add_parser("report-diff", help="compare two reports byte for byte")
    rd.add_argument("a")
    rd.add_argument("b")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report-diff":
        return report_diff(args.a, args.b)
    if args.prec_max is not None and args.prec_max < 16:
        print("error: --prec-max must be at least 16", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "verify":
        return run_scenario(args.scenario, args.out, args.seed, args.prec_max)
    if args.command == "witness":
        if args.scenario:
            return run_scenario(args.scenario, args.out, args.seed, args.prec_max,
                                {"witness", "incomparable", "boundedness"})
        return _emit({"kind": "witness", "name": "witness"}, args.out, args.seed, args.prec_max)
    if args.scenario:
        return run_scenario(args.scenario, args.out, args.seed, args.prec_max, {"axioms"})
    try:
        sc = validate_scenario({"kind": "axioms", "basis": args.basis, "samples": args.samples,
                                "name": f"axioms {args.basis}"})
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return _emit(sc, args.out, args.seed, args.prec_max)


if __name__ == "__main__":
    sys.exit(main())
