"""Command-line entry point.

Every subcommand prints one JSON document on standard output.  Exit codes:
0 on success, 1 for bad input or violated preconditions (with
``{"error": {"code", "message", "location"}}``), 2 when an internal
invariant fails.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._config import default_tol
from .algebra import element_from_json, state_eval
from .errors import GraphFormatError, GraphStarError, InvariantError, PreconditionError
from .graph import adjacency, classical_automorphisms, load_graph, structural_report
from .kms import kms_profile
from .magic import parse_unitary
from .nonlinear import nonlinear_coaction_demo
from .presentation import emit, emit_banica, emit_bichon, emit_wreath, parse_realization, verify_magic
from .symmetry import build_coactions, coincidence_verdict, state_equivariance_check, verify_equivariance

SIG_DIGITS = 12


class UsageError(GraphStarError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, location=self.prog)


def canonical(obj):
    """Round floats to 12 significant digits and turn arrays into lists."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, complex):
        return [canonical(obj.real), canonical(obj.imag)]
    return obj


def dumps(doc) -> str:
    return json.dumps(canonical(doc), sort_keys=True, ensure_ascii=False, indent=2)


def _read_json_arg(raw: str, flag: str):
    """Inline JSON, or the path of a JSON file."""
    text = raw
    if not raw.lstrip().startswith(("{", "[")):
        if not os.path.exists(raw):
            raise GraphFormatError(f"{flag} is neither inline JSON nor an existing file", location=flag)
        with open(raw, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON in {flag}: {exc.msg}", location=flag) from None


def _load(path: str):
    if not os.path.exists(path):
        raise GraphFormatError(f"graph file not found: {path}", location="--graph")
    return load_graph(path)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> dict:
    g = _load(args.graph)
    out = {
        "graph": g.to_dict(),
        "structural_report": structural_report(g).to_dict(),
        "adjacency": adjacency(g),
    }
    try:
        auts = classical_automorphisms(g)
        out["automorphisms"] = {"count": len(auts), "elements": [a.to_dict() for a in auts]}
    except GraphStarError as exc:
        out["automorphisms"] = {"count": None, "error": exc.to_dict()}
    try:
        out["coincidence"] = coincidence_verdict(g)
    except PreconditionError as exc:
        out["coincidence"] = {"verdict_withheld": True, "error": exc.to_dict()}
    return out


def cmd_kms(args) -> dict:
    g = _load(args.graph)
    prof = kms_profile(g)
    out = prof.to_dict()
    out["mu_by_vertex"] = out.pop("mu")
    out["mu"] = list(prof.mu_array) if prof.exists else None
    if args.monomial is not None:
        doc = _read_json_arg(args.monomial, "--monomial")
        docs = doc if isinstance(doc, list) else [doc]
        prof.require()
        evals = []
        for d in docs:
            x = element_from_json(g, d)
            evals.append({"element": x.to_dict(), "value": state_eval(x, prof)})
        out["evaluations"] = evals
    return out


def cmd_presentation(args) -> dict:
    g = _load(args.graph)
    return emit(g, args.flavor).to_dict()


def cmd_verify_magic(args) -> dict:
    g = _load(args.graph)
    doc = _read_json_arg(args.unitary, "--unitary")
    if isinstance(doc, dict):
        return {"wreath": verify_magic(parse_realization(doc), emit_wreath(g))}
    U = parse_unitary(doc)
    return {"banica": verify_magic(U, emit_banica(g)), "bichon": verify_magic(U, emit_bichon(g))}


def cmd_equivariance(args) -> dict:
    g = _load(args.graph)
    U = parse_unitary(_read_json_arg(args.unitary, "--unitary"))
    c = build_coactions(U, g)
    out = {"correspondence": verify_equivariance(c, g, m_max=args.depth)}
    prof = kms_profile(g)
    if not prof.exists:
        out["state"] = {"skipped": prof.reason}
    elif not out["correspondence"]["pass"]:
        out["state"] = {"skipped": "coaction fails the correspondence checks"}
    else:
        st = state_equivariance_check(c, prof, g, depth=args.depth)
        if not st["agree"]:
            raise InvariantError(f"tau and phi equivariance disagree: {st}")
        out["state"] = st
    return out


def cmd_demo_nonlinear(args) -> dict:
    if args.n < 1:
        raise PreconditionError("--n must be positive", location="--n")
    if not 0 <= args.depth <= 4:
        raise PreconditionError("--depth must be between 0 and 4", location="--depth")
    return nonlinear_coaction_demo(args.n, args.depth)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphstar", description="Graph correspondences, KMS states and quantum graph symmetries.")
    p.add_argument("--version", action="version", version=f"graphstar {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    a = sub.add_parser("analyze", help="structure, adjacency and automorphisms")
    a.add_argument("--graph", required=True)
    a.set_defaults(func=cmd_analyze)

    k = sub.add_parser("kms", help="Perron data and the KMS state at beta = ln rho")
    k.add_argument("--graph", required=True)
    k.add_argument("--monomial", help="element JSON (inline or path) to evaluate")
    k.set_defaults(func=cmd_kms)

    pr = sub.add_parser("presentation", help="emit a quantum automorphism presentation")
    pr.add_argument("--graph", required=True)
    pr.add_argument("--flavor", choices=["banica", "bichon", "wreath"], required=True)
    pr.set_defaults(func=cmd_presentation)

    vm = sub.add_parser("verify-magic", help="evaluate a matrix realization against a presentation")
    vm.add_argument("--graph", required=True)
    vm.add_argument("--unitary", required=True)
    vm.set_defaults(func=cmd_verify_magic)

    eq = sub.add_parser("equivariance", help="coactions induced by a magic unitary")
    eq.add_argument("--graph", required=True)
    eq.add_argument("--unitary", required=True)
    eq.add_argument("--depth", type=int, default=2)
    eq.set_defaults(func=cmd_equivariance)

    dn = sub.add_parser("demo-nonlinear", help="the non-linear torus action on O_n")
    dn.add_argument("--n", type=int, required=True)
    dn.add_argument("--depth", type=int, default=2)
    dn.set_defaults(func=cmd_demo_nonlinear)
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        tol = default_tol()
        doc = args.func(args)
        doc = {**doc, "command": args.command, "tolerance": tol}
        code = 0
    except GraphStarError as exc:
        doc, code = {"error": exc.to_dict()}, 1
    except InvariantError as exc:
        doc, code = {"error": {"code": "invariant_failure", "message": str(exc), "location": None}}, 2
    except ValueError as exc:
        # e.g. a bad GRAPHSTAR_TOL
        doc, code = {"error": {"code": "contract_violation", "message": str(exc), "location": None}}, 1
    except Exception as exc:  # anything else is a bug
        doc, code = {"error": {"code": "internal", "message": f"{type(exc).__name__}: {exc}", "location": None}}, 2
    print(dumps(doc), file=stdout)
    return code


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
