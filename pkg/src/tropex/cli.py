"""Command-line interface.

Usage::

    tropex <command> <input.json> [--vertex NAME] [--at FRACTIONS]
           [--all-vertices] [--format json|text] [--output PATH]

Exit status is 0 for every completed analysis, negative verdicts included,
1 for input errors and 2 for structural inconsistencies found while
analysing a valid-looking input.
"""

from __future__ import annotations

import argparse
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import report
from .analysis import bundle_criterion, check_stratum_flatness, cut_and_paste, fibre_fan
from .complex import search_limit
from .divisor import MixingCollection, mixing_collection
from .document import InputDocument, build_sigma, build_tau, build_upsilon, load_expansion, parse_input
from .errors import FanError, InputError, StructuralError, TropexError, ValidationFailure
from .expansion import TropicalExpansion, VertexData, build_expansion, canonical_point, slice_expansion
from .git import fibrewise_git

COMMANDS = (
    "validate",
    "slice",
    "vertices",
    "fibre-fan",
    "bundle-criterion",
    "flatness",
    "cut-and-paste",
    "mixing",
    "git",
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STRUCTURAL = 2

_FRACTION = re.compile(r"^\s*[+-]?\d+(\s*/\s*[1-9]\d*)?\s*$")


def parse_fractions(text: str) -> list[Fraction]:
    """Parse a comma-separated list of exact rationals such as ``"3/2,1"``."""
    if not text.strip():
        return []
    out = []
    for i, part in enumerate(text.split(",")):
        if not _FRACTION.match(part):
            raise InputError(f"--at[{i}]: {part.strip()!r} is not an integer or fraction p/q")
        out.append(Fraction(part.replace(" ", "")))
    return out


# ---------------------------------------------------------------------------
# Per-vertex commands
# ---------------------------------------------------------------------------

def _mixing(exp: TropicalExpansion, v: VertexData, limit: Optional[int]):
    verdict = bundle_criterion(exp, v, limit)
    basis = [exp.sigma.ray_names[r] for r in sorted(exp.sigma.cone_keys[v.sigma_v])]
    if not verdict.is_bundle:
        reason = verdict.obstruction if verdict.status == "inconclusive" else "not a toric variety bundle"
        return MixingCollection(v.name, basis, {}, {}, {}, False, reason), verdict
    return mixing_collection(exp, v, verdict.witness), verdict


def _cmd_fibre_fan(exp, v, limit):
    return report.fibre_fan_payload(exp, fibre_fan(exp, v))


def _cmd_bundle(exp, v, limit):
    return report.bundle_payload(exp, bundle_criterion(exp, v, limit))


def _cmd_flatness(exp, v, limit):
    return report.flatness_payload(exp, check_stratum_flatness(exp, v))


def _cmd_cut_and_paste(exp, v, limit):
    return report.cut_and_paste_payload(exp, cut_and_paste(exp, v))


def _cmd_mixing(exp, v, limit):
    mix, verdict = _mixing(exp, v, limit)
    return report.mixing_payload(mix, verdict)


def _cmd_git(exp, v, limit):
    mix, verdict = _mixing(exp, v, limit)
    if not mix.computable:
        return {"computable": False, "reason": mix.reason, "bundle_status": verdict.status}
    data = fibrewise_git(mix, fibre_fan(exp, v).fan)
    out = report.git_payload(data)
    out["computable"] = True
    out["mixing"] = report.mixing_payload(mix)["rendered"]
    return out


PER_VERTEX: dict[str, Callable[[TropicalExpansion, VertexData, Optional[int]], dict]] = {
    "fibre-fan": _cmd_fibre_fan,
    "bundle-criterion": _cmd_bundle,
    "flatness": _cmd_flatness,
    "cut-and-paste": _cmd_cut_and_paste,
    "mixing": _cmd_mixing,
    "git": _cmd_git,
}


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def _validate(doc: InputDocument) -> dict:
    sigma = build_sigma(doc)
    tau, names = build_tau(doc)
    try:
        upsilon = build_upsilon(doc)
    except FanError as exc:
        return report.invalid_payload([("fan", None, str(exc))])
    try:
        exp = build_expansion(sigma, tau, upsilon, names, doc.divisors)
    except ValidationFailure as exc:
        return report.invalid_payload(exc.issues)
    return report.validate_payload(exp)


def run_command(cmd: str, doc: InputDocument, vertex: Optional[str] = None, at: Optional[Sequence] = None,
                all_vertices: bool = False, limit: Optional[int] = None) -> dict:
    """Run one command on a parsed document and return the report payload.

    Raises:
        InputError: for unknown commands, unknown vertices and invalid input.
        StructuralError: when the analysis finds an internal inconsistency.
    """
    if cmd not in COMMANDS:
        raise InputError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    if cmd == "validate":
        return report.envelope(cmd, doc.source, _validate(doc))
    exp = load_expansion(doc)
    if cmd == "vertices":
        body = {"vertices": [report.vertex_payload(exp, v) for v in exp.vertices]}
        return report.envelope(cmd, doc.source, body)
    if cmd == "slice":
        f = list(at) if at is not None else list(canonical_point(exp.tau, frozenset(range(len(exp.tau.rays)))))
        return report.envelope(cmd, doc.source, report.slice_payload(exp, slice_expansion(exp, f)))
    limit = search_limit() if limit is None else limit
    fn = PER_VERTEX[cmd]
    if all_vertices:
        with ThreadPoolExecutor() as pool:
            bodies = list(pool.map(lambda v: {"vertex": v.name, **fn(exp, v, limit)}, exp.vertices))
        return report.envelope(cmd, doc.source, {"vertices": bodies})
    if vertex is None:
        raise InputError(f"{cmd} needs --vertex NAME or --all-vertices")
    v = exp.vertex(vertex)
    return report.envelope(cmd, doc.source, {"vertex": v.name, **fn(exp, v, limit)})


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors count as input errors (status 1)."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropex", description="Analyse tropical expansions of toroidal embeddings.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", help="input document (JSON, schema 1)")
    p.add_argument("--vertex", help="vertex name (v0, v1, ...) or the ray names of ω_v")
    p.add_argument("--at", help="slice point as comma-separated fractions, e.g. 3/2,1")
    p.add_argument("--all-vertices", action="store_true", help="run a per-vertex command on every vertex")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output", help="write the report here instead of standard output")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.at is not None and args.command != "slice":
            raise InputError("--at only applies to the slice command")
        if args.vertex is not None and args.all_vertices:
            raise InputError("--vertex and --all-vertices are mutually exclusive")
        at = parse_fractions(args.at) if args.at is not None else None
        doc = parse_input(args.input)
        rep = run_command(args.command, doc, vertex=args.vertex, at=at, all_vertices=args.all_vertices)
    except InputError as exc:
        print(f"tropex: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (StructuralError, TropexError) as exc:
        print(f"tropex: structural error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    text = report.render_json(rep) if args.format == "json" else report.render_text(rep)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"tropex: input error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
