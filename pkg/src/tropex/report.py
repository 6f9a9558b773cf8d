"""Turning analysis results into report payloads and rendering them.

Payloads are plain JSON values (dicts, lists, strings, integers, booleans
and ``None``).  Rationals are written as exact fraction strings so that the
JSON round-trips without loss.  Rendering is deterministic: JSON output uses
sorted keys and a fixed indentation, and text output walks the same payload.
"""

from __future__ import annotations

import json
from pathlib import PurePath
from fractions import Fraction
from typing import Any, Optional, Sequence

from .analysis import (
    BundleVerdict,
    FibreFan,
    FlatnessResult,
    StratumDecomposition,
)
from .complex import ConeComplex
from .divisor import MixingCollection, format_sum
from .expansion import PolyhedralSlice, TropicalExpansion, VertexData
from .git import FibrewiseGITData
from .lattice import IntMatrix

SCHEMA_VERSION = 1


def frac(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix(M: IntMatrix) -> list[list[int]]:
    return [list(r) for r in M.rows]


def complex_payload(cx: ConeComplex) -> dict:
    """Rays with names and the maximal cones as lists of ray names."""
    return {
        "rank": cx.rank,
        "rays": [{"name": n, "vector": list(r)} for n, r in zip(cx.ray_names, cx.rays)],
        "maximal_cones": [cx.cone_names(c) for c in cx.maximal_cones()],
        "cone_count": len(cx),
    }


def vertex_payload(exp: TropicalExpansion, v: VertexData) -> dict:
    ups, sig = exp.upsilon, exp.sigma
    return {
        "name": v.name,
        "omega": ups.cone_label(v.omega_v),
        "generators": [list(g) for g in v.generators],
        "sigma_v": sig.cone_label(v.sigma_v),
        "phi_v": matrix(v.phi_v),
        "identification": matrix(v.identification),
    }


def validate_payload(exp: TropicalExpansion) -> dict:
    return {
        "valid": True,
        "issues": [],
        "support_surjective": exp.support_surjective,
        "counts": {"sigma": len(exp.sigma), "upsilon": len(exp.upsilon)},
        "vertices": [v.name for v in exp.vertices],
        "vertex_table": [vertex_payload(exp, v) for v in exp.vertices],
    }


def invalid_payload(issues: Sequence[tuple[str, Any, str]]) -> dict:
    return {
        "valid": False,
        "issues": [{"kind": k, "detail": d} for k, _, d in issues],
    }


def slice_payload(exp: TropicalExpansion, sl: PolyhedralSlice) -> dict:
    ups, sig = exp.upsilon, exp.sigma
    return {
        "f": [frac(x) for x in sl.f],
        "kappa": [exp.tau_names[i] for i in sorted(sl.kappa)],
        "vertices": [
            {"index": i, "point": [frac(x) for x in p], "cone": ups.cone_label(w)}
            for i, (p, w) in enumerate(zip(sl.vertices, sl.vertex_cones))
        ],
        "polyhedra": [
            {
                "cone": ups.cone_label(p.omega),
                "dim": p.dim,
                "vertices": list(p.vertices),
                "rays": [list(r) for r in p.rays],
                "sigma_P": sig.cone_label(p.sigma_P),
            }
            for p in sl.polyhedra
        ],
        "edges": [
            {
                "cone": ups.cone_label(e.omega),
                "tail": e.tail,
                "head": e.head,
                "slope": list(e.slope),
                "sigma_E": sig.cone_label(e.sigma_E),
            }
            for e in sl.edges
        ],
    }


def fibre_fan_payload(exp: TropicalExpansion, phi: FibreFan) -> dict:
    ups = exp.upsilon
    fan = phi.fan
    prov = phi.ray_provenance()
    out = complex_payload(fan)
    for i, r in enumerate(out["rays"]):
        r["source"] = ups.cone_label(prov[i])
    out["psi_v"] = [ups.cone_label(w) for w in phi.psi_v]
    out["is_smooth"] = fan.is_smooth()
    return out


def bundle_payload(exp: TropicalExpansion, verdict: BundleVerdict) -> dict:
    out: dict[str, Any] = {
        "is_bundle": verdict.is_bundle if verdict.status != "inconclusive" else None,
        "status": verdict.status,
        "verdict": {
            "bundle": "toric variety bundle",
            "not_bundle": "not a toric variety bundle",
            "inconclusive": "inconclusive budget exhausted",
        }[verdict.status],
        "obstruction": verdict.obstruction,
        "search_nodes": verdict.nodes,
        "witness": None,
        "witness_verified": verdict.verified,
    }
    s = verdict.setup
    if s is not None:
        out["counts"] = {"star_quotient": len(s.star_quotient), "product": len(s.product)}
    if verdict.witness is not None and s is not None:
        A, B = s.star_quotient, s.product
        w = verdict.witness
        out["witness"] = {
            "rays": [{"from": A.ray_names[a], "to": B.ray_names[b]} for a, b in sorted(w.ray_map.items())],
            "cones": [
                {"from": A.cone_label(a), "to": B.cone_label(b), "matrix": matrix(w.linear_maps[a])}
                for a, b in sorted(w.cone_bijection.items())
            ],
        }
    return out


def flatness_payload(exp: TropicalExpansion, res: FlatnessResult) -> dict:
    return {
        "flat": res.flat,
        "offenders": [{"cone": o.label, "image_rays": [list(r) for r in o.image_rays]} for o in res.offenders],
    }


def cut_and_paste_payload(exp: TropicalExpansion, dec: StratumDecomposition) -> dict:
    ups = exp.upsilon
    return {
        "strata": [
            {
                "sigma": r.label,
                "cones": [ups.cone_label(w) for w in r.cones],
                "components": [
                    {
                        "minimal_cone": ups.cone_label(c.omega0),
                        "cones": [ups.cone_label(w) for w in c.cones],
                        "fan": complex_payload(c.fan),
                    }
                    for c in r.components
                ],
            }
            for r in dec.records
        ],
        "torus_rank": exp.sigma.dim(dec.vertex.sigma_v),
    }


def mixing_payload(mix: MixingCollection, verdict: Optional[BundleVerdict] = None) -> dict:
    out: dict[str, Any] = {
        "computable": mix.computable,
        "reason": mix.reason,
        "basis": [f"m_{b}" for b in mix.basis],
    }
    if verdict is not None:
        out["bundle_status"] = verdict.status
    if not mix.computable:
        return out
    out["values"] = {f"m_{b}": dict(sorted(mix.values[b].items())) for b in mix.basis}
    out["rendered"] = {f"m_{b}": format_sum(mix.values[b]) for b in mix.basis}
    out["correction"] = {f"m_{b}": format_sum(mix.difference[b]) for b in mix.basis}
    out["summary"] = [f"L(m_{b}) = {format_sum(mix.values[b])}" for b in mix.basis]
    out["standard"] = mix.is_standard()
    out["restrictions"] = {
        f"m_{b}": {
            "horizontal": dict(sorted(e.horizontal.items())),
            "basal": dict(sorted(e.basal.items())),
            "rendered": e.render(),
        }
        for b, e in sorted(mix.restrictions.items())
    }
    return out


def git_payload(data: FibrewiseGITData) -> dict:
    cox = data.cox
    out = {
        "rays": list(cox.fan.ray_names),
        "lift_order": data.ray_order,
        "divisor_map": matrix(cox.divisor_map),
        "class_group": {"free_rank": cox.class_rank, "torsion": list(cox.torsion)},
        "projection_to_class": matrix(cox.projection_to_class),
        "group": cox.group,
        "primitive_collections": data.unstable.names,
        "lift": {k: dict(sorted(v.items())) for k, v in data.K.items()},
        "summands": data.summands,
        "restriction_verified": data.restriction_verified,
        "theta": data.theta,
        "obstruction": data.obstruction,
    }
    if data.summands:
        out["projective_bundle"] = "P(" + " + ".join(data.summands) + ")"
    return out


def envelope(command: str, source: str, body: dict) -> dict:
    out = {"schema": SCHEMA_VERSION, "command": command, "input": PurePath(source).name}
    out.update(body)
    return out


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _scalar(x: Any) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, list):
        return "[" + ", ".join(_scalar(y) for y in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_scalar(v)}" for k, v in sorted(x.items())) + "}"
    return str(x)


def _is_flat(x: Any) -> bool:
    if isinstance(x, list):
        return all(_is_flat(y) and not isinstance(y, dict) for y in x)
    if isinstance(x, dict):
        return len(x) <= 4 and all(not isinstance(y, (dict, list)) or (isinstance(y, list) and _is_flat(y))
                                   for y in x.values())
    return True


def _text(x: Any, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(x, dict):
        keys = sorted(x)
        width = max((len(k) for k in keys), default=0)
        for k in keys:
            v = x[k]
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{pad}{k}:")
                _text(v, indent + 1, lines)
            else:
                lines.append(f"{pad}{k.ljust(width)}  {_scalar(v)}")
    elif isinstance(x, list):
        for item in x:
            if isinstance(item, dict) and not _is_flat(item):
                lines.append(f"{pad}-")
                _text(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(x)}")


def render_text(report: dict) -> str:
    lines: list[str] = []
    _text(report, 0, lines)
    return "\n".join(lines) + "\n"
