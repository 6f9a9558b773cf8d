"""Reading and checking input documents.

An input document is a JSON object::

    {
      "schema": 1,
      "sigma":   {"rank": 2, "rays": {"l1": [1, 0], "l2": [0, 1]},
                  "cones": [["l1", "l2"]], "divisors": {"l1": "D1", "l2": "D2"}},
      "tau":     {"rank": 1, "rays": {"e": [1]}},
      "upsilon": {"rays": {...}, "cones": [["l1", "e"], {"rays": [...], "lattice": [[...]]}]},
      "options": {}
    }

``upsilon`` may be omitted, meaning the trivial expansion Σ x τ.  Errors name
the offending field with a JSON path such as ``$.sigma.rays.l1[0]``.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, TextIO, Union

from .complex import Cone, ConeComplex, build_fan
from .errors import ConeError, FanError, InputError
from .expansion import TropicalExpansion, build_expansion
from .lattice import IntMatrix

SCHEMA_VERSION = 1


@dataclass
class ComplexSpec:
    rank: int
    rays: dict[str, tuple[int, ...]]
    cones: list[list[str]]
    lattices: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)


@dataclass
class InputDocument:
    sigma: ComplexSpec
    tau: ComplexSpec
    upsilon: Optional[ComplexSpec]
    divisors: dict[str, str] = field(default_factory=dict)
    options: dict[str, Any] = field(default_factory=dict)
    name: str = ""
    description: str = ""
    source: str = "<input>"


def _fail(path: str, msg: str) -> InputError:
    return InputError(f"{path}: {msg}")


def _kind(x: Any) -> str:
    if isinstance(x, bool):
        return "boolean"
    if isinstance(x, int):
        return "integer"
    if isinstance(x, float):
        return "number"
    if isinstance(x, str):
        return f"string {x!r}"
    if isinstance(x, list):
        return "array"
    if isinstance(x, dict):
        return "object"
    return "null" if x is None else type(x).__name__


def _int(x: Any, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise _fail(path, f"expected an integer, got {_kind(x)}")
    return x


def _obj(x: Any, path: str) -> dict:
    if not isinstance(x, dict):
        raise _fail(path, f"expected an object, got {_kind(x)}")
    return x


def _list(x: Any, path: str) -> list:
    if not isinstance(x, list):
        raise _fail(path, f"expected an array, got {_kind(x)}")
    return x


def _vector(x: Any, path: str, n: int) -> tuple[int, ...]:
    vals = _list(x, path)
    if len(vals) != n:
        raise _fail(path, f"expected {n} coordinates, got {len(vals)}")
    return tuple(_int(v, f"{path}[{i}]") for i, v in enumerate(vals))


def _check_keys(d: dict, allowed: set[str], path: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise _fail(path, f"unknown field(s) {', '.join(extra)}")


def _complex(x: Any, path: str, rank: Optional[int], need_cones: bool = True) -> ComplexSpec:
    d = _obj(x, path)
    _check_keys(d, {"rank", "rays", "cones", "divisors", "description"}, path)
    if "rank" in d:
        r = _int(d["rank"], f"{path}.rank")
        if r < 0:
            raise _fail(f"{path}.rank", "rank must be non-negative")
        if rank is not None and r != rank:
            raise _fail(f"{path}.rank", f"rank {r} does not match the expected rank {rank}")
        rank = r
    if rank is None:
        raise _fail(path, "missing field rank")
    rays_raw = _obj(d.get("rays", {}), f"{path}.rays")
    rays = {}
    for name, vec in rays_raw.items():
        if not name:
            raise _fail(f"{path}.rays", "ray names must be non-empty")
        rays[name] = _vector(vec, f"{path}.rays.{name}", rank)
    cones: list[list[str]] = []
    lattices: dict[int, list[tuple[int, ...]]] = {}
    if need_cones:
        for i, c in enumerate(_list(d.get("cones", []), f"{path}.cones")):
            cpath = f"{path}.cones[{i}]"
            if isinstance(c, dict):
                _check_keys(c, {"rays", "lattice"}, cpath)
                names = _list(c.get("rays"), f"{cpath}.rays")
                if "lattice" in c:
                    lat = _list(c["lattice"], f"{cpath}.lattice")
                    lattices[i] = [_vector(v, f"{cpath}.lattice[{j}]", rank) for j, v in enumerate(lat)]
                npath = f"{cpath}.rays"
            else:
                names = _list(c, cpath)
                npath = cpath
            out = []
            for j, nm in enumerate(names):
                if not isinstance(nm, str):
                    raise _fail(f"{npath}[{j}]", f"expected a ray name, got {_kind(nm)}")
                if nm not in rays:
                    raise _fail(f"{npath}[{j}]", f"unknown ray {nm!r}")
                if nm in out:
                    raise _fail(f"{npath}[{j}]", f"ray {nm!r} listed twice")
                out.append(nm)
            cones.append(out)
    return ComplexSpec(rank, rays, cones, lattices)


def parse_document(data: Any, source: str = "<input>") -> InputDocument:
    """Check a decoded JSON value and turn it into an :class:`InputDocument`."""
    d = _obj(data, "$")
    _check_keys(d, {"schema", "name", "description", "sigma", "tau", "upsilon", "options"}, "$")
    if "schema" not in d:
        raise _fail("$", "missing field schema")
    if _int(d["schema"], "$.schema") != SCHEMA_VERSION:
        raise _fail("$.schema", f"unsupported schema version {d['schema']} (expected {SCHEMA_VERSION})")
    for key in ("sigma", "tau"):
        if key not in d:
            raise _fail("$", f"missing field {key}")
    sigma = _complex(d["sigma"], "$.sigma", None)
    divisors = {}
    if "divisors" in d["sigma"]:
        dv = _obj(d["sigma"]["divisors"], "$.sigma.divisors")
        for k, v in dv.items():
            if k not in sigma.rays:
                raise _fail(f"$.sigma.divisors.{k}", f"unknown ray {k!r}")
            if not isinstance(v, str) or not v:
                raise _fail(f"$.sigma.divisors.{k}", f"expected a symbol name, got {_kind(v)}")
            divisors[k] = v
        if len(set(divisors.values())) != len(divisors):
            raise _fail("$.sigma.divisors", "divisor symbols must be distinct")
    tau = _complex(d["tau"], "$.tau", None, need_cones=False)
    if "cones" in d["tau"]:
        raise _fail("$.tau.cones", "τ is a single cone; list only its rays")
    upsilon = None
    if d.get("upsilon") is not None:
        upsilon = _complex(d["upsilon"], "$.upsilon", sigma.rank + tau.rank)
    options = _obj(d.get("options", {}), "$.options")
    name = d.get("name", "")
    if not isinstance(name, str):
        raise _fail("$.name", f"expected a string, got {_kind(name)}")
    desc = d.get("description", "")
    if not isinstance(desc, str):
        raise _fail("$.description", f"expected a string, got {_kind(desc)}")
    return InputDocument(sigma, tau, upsilon, divisors, dict(options), name, desc, source)


def parse_input(src: Union[str, Path, TextIO]) -> InputDocument:
    """Read and check an input document from a path or an open stream."""
    if isinstance(src, (str, Path)):
        path = str(src)
        try:
            text = Path(src).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise InputError(f"{path}: no such file") from None
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
    else:
        path = getattr(src, "name", "<stream>")
        text = src.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_document(data, path)


def parse_string(text: str) -> InputDocument:
    return parse_input(io.StringIO(text))


# ---------------------------------------------------------------------------
# From documents to objects
# ---------------------------------------------------------------------------

def _fan(spec: ComplexSpec, path: str) -> ConeComplex:
    lat = {}
    for i, cols in spec.lattices.items():
        lat[i] = IntMatrix.from_columns(cols, spec.rank)
    try:
        return build_fan(spec.rank, spec.rays, spec.cones, lattices=lat)
    except (ConeError, FanError) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def build_sigma(doc: InputDocument) -> ConeComplex:
    return _fan(doc.sigma, "$.sigma")


def build_tau(doc: InputDocument) -> tuple[Cone, list[str]]:
    names = list(doc.tau.rays)
    try:
        tau = Cone([doc.tau.rays[n] for n in names], doc.tau.rank)
    except ConeError as exc:
        raise ConeError(f"$.tau: {exc}") from None
    if tau.dim != tau.n:
        raise InputError(f"$.tau: τ must be full-dimensional (dimension {tau.dim}, rank {tau.n})")
    return tau, names


def build_upsilon(doc: InputDocument) -> Optional[ConeComplex]:
    if doc.upsilon is None:
        return None
    return _fan(doc.upsilon, "$.upsilon")


def load_expansion(doc: InputDocument) -> TropicalExpansion:
    """Build and validate the expansion described by a document."""
    sigma = build_sigma(doc)
    tau, names = build_tau(doc)
    upsilon = build_upsilon(doc)
    return build_expansion(sigma, tau, upsilon, names, doc.divisors)
