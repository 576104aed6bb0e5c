"""JSON file formats (schema tag "spencer-lab/1") and report assembly.

Rationals travel as strings "p/q" (or plain integers / integer strings on
input). Matrices in connection files are either nested row lists or flat
row-major lists.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from .exactla import Matrix, rational_str, to_rational
from .relconn import ConstantRelativeConnection
from .tableau import Tableau, Tower

SCHEMA_TAG = "spencer-lab/1"

_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+(/0*[1-9]\d*)?\s*$"},
    ]
}
_VECTOR = {"type": "array", "items": _RATIONAL}
_MATRIX = {"oneOf": [_VECTOR, {"type": "array", "items": _VECTOR}]}
_POSINT = {"type": "integer", "minimum": 1}
_NATINT = {"type": "integer", "minimum": 0}

TABLEAU_SCHEMA = {
    "type": "object",
    "required": ["schema", "n", "m", "k", "generators"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "kind": {"const": "tableau"},
        "n": _POSINT, "m": _POSINT, "k": _POSINT,
        "generators": {"type": "array", "items": _VECTOR},
        "description": {"type": "string"},
    },
    "additionalProperties": False,
}

TOWER_SCHEMA = {
    "type": "object",
    "required": ["schema", "kind", "n", "m", "k", "levels"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "kind": {"const": "tower"},
        "n": _POSINT, "m": _POSINT, "k": _POSINT,
        "levels": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _VECTOR}},
        "description": {"type": "string"},
    },
    "additionalProperties": False,
}

CONNECTION_SCHEMA = {
    "type": "object",
    "required": ["schema", "n", "F_rank", "E_rank", "l", "C"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "kind": {"const": "connection"},
        "n": _POSINT, "F_rank": _POSINT, "E_rank": _NATINT,
        "l": _MATRIX,
        "C": {"type": "array", "items": _MATRIX},
        "description": {"type": "string"},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema", "version", "request", "results"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "version": {"type": "string"},
        "request": {"type": "object"},
        "results": {"type": "array"},
    },
}


class SchemaError(ValueError):
    """Input does not match the file schema; ``location`` is a JSON path."""

    def __init__(self, message: str, location: str = "$"):
        self.location = location
        self.message = message
        super().__init__(f"{location}: {message}")


def _validate(doc: Any, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        loc = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise SchemaError(err.message, loc)


def _matrix(value, nrows: int, ncols: int, where: str) -> Matrix:
    if value and isinstance(value[0], list):
        if len(value) != nrows or any(len(r) != ncols for r in value):
            raise SchemaError(f"expected a {nrows}x{ncols} matrix", where)
        return Matrix.from_rows(value, ncols)
    if len(value) != nrows * ncols:
        raise SchemaError(f"expected {nrows * ncols} entries (row-major {nrows}x{ncols})", where)
    return Matrix.from_flat(nrows, ncols, value)


def _vectors(rows, length: int, where: str) -> list[list[Fraction]]:
    out = []
    for i, r in enumerate(rows):
        if len(r) != length:
            raise SchemaError(f"expected a vector of length {length}", f"{where}[{i}]")
        out.append([to_rational(x) for x in r])
    return out


def _rats(v) -> list[str]:
    return [rational_str(Fraction(x)) for x in v]


# ---------------------------------------------------------------------------
# documents


def detect_kind(doc: dict) -> str:
    if isinstance(doc, dict):
        if doc.get("kind") in ("tableau", "tower", "connection"):
            return doc["kind"]
        if "F_rank" in doc or "l" in doc:
            return "connection"
        if "levels" in doc:
            return "tower"
    return "tableau"


def tableau_from_doc(doc: dict) -> Tableau:
    _validate(doc, TABLEAU_SCHEMA)
    from .multilinear import GradedSlot, slot_dim
    size = slot_dim(GradedSlot(doc["n"], doc["m"], 0, doc["k"]))
    gens = _vectors(doc["generators"], size, "$.generators")
    return Tableau.from_generators(doc["n"], doc["m"], doc["k"], gens)


def tableau_to_doc(t: Tableau) -> dict:
    return {"schema": SCHEMA_TAG, "n": t.n, "m": t.m, "k": t.k,
            "generators": [_rats(v) for v in t.space.vectors()]}


def tower_from_doc(doc: dict) -> Tower:
    _validate(doc, TOWER_SCHEMA)
    from .multilinear import GradedSlot, slot_dim
    levels = []
    for q, gens in enumerate(doc["levels"]):
        k = doc["k"] + q
        size = slot_dim(GradedSlot(doc["n"], doc["m"], 0, k))
        vecs = _vectors(gens, size, f"$.levels[{q}]")
        levels.append(Tableau.from_generators(doc["n"], doc["m"], k, vecs))
    return Tower(tuple(levels))


def tower_to_doc(tw: Tower) -> dict:
    first = tw.levels[0]
    return {"schema": SCHEMA_TAG, "kind": "tower", "n": first.n, "m": first.m, "k": first.k,
            "levels": [[_rats(v) for v in g.space.vectors()] for g in tw.levels]}


def connection_from_doc(doc: dict) -> ConstantRelativeConnection:
    _validate(doc, CONNECTION_SCHEMA)
    n, a, b = doc["n"], doc["F_rank"], doc["E_rank"]
    if len(doc["C"]) != n:
        raise SchemaError(f"expected {n} matrices", "$.C")
    l = _matrix(doc["l"], b, a, "$.l")
    C = tuple(_matrix(c, b, a, f"$.C[{i}]") for i, c in enumerate(doc["C"]))
    return ConstantRelativeConnection(n, a, b, l, C)


def connection_to_doc(c: ConstantRelativeConnection) -> dict:
    return {"schema": SCHEMA_TAG, "n": c.n, "F_rank": c.F_rank, "E_rank": c.E_rank,
            "l": _rats(c.l.flat()), "C": [_rats(m.flat()) for m in c.C]}


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON ({exc.msg}) at line {exc.lineno} column {exc.colno}")


def load(path):
    """Parse any supported input file into a Tableau, Tower or connection."""
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    kind = detect_kind(doc)
    return {"tableau": tableau_from_doc, "tower": tower_from_doc,
            "connection": connection_from_doc}[kind](doc)


def to_doc(obj) -> dict:
    if isinstance(obj, Tableau):
        return tableau_to_doc(obj)
    if isinstance(obj, Tower):
        return tower_to_doc(obj)
    if isinstance(obj, ConstantRelativeConnection):
        return connection_to_doc(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# reports


def jsonable(x):
    """Convert results into JSON-safe values with canonical rationals and string keys."""
    if isinstance(x, Fraction):
        return rational_str(x)
    if isinstance(x, dict):
        return {_key(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(p) for p in k)
    return str(k)


def make_report(request: dict, results: list, version: str) -> dict:
    rep = {"schema": SCHEMA_TAG, "version": version, "request": jsonable(request),
           "results": jsonable(results)}
    _validate(rep, REPORT_SCHEMA)
    return rep


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write(path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
