"""JSON input and output: schema-checked readers and a deterministic writer.

Floats are written with 17 significant digits so every emitted PMF re-parses to an
identical object; infinities are written as the strings "inf" / "-inf".
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .center import FamilySpec
from .families import AvsSpec
from .geometry import ConvexHullSet
from .guessing import LengthFunction
from .probkit import NO_SIDE_INFO, Alphabet, GuessingList, JointPmf


class InputError(ValueError):
    """Malformed or invalid input file."""


_LABELS = {"type": "array", "items": {"type": ["string", "integer"]}, "minItems": 1}
_ROW = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_INT_ROW = {"type": "array", "items": {"type": "integer"}, "minItems": 1}

PMF_SCHEMA = {
    "type": "object",
    "properties": {
        "x": _LABELS,
        "y": _LABELS,
        "mass": {"oneOf": [_ROW, {"type": "array", "items": _ROW, "minItems": 1}]},
    },
    "required": ["x", "mass"],
}
LIST_SCHEMA = {
    "type": "object",
    "properties": {
        "x": _LABELS,
        "y": _LABELS,
        "rank": {"oneOf": [_INT_ROW, {"type": "array", "items": _INT_ROW, "minItems": 1}]},
    },
    "required": ["x", "rank"],
}
LENGTHS_SCHEMA = {
    "type": "object",
    "properties": {
        "x": _LABELS,
        "y": _LABELS,
        "lengths": {"oneOf": [_INT_ROW, {"type": "array", "items": _INT_ROW, "minItems": 1}]},
    },
    "required": ["x", "lengths"],
}
FAMILY_SCHEMA = {
    "type": "object",
    "properties": {"members": {"type": "array", "items": PMF_SCHEMA, "minItems": 1}},
    "required": ["members"],
}
HULL_SCHEMA = {
    "type": "object",
    "properties": {"vertices": {"type": "array", "items": PMF_SCHEMA, "minItems": 1, "maxItems": 16}},
    "required": ["vertices"],
}
AVS_SCHEMA = {
    "type": "object",
    "properties": {
        "states": _LABELS,
        "letters": _LABELS,
        "channel": {"type": "array", "items": _ROW, "minItems": 1},
        "n": {"type": "integer", "minimum": 1},
        "counts": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    "required": ["states", "letters", "channel", "n"],
}


# ---------------------------------------------------------------- reading


def load_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _validate(doc: Any, schema: dict, what: str):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"invalid {what} at {where}: {exc.message}") from None


def _alphabet(doc: dict) -> Alphabet:
    x = tuple(str(v) for v in doc["x"])
    y = tuple(str(v) for v in doc.get("y", [NO_SIDE_INFO]))
    try:
        return Alphabet(x, y)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _matrix(rows, dtype=float) -> np.ndarray:
    a = np.asarray(rows, dtype=dtype)
    return a[None, :] if a.ndim == 1 else a


def pmf_from_doc(doc: Any) -> JointPmf:
    _validate(doc, PMF_SCHEMA, "PMF")
    try:
        return JointPmf(_alphabet(doc), _matrix(doc["mass"]))
    except ValueError as exc:
        raise InputError(f"invalid PMF: {exc}") from None


def list_from_doc(doc: Any) -> GuessingList:
    _validate(doc, LIST_SCHEMA, "guessing list")
    try:
        return GuessingList(_alphabet(doc), _matrix(doc["rank"], int))
    except ValueError as exc:
        raise InputError(f"invalid guessing list: {exc}") from None


def lengths_from_doc(doc: Any) -> LengthFunction:
    _validate(doc, LENGTHS_SCHEMA, "length function")
    try:
        return LengthFunction(_alphabet(doc), _matrix(doc["lengths"], int))
    except ValueError as exc:
        raise InputError(f"invalid length function: {exc}") from None


def family_from_doc(doc: Any) -> FamilySpec:
    _validate(doc, FAMILY_SCHEMA, "family")
    members = [pmf_from_doc(m) for m in doc["members"]]
    try:
        return FamilySpec(members)
    except ValueError as exc:
        raise InputError(f"invalid family: {exc}") from None


def hull_from_doc(doc: Any) -> ConvexHullSet:
    _validate(doc, HULL_SCHEMA, "hull")
    try:
        return ConvexHullSet([pmf_from_doc(v) for v in doc["vertices"]])
    except ValueError as exc:
        raise InputError(f"invalid hull: {exc}") from None


def avs_from_doc(doc: Any) -> AvsSpec:
    _validate(doc, AVS_SCHEMA, "AVS spec")
    try:
        return AvsSpec(doc["states"], doc["letters"], np.asarray(doc["channel"], float), doc["n"],
                       tuple(doc.get("counts", ())))
    except ValueError as exc:
        raise InputError(f"invalid AVS spec: {exc}") from None


def read(path: str | Path, kind: str):
    """Read and validate an input file of the given kind."""
    readers = {
        "pmf": pmf_from_doc,
        "list": list_from_doc,
        "lengths": lengths_from_doc,
        "family": family_from_doc,
        "hull": hull_from_doc,
        "avs": avs_from_doc,
    }
    return readers[kind](load_json(path))


# ---------------------------------------------------------------- writing


def pmf_to_doc(p: JointPmf) -> dict:
    return {"x": list(p.alphabet.x), "y": list(p.alphabet.y), "mass": p.mass.tolist()}


def list_to_doc(g: GuessingList) -> dict:
    return {"x": list(g.alphabet.x), "y": list(g.alphabet.y), "rank": g.rank.tolist()}


def lengths_to_doc(l: LengthFunction) -> dict:
    return {"x": list(l.alphabet.x), "y": list(l.alphabet.y), "lengths": l.lengths.tolist()}


def format_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    text = format(v, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text; floats with 17 significant digits."""
    pad = " " * indent

    def enc(o, depth):
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(float(o))
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, np.ndarray):
            return enc(o.tolist(), depth)
        inner = pad * (depth + 1)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {enc(v, depth + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad * depth + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in o):
                return "[" + ", ".join(enc(v, depth + 1) for v in o) + "]"
            return "[\n" + ",\n".join(inner + enc(v, depth + 1) for v in o) + "\n" + pad * depth + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


__all__ = [
    "InputError",
    "dumps",
    "format_float",
    "list_from_doc",
    "list_to_doc",
    "lengths_to_doc",
    "load_json",
    "pmf_from_doc",
    "pmf_to_doc",
    "read",
]
