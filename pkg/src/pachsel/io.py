"""JSON file formats and hashing.

Schemas (stable external interfaces):

* point set:     {"dim": d, "exact": bool, "colors": [[[c1,...,cd], ...], ...]}
                 exact coordinates serialized as "p/q" strings
* arrangement:   {"dim": d, "hyperplanes": [{"normal": [...], "offset": s}, ...],
                  "oriented": true}
* measure:       {"dim": d, "colors": [[{"point": [...], "weight": "r/s"}, ...], ...]}
* certificate:   see selection.PachCertificate.to_json_dict
* simplex:       {"vertices": [[...], ...]}

Structured files are written with sorted keys and a fixed layout so that a
fixed seed reproduces byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .arrangements import HyperplaneArrangement, build_arrangement
from .errors import ParseError
from .geometry import LabeledPointSet, OrientedHyperplane
from .rational import format_scalar, is_exact, parse_scalar


def scalar_to_json(x):
    if is_exact(x):
        return format_scalar(x)
    return float(x)


def scalar_from_json(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {v!r}") from exc
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"bad scalar {v!r}")
    return v if isinstance(v, float) else Fraction(v)


def canonical_json_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


# ---------------------------------------------------------------------------
# Point sets


def pointset_to_json_dict(ps: LabeledPointSet) -> dict:
    if ps.exact:
        colors = [[[format_scalar(c) for c in p] for p in pts] for pts in ps.colors]
    else:
        colors = [[[float(c) for c in p] for p in pts] for pts in ps.colors]
    return {"dim": ps.dim, "exact": ps.exact, "colors": colors}


def pointset_from_json_dict(data: dict) -> LabeledPointSet:
    try:
        dim = int(data["dim"])
        exact = bool(data["exact"])
        raw_colors = data["colors"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed point-set JSON: {exc}") from exc
    colors = []
    for pts in raw_colors:
        parsed = []
        for p in pts:
            if exact:
                try:
                    parsed.append(tuple(parse_scalar(c) for c in p))
                except ValueError as exc:
                    raise ParseError(f"bad exact coordinate in {p!r}") from exc
            else:
                parsed.append(tuple(float(c) for c in p))
        colors.append(tuple(parsed))
    try:
        return LabeledPointSet(dim, tuple(colors), exact)
    except Exception as exc:
        raise ParseError(f"inconsistent point set: {exc}") from exc


def pointset_sha256(ps: LabeledPointSet) -> str:
    return sha256_hex(canonical_json_bytes(pointset_to_json_dict(ps)))


# ---------------------------------------------------------------------------
# Arrangements


def arrangement_to_json_dict(arr: HyperplaneArrangement) -> dict:
    return {
        "dim": arr.dim,
        "hyperplanes": [
            {"normal": [scalar_to_json(c) for c in h.normal], "offset": scalar_to_json(h.offset)}
            for h in arr.hyperplanes
        ],
        "oriented": True,
    }


def arrangement_from_json_dict(data: dict) -> HyperplaneArrangement:
    try:
        planes = [
            OrientedHyperplane(
                tuple(scalar_from_json(c) for c in h["normal"]),
                scalar_from_json(h["offset"]),
            )
            for h in data["hyperplanes"]
        ]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed arrangement JSON: {exc}") from exc
    # Rebuilding re-derives the vertices; orientation is idempotent.
    return build_arrangement(planes)


# ---------------------------------------------------------------------------
# Weighted point measures


def measure_to_json_dict(dim: int, colors) -> dict:
    """colors: per color, list of (point, weight) with rational weights."""
    return {
        "dim": dim,
        "colors": [
            [
                {
                    "point": [format_scalar(c) for c in p],
                    "weight": format_scalar(w),
                }
                for p, w in pts
            ]
            for pts in colors
        ],
    }


def measure_from_json_dict(data: dict):
    try:
        dim = int(data["dim"])
        colors = [
            [
                (tuple(parse_scalar(c) for c in entry["point"]), parse_scalar(entry["weight"]))
                for entry in pts
            ]
            for pts in data["colors"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed measure JSON: {exc}") from exc
    return dim, colors


# ---------------------------------------------------------------------------
# Simplices


def simplex_to_json_dict(vertices) -> dict:
    return {"vertices": [[float(c) for c in v] for v in vertices]}


def simplex_from_json_dict(data: dict):
    try:
        return [tuple(float(c) for c in v) for v in data["vertices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed simplex JSON: {exc}") from exc
