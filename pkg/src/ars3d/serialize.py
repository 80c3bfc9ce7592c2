"""JSON documents for structures and maps, with deterministic output.

Document layout::

    {"theta": {"family": "diagonal", "gamma": 0.0},
     "linear_field": {"xi": [0, 0], "A": [[0, 1], [0, 0]]},
     "distribution": {"basis": [[1, 0, 0], [0, 0, 1]]},
     "candidate_map": {"type": "linear_candidate", "a": -1, "P": [[1, 0], [0, 1]]},
     "target": {...}}

``distribution`` may carry a ``gram`` matrix, in which case ``basis`` holds
two spanning vectors with that Gram matrix instead of an orthonormal pair.
``target`` is an optional second structure (same keys, ``theta`` inherited)
that the candidate map is checked against; by default the map is checked
against the document's own structure.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .ars import ARS, Distribution
from .errors import ArsError, InvalidAutomorphismError
from .fields import LinearField
from .group import GroupPoint
from .linalg2 import Family, ThetaForm
from .morphisms import AffineCandidate, Automorphism, Composite, LeftTranslation, LinearCandidate

__all__ = [
    "SchemaError",
    "Document",
    "dumps",
    "parse_theta",
    "parse_linear_field",
    "parse_distribution",
    "parse_map",
    "parse_document",
    "load_document",
    "theta_to_dict",
    "field_to_dict",
    "distribution_to_dict",
    "map_to_dict",
    "ars_to_dict",
]


class SchemaError(ValueError):
    """The input does not follow the document layout."""


def dumps(obj):
    """Compact JSON with sorted keys and floats at 17 significant digits.

    Non-finite floats are written as ``Infinity``, ``-Infinity`` and ``NaN``,
    which :func:`json.loads` reads back.
    """
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{dumps(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _require(d, key, where):
    if not isinstance(d, dict):
        raise SchemaError(f"{where} must be an object")
    if key not in d:
        raise SchemaError(f"{where} is missing '{key}'")
    return d[key]


def _array(value, shape, where):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where} must be numeric with shape {shape}") from exc
    if arr.shape != shape:
        raise SchemaError(f"{where} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{where} must be finite")
    return arr


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number")
    return float(value)


def parse_theta(d):
    family = _require(d, "family", "theta")
    try:
        family = Family(family)
    except ValueError as exc:
        raise SchemaError(f"unknown theta family {family!r}") from exc
    gamma = _number(d.get("gamma", 1.0 if family is Family.DIAGONAL else 0.0), "theta.gamma")
    try:
        return ThetaForm(family, gamma)
    except ArsError as exc:
        raise SchemaError(str(exc)) from exc


def parse_linear_field(theta, d, strict=False):
    """Parse a linear field; by default a non-commuting ``A`` is admitted and flagged."""
    xi = _array(_require(d, "xi", "linear_field"), (2,), "linear_field.xi")
    A = _array(_require(d, "A", "linear_field"), (2, 2), "linear_field.A")
    return LinearField(theta, xi, A, strict=strict)


def parse_distribution(d):
    basis = _array(_require(d, "basis", "distribution"), (2, 3), "distribution.basis")
    if "gram" in d:
        gram = _array(d["gram"], (2, 2), "distribution.gram")
        return Distribution.from_gram(basis, gram)
    return Distribution.from_rows(basis)


def parse_map(theta, d):
    """Parse a map; an object without ``type`` is read as an automorphism.

    An automorphism whose ``P`` fails ``P theta = eps theta P`` is kept as an
    :class:`~ars3d.morphisms.AffineCandidate` with the same formula, so that
    verification can report where it breaks.
    """
    if not isinstance(d, dict):
        raise SchemaError("map must be an object")
    kind = d.get("type", "automorphism")
    if kind == "automorphism":
        eps = _require(d, "eps", "automorphism")
        if eps not in (1, -1) or isinstance(eps, bool):
            raise SchemaError("automorphism.eps must be 1 or -1")
        P = _array(_require(d, "P", "automorphism"), (2, 2), "automorphism.P")
        eta = _array(d.get("eta", [0.0, 0.0]), (2,), "automorphism.eta")
        try:
            return Automorphism(theta, eps, P, eta)
        except InvalidAutomorphismError:
            return AffineCandidate(theta, eps, P, eta)
    if kind == "linear_candidate":
        a = _number(_require(d, "a", "linear_candidate"), "linear_candidate.a")
        P = _array(_require(d, "P", "linear_candidate"), (2, 2), "linear_candidate.P")
        return LinearCandidate(theta, a, P)
    if kind == "affine_candidate":
        a = _number(_require(d, "a", "affine_candidate"), "affine_candidate.a")
        P = _array(_require(d, "P", "affine_candidate"), (2, 2), "affine_candidate.P")
        eta = _array(d.get("eta", [0.0, 0.0]), (2,), "affine_candidate.eta")
        return AffineCandidate(theta, a, P, eta)
    if kind == "left_translation":
        g = _require(d, "g", "left_translation")
        t = _number(_require(g, "t", "left_translation.g"), "left_translation.g.t")
        v = _array(_require(g, "v", "left_translation.g"), (2,), "left_translation.g.v")
        return LeftTranslation(theta, GroupPoint(t, v))
    if kind == "composite":
        maps = _require(d, "maps", "composite")
        if not isinstance(maps, list) or not maps:
            raise SchemaError("composite.maps must be a non-empty list")
        return Composite(tuple(parse_map(theta, m) for m in maps))
    raise SchemaError(f"unknown map type {kind!r}")


@dataclass
class Document:
    """A parsed document; the structure itself is validated by :meth:`ars`."""

    theta: ThetaForm
    X: LinearField
    delta: Distribution
    candidate_map: object = None
    target: object = None

    def ars(self):
        return ARS(self.theta, self.X, self.delta)


def parse_document(d):
    """Parse the layout in the module docstring.

    Domain errors (an invalid automorphism, a degenerate basis) propagate as
    :class:`~ars3d.errors.ArsError`; layout errors raise :class:`SchemaError`.
    """
    if not isinstance(d, dict):
        raise SchemaError("document must be an object")
    theta = parse_theta(_require(d, "theta", "document"))
    X = parse_linear_field(theta, _require(d, "linear_field", "document"))
    delta = parse_distribution(_require(d, "distribution", "document"))
    doc = Document(theta, X, delta)
    if "candidate_map" in d:
        doc.candidate_map = parse_map(theta, d["candidate_map"])
    if "target" in d:
        t = d["target"]
        doc.target = (
            parse_linear_field(theta, _require(t, "linear_field", "target")),
            parse_distribution(_require(t, "distribution", "target")),
        )
    return doc


def load_document(fh):
    try:
        raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return parse_document(raw)


def theta_to_dict(theta):
    return {"family": theta.family.value, "gamma": theta.gamma}


def field_to_dict(X):
    return {"xi": X.xi.tolist(), "A": X.A.tolist()}


def distribution_to_dict(delta):
    return {"basis": delta.basis.tolist()}


def map_to_dict(m):
    if isinstance(m, Automorphism):
        return {"type": "automorphism", "eps": m.eps, "P": m.P.tolist(), "eta": m.eta.tolist()}
    if isinstance(m, LinearCandidate):
        return {"type": "linear_candidate", "a": m.a, "P": m.P.tolist()}
    if isinstance(m, AffineCandidate):
        return {"type": "affine_candidate", "a": m.a, "P": m.P.tolist(), "eta": m.eta.tolist()}
    if isinstance(m, LeftTranslation):
        return {"type": "left_translation", "g": {"t": m.g.t, "v": m.g.v.tolist()}}
    if isinstance(m, Composite):
        return {"type": "composite", "maps": [map_to_dict(x) for x in m.maps]}
    raise TypeError(f"cannot serialize map of type {type(m).__name__}")


def ars_to_dict(sigma, candidate_map=None):
    out = {
        "theta": theta_to_dict(sigma.theta),
        "linear_field": field_to_dict(sigma.X),
        "distribution": distribution_to_dict(sigma.delta),
    }
    if candidate_map is not None:
        out["candidate_map"] = map_to_dict(candidate_map)
    return out
