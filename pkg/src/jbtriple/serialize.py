"""JSON encodings of space specs, elements and operator descriptions.

Complex numbers are written as ``[re, im]`` pairs; plain numbers are accepted
on input.  Element coordinates are interleaved ``[re0, im0, re1, im1, ...]``;
an ambient ``{"matrix": ...}`` form is accepted on input.
"""
from __future__ import annotations

import json
import math
from numbers import Real

import numpy as np

from .core import (
    Antisymmetric, Diagonal, DirectSum, L_op, Q3, Q_op, Rectangular, RealLinearOperator,
    Subspace, Symmetric, jordan_multiplication, left_multiplication, right_multiplication,
)
from .exceptions import InputError

__all__ = [
    "spec_from_json", "spec_to_json", "load_spec", "element_from_json", "element_to_json",
    "operator_from_json", "complex_to_json", "dumps",
]

_SIMPLE = {
    "rectangular": (Rectangular, ("p", "q")),
    "symmetric": (Symmetric, ("n",)),
    "antisymmetric": (Antisymmetric, ("n",)),
    "diagonal": (Diagonal, ("n",)),
    "q3": (Q3, ()),
}


def _complex(v):
    if isinstance(v, bool):
        raise InputError(f"not a number: {v!r}")
    if isinstance(v, Real):
        z = complex(float(v))
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(t, Real) and not isinstance(t, bool) for t in v):
        z = complex(float(v[0]), float(v[1]))
    else:
        raise InputError(f"expected a number or [re, im], got {v!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"non-finite number {v!r}")
    return z


def complex_to_json(z):
    return [float(z.real), float(z.imag)]


def _vector(obj):
    """A coordinate vector given as numbers or ``[re, im]`` pairs."""
    if not isinstance(obj, list):
        raise InputError(f"expected a list of coordinates, got {type(obj).__name__}")
    return [_complex(v) for v in obj]


def _interleaved(obj):
    if not isinstance(obj, list) or len(obj) % 2:
        raise InputError("interleaved coordinates need an even-length list")
    vals = [_complex(v).real for v in obj]
    if any(_complex(v).imag for v in obj):
        raise InputError("interleaved coordinates must be real numbers")
    return [complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def _matrix(obj):
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError("expected a nested list matrix")
    rows = [[_complex(v) for v in r] for r in obj]
    if len({len(r) for r in rows}) != 1:
        raise InputError("ragged matrix")
    return np.array(rows, dtype=complex)


def _params(obj, keys):
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise InputError("params must be an object")
    missing = [k for k in keys if k not in params]
    if missing:
        raise InputError(f"missing params {missing}")
    return params


def spec_from_json(obj):
    """Parse a space-spec object into a factor spec (validation happens in the dataclasses)."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("space spec must be an object with a 'kind'")
    kind = obj["kind"]
    if kind in _SIMPLE:
        cls, keys = _SIMPLE[kind]
        params = _params(obj, keys)
        return cls(*(params[k] for k in keys))
    if kind == "subspace":
        params = _params(obj, ("parent",))
        basis = obj.get("basis")
        if not isinstance(basis, list) or not basis:
            raise InputError("subspace needs a nonempty 'basis'")
        return Subspace(spec_from_json(params["parent"]), tuple(tuple(_vector(b)) for b in basis))
    if kind == "direct_sum":
        params = _params(obj, ("members",))
        members = params["members"]
        if not isinstance(members, list) or not members:
            raise InputError("direct_sum needs a nonempty 'members' list")
        return DirectSum(tuple(spec_from_json(m) for m in members))
    raise InputError(f"unknown space kind {kind!r}")


def spec_to_json(spec):
    for kind, (cls, keys) in _SIMPLE.items():
        if type(spec) is cls:
            return {"kind": kind, "params": {k: getattr(spec, k) for k in keys}}
    if isinstance(spec, Subspace):
        return {"kind": "subspace", "params": {"parent": spec_to_json(spec.parent)},
                "basis": [[complex_to_json(z) for z in row] for row in spec.basis]}
    if isinstance(spec, DirectSum):
        return {"kind": "direct_sum", "params": {"members": [spec_to_json(m) for m in spec.members]}}
    raise InputError(f"not a space spec: {spec!r}")


def load_spec(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"spec file is not valid JSON: {exc}") from exc
    return spec_from_json(obj)


def element_from_json(space, obj):
    if isinstance(obj, dict):
        if "matrix" in obj:
            return space.from_matrix(_matrix(obj["matrix"]))
        if "coords" in obj:
            coords = _vector(obj["coords"])
        else:
            raise InputError("element object needs 'matrix' or 'coords'")
    else:
        coords = _interleaved(obj)
    if len(coords) != space.dim:
        raise InputError(f"element has {len(coords)} coordinates, space has dim {space.dim}")
    return space.element(np.array(coords, dtype=complex))


def element_to_json(x):
    return [float(v) for z in x.coords for v in (z.real, z.imag)]


def operator_from_json(space, obj):
    """Build ``(operator, anchors)`` from a tagged description.

    Kinds: ``L`` (a, b), ``M`` (b, unit), ``left``/``right`` (b), ``Q`` (factors:
    a list of [a, b] pairs composed left to right, an even count so the result
    is complex-linear), ``T`` (a, b) and ``matrix`` (A).  An optional ``scale``
    multiplies the result.
    """
    from .ideals import build_T_operator

    if not isinstance(obj, dict) or "op" not in obj:
        raise InputError("operator description must be an object with an 'op'")
    kind = obj["op"]

    def el(key):
        if key not in obj:
            raise InputError(f"operator {kind!r} needs {key!r}")
        return element_from_json(space, obj[key])

    anchors = []
    if kind == "L":
        T = L_op(el("a"), el("b"))
    elif kind == "M":
        T = jordan_multiplication(el("b"), el("unit"))
    elif kind == "left":
        T = left_multiplication(el("b"))
    elif kind == "right":
        T = right_multiplication(el("b"))
    elif kind == "Q":
        factors = obj.get("factors")
        if not isinstance(factors, list) or not factors or len(factors) % 2:
            raise InputError("'Q' needs an even, nonempty list of [a, b] factors")
        T = None
        for pair in factors:
            if not isinstance(pair, list) or len(pair) != 2:
                raise InputError("each Q factor is a pair [a, b]")
            q = Q_op(element_from_json(space, pair[0]), element_from_json(space, pair[1]))
            T = q if T is None else T @ q
    elif kind == "T":
        t = build_T_operator(el("a"), el("b"))
        T = t.operator
        anchors = [t.range_c, t.c, t.b, t.unit, t.b_star]
    elif kind == "matrix":
        A = _matrix(obj.get("A", []))
        if A.shape != (space.dim, space.dim):
            raise InputError(f"coordinate matrix must be {space.dim}x{space.dim}")
        T = RealLinearOperator.from_matrix(space, A)
    else:
        raise InputError(f"unknown operator kind {kind!r}")
    if "scale" in obj:
        T = T * _complex(obj["scale"])
    return T, anchors


def dumps(obj):
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
