import json

import numpy as np
import pytest

from conftest import SUITE_SPECS, mat
from jbtriple import Rectangular, Subspace, build_space, jordan_multiplication
from jbtriple.exceptions import InputError
from jbtriple.serialize import (
    complex_to_json, dumps, element_from_json, element_to_json, load_spec, operator_from_json,
    spec_from_json, spec_to_json,
)


@pytest.mark.parametrize("spec", SUITE_SPECS + [Subspace(Rectangular(2, 2), ((1, 0, 0, 0),))],
                         ids=repr)
def test_spec_round_trip(spec):
    text = json.dumps(spec_to_json(spec))
    again = spec_from_json(json.loads(text))
    assert build_space(again).dim == build_space(spec).dim
    assert spec_to_json(again) == spec_to_json(spec)


def test_load_spec(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"kind": "rectangular", "params": {"p": 2, "q": 3}}')
    assert build_space(load_spec(p)).dim == 6


@pytest.mark.parametrize("obj", [
    [], {"kind": "nope"}, {"kind": "rectangular", "params": {"p": 2}},
    {"kind": "rectangular", "params": {"p": 0, "q": 1}},
    {"kind": "diagonal", "params": {"n": 2.5}},
    {"kind": "direct_sum", "params": {"members": []}},
    {"kind": "subspace", "params": {"parent": {"kind": "q3"}}, "basis": []},
])
def test_bad_specs(obj):
    with pytest.raises(InputError):
        build_space(spec_from_json(obj))


def test_load_spec_errors(tmp_path):
    with pytest.raises(InputError):
        load_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_spec(bad)


def test_element_forms(m2):
    x = mat(m2, [[1, 2j], [0, -1]])
    assert np.allclose(element_from_json(m2, element_to_json(x)).coords, x.coords)
    assert np.allclose(element_from_json(m2, {"matrix": [[1, [0, 2]], [0, -1]]}).coords, x.coords)
    assert np.allclose(element_from_json(m2, {"coords": list(map(complex_to_json, x.coords))}).coords,
                       x.coords)


@pytest.mark.parametrize("obj", [[1, 2, 3], [1, 0], {"foo": 1}, {"coords": [1, "a", 0, 0]},
                                 {"matrix": [[1, 0], [0]]}, {"coords": [float("nan")] * 4}])
def test_bad_elements(m2, obj):
    with pytest.raises(InputError):
        element_from_json(m2, obj)


def test_operator_kinds(m2):
    E12 = {"matrix": [[0, 1], [0, 0]]}
    I = {"matrix": [[1, 0], [0, 1]]}
    M = jordan_multiplication(mat(m2, [[0, 1], [0, 0]]), mat(m2, np.eye(2)))
    for obj in ({"op": "M", "b": E12, "unit": I}, {"op": "T", "a": I, "b": E12},
                {"op": "L", "a": E12, "b": I}):
        T, _ = operator_from_json(m2, obj)
        assert np.allclose(T.A, M.A)
    T, _ = operator_from_json(m2, {"op": "L", "a": E12, "b": I, "scale": [0, 2]})
    assert np.allclose(T.A, 2j * M.A)
    T, anchors = operator_from_json(m2, {"op": "T", "a": I, "b": E12})
    assert anchors
    Q, _ = operator_from_json(m2, {"op": "Q", "factors": [[I, I], [I, I]]})
    assert np.allclose(Q.A, np.eye(4))
    A, _ = operator_from_json(m2, {"op": "matrix", "A": np.eye(4).tolist()})
    assert A.is_complex_linear()
    for kind in ("left", "right"):
        assert operator_from_json(m2, {"op": kind, "b": E12})[0].is_complex_linear()


@pytest.mark.parametrize("obj", [{}, {"op": "zzz"}, {"op": "L", "a": [0] * 8},
                                 {"op": "Q", "factors": [[[0] * 8, [0] * 8]]},
                                 {"op": "matrix", "A": [[1]]}])
def test_bad_operators(m2, obj):
    with pytest.raises(InputError):
        operator_from_json(m2, obj)


def test_dumps_is_deterministic():
    a = dumps({"b": 1, "a": [1.5, {"z": 0, "y": 1}]})
    assert a == dumps({"a": [1.5, {"y": 1, "z": 0}], "b": 1})
    assert a.endswith("\n")
