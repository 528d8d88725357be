"""Numerical verification battery for the library's headline identities and bounds.

Each ``criterion_*`` function returns a list of :class:`Check` records; the
``verify-paper`` command runs all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .calculus import cubic_root, is_positive_in_peirce2, iterated_cubic_root, range_tripotent
from .core import (
    Antisymmetric, Diagonal, DirectSum, L_op, Q3, Rectangular, Symmetric, build_space,
    is_orthogonal, is_tripotent, jordan_multiplication, left_multiplication, peirce,
    right_multiplication, triple_product,
)
from .core import _eigen_projections
from .exceptions import JBTripleError
from .ideals import build_T_operator, commutativity_report
from .numrange import (
    DEFAULT_STARTS, INDEX_STARTS, dir_derivative, dir_derivative_fd, numerical_index_estimate,
    numerical_radius, operator_norm,
)

__all__ = ["Check", "CRITERIA", "run_all", "REPORT_SPECS", "INVARIANT_SPECS"]

REPORT_SPECS = (
    Diagonal(3), Rectangular(2, 2), Q3(), Rectangular(1, 2), Symmetric(2), Antisymmetric(4),
    DirectSum((Diagonal(2), Rectangular(1, 2))),
)
INVARIANT_SPECS = REPORT_SPECS


@dataclass
class Check:
    name: str
    expected: str
    got: object
    tol: float | None
    passed: bool

    def to_dict(self):
        got = self.got
        if isinstance(got, (float, np.floating)):
            got = float(got)
        return {"name": self.name, "expected": self.expected, "got": got,
                "tol": self.tol, "pass": bool(self.passed)}


def _within(name, value, lo, hi, tol=None):
    return Check(name, f"[{lo}, {hi}]", float(value), tol, lo <= value <= hi)


def _at_most(name, value, bound, tol=None):
    return Check(name, f"<= {bound}", float(value), tol, value <= bound)


def _at_least(name, value, bound, tol=None):
    return Check(name, f">= {bound}", float(value), tol, value >= bound)


def _m2():
    space = build_space(Rectangular(2, 2))
    return space, space.from_matrix([[0, 1], [0, 0]]), space.from_matrix(np.eye(2))


def _q3():
    space = build_space(Q3())
    return space, space.from_matrix([[0, 0], [1, 0]]), space.from_matrix(np.eye(2))


def criterion_1(seed=0, starts=DEFAULT_STARTS):
    _, e12, one = _m2()
    v = numerical_radius(jordan_multiplication(e12, one), starts, seed=seed).value
    _, e21, unit = _q3()
    w = numerical_radius(jordan_multiplication(2 * e21, unit), starts, seed=seed).value
    return [
        _within("v(M_E12) on M2", v, 0.49, 0.51),
        _within("v(M_2E21) on Q3", w, 0.98, 1.02),
    ]


def criterion_2(seed=0, starts=DEFAULT_STARTS):
    _, e12, _ = _m2()
    vl = numerical_radius(left_multiplication(e12), starts, seed=seed).value
    vr = numerical_radius(right_multiplication(e12), starts, seed=seed).value
    vh = numerical_radius(right_multiplication(0.5 * e12), starts, seed=seed).value
    return [
        _within("v(L_E12) on M2", vl, 0.49, 0.51),
        _within("v(R_E12) on M2", vr, 0.49, 0.51),
        _within("v(R_(E12/2)) on M2", vh, 0.24, 0.26),
    ]


def criterion_3(seed=0, starts=DEFAULT_STARTS):
    _, e12, one = _m2()
    T = L_op(e12, one)
    return [
        _within("|L(E12, I)| on M2", operator_norm(T, starts, seed=seed).value, 0.99, 1.01),
        _within("v(L(E12, I)) on M2", numerical_radius(T, starts, seed=seed).value, 0.49, 0.51),
    ]


def criterion_4(seed=0, starts=DEFAULT_STARTS):
    out = []
    for label, (space, b, unit) in (("M2", _m2()), ("Q3", _q3())):
        try:
            t = build_T_operator(unit, b)
        except JBTripleError as exc:
            out.append(Check(f"T-construction on {label}", "builds", str(exc), None, False))
            continue
        anchors = [t.range_c, t.c, t.b, t.unit, t.b_star]
        nrm = operator_norm(t.operator, starts, seed=seed, anchors=anchors).value
        rad = numerical_radius(t.operator, starts, seed=seed, anchors=anchors).value
        positive = is_positive_in_peirce2(t.c, unit) and t.c.norm() > space.tol
        nil = triple_product(t.b_cube, t.range_c, t.b_cube).norm()
        out += [
            _within(f"|T| on {label}", nrm, 0.99, 1.01),
            _within(f"v(T) on {label}", rad, 0.49, 0.51),
            Check(f"c nonzero positive on {label}", "true", positive, space.tol, positive),
            _at_most(f"b^[3] 2-nilpotent in E(c) on {label}", nil, space.tol, space.tol),
        ]
    return out


def _index(spec, n_samples, seed, starts):
    return numerical_index_estimate(build_space(spec), n_samples=n_samples, seed=seed,
                                    n_starts=starts)


def criterion_5(seed=0, starts=INDEX_STARTS, n_samples=50, _cache=None):
    out = []
    for n in (2, 4):
        est = _index(Diagonal(n), n_samples, seed, starts)
        if _cache is not None:
            _cache[f"Diagonal({n})"] = est
        out.append(_at_least(f"min v/|T| over {n_samples} operators on Diagonal({n})",
                             est.value, 0.97))
    return out


_NONCOMMUTATIVE = (
    ("M2", Rectangular(2, 2)),
    ("Symmetric(2)", Symmetric(2)),
    ("Diagonal(1) + M2", DirectSum((Diagonal(1), Rectangular(2, 2)))),
)


def criterion_6(seed=0, starts=INDEX_STARTS, n_samples=4, _cache=None):
    out = []
    for label, spec in _NONCOMMUTATIVE:
        est = _index(spec, n_samples, seed, starts)
        if _cache is not None:
            _cache[label] = est
        check = _at_most(f"index estimate on {label} (witness {est.witness_name})", est.value, 0.51)
        check.passed = check.passed and est.witness_name.startswith("nilpotent")
        out.append(check)
    return out


def criterion_7(seed=0, starts=INDEX_STARTS, _cache=None):
    if not _cache:
        _cache = {}
        criterion_5(seed, starts, _cache=_cache)
        criterion_6(seed, starts, _cache=_cache)
    floor = 1 / math.e - 0.02
    ratios = [s["ratio"] for est in _cache.values() for s in est.samples]
    return [_at_least(f"min v/|T| over {len(ratios)} sampled operators", min(ratios), floor)]


def criterion_8(seed=0):
    out = []
    for spec in REPORT_SPECS:
        space = build_space(spec)
        try:
            rep = commutativity_report(space, seed=seed)
        except JBTripleError as exc:
            out.append(Check(f"report on {spec}", "consistent", str(exc), None, False))
            continue
        it = rep.items
        ok = it["i"] == it["xiv"] and (it["xii"] and it["xiv"]) == it["i"]
        out.append(Check(f"report on {spec}", "consistent", ok, None, ok))
        if spec == Rectangular(1, 2):
            split = it["xii"] and not it["i"]
            out.append(Check("Rectangular(1,2) has (xii) without (i)", "true", split, None, split))
    return out


def _jordan_identity(a, b, x, y):
    lhs = L_op(a, b) @ L_op(x, y) - L_op(x, y) @ L_op(a, b)
    rhs = L_op(L_op(a, b)(x), y) - L_op(x, L_op(b, a)(y))
    return (lhs - rhs).matrix_norm() / (a.norm() * b.norm() * x.norm() * y.norm())


def _peirce_defect(ps, e):
    eye = np.eye(e.space.dim)
    P = [ps.P2.A, ps.P1.A, ps.P0.A]
    worst = np.abs(sum(P) - eye).max()
    for i in range(3):
        for j in range(3):
            target = P[i] if i == j else 0 * eye
            worst = max(worst, np.abs(P[i] @ P[j] - target).max())
    return max(worst, np.abs(L_op(e, e).A - P[0] - 0.5 * P[1]).max())


def _invariants(space, rng, n):
    """Worst relative residuals of the algebraic invariants over ``n`` samples."""
    worst = dict.fromkeys(
        ["jordan", "cube", "peirce", "contractive", "orthogonality", "cubic_root", "range"], 0.0)
    for _ in range(n):
        a, b, x, y = (space.random_element(rng) for _ in range(4))
        worst["jordan"] = max(worst["jordan"], _jordan_identity(a, b, x, y))
        na = a.norm()
        worst["cube"] = max(worst["cube"], abs(triple_product(a, a, a).norm() - na ** 3) / na ** 3)
        e = range_tripotent(a)
        ps = peirce(e)
        worst["peirce"] = max(worst["peirce"], _peirce_defect(ps, e))
        for p in (ps.P2, ps.P1, ps.P0):
            worst["contractive"] = max(worst["contractive"], p(x).norm() / x.norm() - 1)
        # an element orthogonal to e: the Peirce-0 part of y (possibly zero)
        z = ps.P0(y)
        if z.norm() > space.tol:
            agree = is_orthogonal(e, z) and is_orthogonal(z, e)
            r = range_tripotent(z)
            sum_ok = is_tripotent(e + r)
            worst["orthogonality"] = max(worst["orthogonality"], 0.0 if agree and sum_ok else 1.0)
        if is_orthogonal(a, b):
            worst["orthogonality"] = 1.0
        c = cubic_root(x)
        worst["cubic_root"] = max(worst["cubic_root"],
                                  (triple_product(c, c, c) - x).norm() / x.norm())
        r = range_tripotent(x)
        ok = is_tripotent(r) and is_positive_in_peirce2(x, r) and (range_tripotent(r) - r).norm() < 1e-8
        worst["range"] = max(worst["range"], 0.0 if ok else 1.0)
    return worst


def criterion_9(seed=0, n_samples=100):
    out = []
    for spec in INVARIANT_SPECS:
        space = build_space(spec)
        worst = _invariants(space, np.random.default_rng(seed), n_samples)
        for key, val in worst.items():
            tol = 1e-8
            out.append(_at_most(f"{key} residual on {spec} ({n_samples} samples)", val, tol, tol))
    return out


def _polar_isometry(mat):
    m, n = mat.shape
    u, _ = scipy.linalg.polar(mat, side="right" if m >= n else "left")
    return u


def criterion_10(seed=0, n_pairs=1000):
    rng = np.random.default_rng(seed)
    spaces = [build_space(s) for s in INVARIANT_SPECS]
    worst_fd = 0.0
    for k in range(n_pairs):
        space = spaces[k % len(spaces)]
        x = space.random_element(rng)
        x = x / x.norm()
        y = space.random_element(rng)
        worst_fd = max(worst_fd, abs(dir_derivative(x, y, check=False) - dir_derivative_fd(x, y)))
    worst_peirce = worst_polar = 0.0
    for space in spaces:
        for _ in range(20):
            x = space.random_element(rng)
            e = range_tripotent(x)
            ps = peirce(e)
            eig, _ = _eigen_projections(L_op(e, e).A)
            worst_peirce = max(worst_peirce, max(
                np.abs(p.A - q).max() for p, q in zip((ps.P2, ps.P1, ps.P0), eig)))
            mat = x.matrix
            if np.linalg.matrix_rank(mat) == min(mat.shape):
                worst_polar = max(worst_polar, np.abs(_polar_isometry(mat) - e.matrix).max())
            worst_polar = max(worst_polar,
                              (iterated_cubic_root(x, 20) - e).norm())
    return [
        _at_most(f"dir_derivative vs finite differences ({n_pairs} pairs)", worst_fd, 1e-5, 1e-5),
        _at_most("polynomial vs eigensolver Peirce projections", worst_peirce, 1e-8, 1e-8),
        _at_most("range tripotent vs polar factor and 20 cubic roots", worst_polar, 1e-6, 1e-6),
    ]


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_all(seed=0, starts=None):
    """Run every criterion; returns ``{criterion: [Check, ...]}``."""
    cache = {}
    radius_starts = DEFAULT_STARTS if starts is None else starts
    index_starts = INDEX_STARTS if starts is None else starts
    out = {}
    for k in (1, 2, 3, 4):
        out[k] = CRITERIA[k](seed, radius_starts)
    out[5] = criterion_5(seed, index_starts, _cache=cache)
    out[6] = criterion_6(seed, index_starts, _cache=cache)
    out[7] = criterion_7(seed, index_starts, _cache=cache)
    out[8] = criterion_8(seed)
    out[9] = criterion_9(seed)
    out[10] = criterion_10(seed)
    return out
