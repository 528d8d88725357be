"""Inner ideals generated by one element, 2-nilpotents and commutativity criteria.

The inner ideal ``E(a)`` is the span of ``{a, E, a}``.  With the Jordan product
``x o y = {x, r(a), y}`` and involution ``x# = {r(a), x, r(a)}`` it is a
JB*-algebra whose unit is the range tripotent ``r(a)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import least_squares

from .calculus import complete_tripotent, range_tripotent
from .core import (
    RANK_TOL,
    Element,
    L_op,
    Q_op,
    RealLinearOperator,
    Subspace,
    build_space,
    commutativity_defect,
    is_associative_jb_algebra,
    peirce,
    triple_product,
)
from .exceptions import (
    InconsistentCharacterization,
    InputError,
    InternalError,
    NotNilpotent,
    SearchFailed,
    ZeroGenerator,
)

__all__ = [
    "InnerIdealAlgebra", "NilpotentCertificate", "TOperator", "CommutativityReport",
    "inner_ideal", "find_2nilpotent", "laa_defect", "check_Laa_in_Ea",
    "commutativity_report", "build_T_operator", "nilpotent_L_operator",
    "generated_subalgebra_dim", "q3_table_residual",
]


class InnerIdealAlgebra:
    """``E(a)`` as a JB*-algebra, stored as a subspace of the parent triple."""

    def __init__(self, generator, unit, space, W):
        self.generator = generator
        self.unit = unit
        self.space = space
        self.W = W

    def __repr__(self):
        return f"InnerIdealAlgebra(dim={self.dim}, parent_dim={self.parent.dim})"

    @property
    def parent(self):
        return self.generator.space

    @property
    def dim(self):
        return self.space.dim

    def to_local(self, x):
        return self.space.from_matrix(x.matrix)

    def to_parent(self, y):
        return self.parent.from_matrix(y.matrix)

    def residual(self, x):
        """Coordinate distance of a parent element from ``E(a)``."""
        z = x.coords
        return float(np.linalg.norm(z - self.W @ (self.W.conj().T @ z)))

    def contains(self, x, tol=None):
        tol = self.parent.tol if tol is None else tol
        return self.residual(x) <= tol * max(1.0, x.norm())

    def product(self, x, y):
        return triple_product(x, self.unit, y)

    def involution(self, x):
        return triple_product(self.unit, x, self.unit)

    @cached_property
    def local_unit(self):
        return self.to_local(self.unit)

    @cached_property
    def local_generator(self):
        return self.to_local(self.generator)

    @cached_property
    def structure(self):
        """``C[i, j, :]``: local coordinates of ``e_i o e_j``."""
        basis = self.space.basis_elements()
        u = self.local_unit
        return np.array([[triple_product(p, u, q).coords for q in basis] for p in basis])

    def multiplication_matrix(self, x):
        """Local coordinate matrix of ``y -> x o y`` for a parent element ``x``."""
        return L_op(self.to_local(x), self.local_unit).A

    def is_associative(self, tol=None):
        return is_associative_jb_algebra(self.space, self.local_unit, tol)

    def is_positive(self, x, tol=None):
        """``x`` is self-adjoint with nonnegative spectrum in ``E(a)``."""
        tol = self.parent.tol if tol is None else tol
        scale = max(1.0, x.norm())
        if (self.involution(x) - x).norm() > tol * scale:
            return False
        M = self.multiplication_matrix(x)
        if np.abs(M - M.conj().T).max(initial=0.0) > tol * scale:
            return False
        return bool(np.linalg.eigvalsh(0.5 * (M + M.conj().T)).min(initial=0.0) >= -tol * scale)

    def jordan_identity_residual(self):
        """Worst ``|(x o y) o x^2 - x o (y o x^2)|`` over basis pairs."""
        worst = 0.0
        basis = [self.to_parent(e) for e in self.space.basis_elements()]
        for x in basis:
            x2 = self.product(x, x)
            for y in basis:
                lhs = self.product(self.product(x, y), x2)
                rhs = self.product(x, self.product(y, x2))
                worst = max(worst, (lhs - rhs).norm())
        return worst


def inner_ideal(a, rank_tol=RANK_TOL):
    """The inner ideal ``E(a)`` with its JB*-algebra structure."""
    parent = a.space
    if a.norm() == 0:
        raise ZeroGenerator("inner ideal of the zero element")
    images = Q_op(a).B
    u, s, _ = np.linalg.svd(images)
    rank = int((s > rank_tol * s[0]).sum())
    W = u[:, :rank]
    space = build_space(Subspace(parent.spec, tuple(map(tuple, W.T))), parent.tol)
    # the subspace builder re-orthonormalizes, so take W from its basis
    W = parent.coords_of(space.basis).T
    alg = InnerIdealAlgebra(a, range_tripotent(a), space, W)
    tol = parent.tol
    if not alg.contains(a) or not alg.contains(alg.unit):
        raise InternalError("E(a) does not contain a and r(a)")
    if not alg.is_positive(a):
        raise InternalError("generator is not positive in E(a)")
    if alg.jordan_identity_residual() > tol:
        raise InternalError("Jordan identity fails in E(a)")
    return alg


@dataclass(frozen=True, eq=False)
class NilpotentCertificate:
    """A norm-one ``b`` in ``E(a)`` with ``{b, r(a), b}`` (numerically) zero."""

    element: Element
    unit: Element
    residual: float
    norm: float
    route: str = "search"

    def certified(self, tol):
        return self.residual <= tol * self.norm ** 2


def _candidates(alg):
    local = alg.space
    basis = local.basis_elements()
    yield from (("basis", b) for b in basis)
    for w in basis:
        v = range_tripotent(w)
        if v.norm() == 0:
            continue
        P1 = peirce(v).P1
        for b in basis:
            yield "peirce-1", P1(b)
    for i, p in enumerate(basis):
        for q in basis[i + 1:]:
            for c in (1, -1, 1j, -1j):
                yield "pair", p + c * q


def _nilpotent_residual(b, unit):
    n = b.norm()
    return triple_product(b, unit, b).norm(), n


def find_2nilpotent(alg, tol=None, seed=0, n_restarts=64):
    """A nonzero ``b`` in ``E(a)`` with ``b o b = 0``, or ``None`` when ``E(a)`` is associative.

    Constructive candidates come first (basis elements, their Peirce-1 parts
    relative to range tripotents of basis elements, simple pair combinations);
    then seeded Levenberg-Marquardt restarts on ``b o b = 0, |b|_F = 1``.
    """
    tol = alg.parent.tol if tol is None else tol
    if alg.is_associative(tol):
        return None
    u = alg.local_unit

    def certify(b, route):
        res, n = _nilpotent_residual(b, u)
        if n > 0 and res <= tol * n * n:
            bp = alg.to_parent(b) / n
            return NilpotentCertificate(bp, alg.unit, res / (n * n), 1.0, route)
        return None

    for route, b in _candidates(alg):
        cert = certify(b, route)
        if cert is not None:
            return cert

    C = alg.structure
    k = alg.dim

    def split(p):
        return p[:k] + 1j * p[k:]

    def fun(p):
        b = split(p)
        sq = np.einsum("i,j,ijl->l", b, b, C)
        return np.concatenate([sq.real, sq.imag, [np.vdot(b, b).real - 1.0]])

    def jac(p):
        b = split(p)
        J = np.einsum("j,ijl->li", b, C) + np.einsum("i,ijl->lj", b, C)
        top = np.block([[J.real, -J.imag], [J.imag, J.real]])
        last = np.concatenate([2 * b.real, 2 * b.imag])[None, :]
        return np.vstack([top, last])

    rng = np.random.default_rng(seed)
    for _ in range(n_restarts):
        p0 = rng.standard_normal(2 * k)
        sol = least_squares(fun, p0 / np.linalg.norm(p0), jac=jac, method="lm",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        cert = certify(alg.space.element(split(sol.x)), "search")
        if cert is not None:
            return cert
    raise SearchFailed(
        f"no 2-nilpotent found in a non-associative algebra after {n_restarts} restarts"
    )


def laa_defect(a, alg=None):
    """``max_k dist(L(a,a) b_k, E(a)) / |a|^2`` and the worst basis index."""
    alg = inner_ideal(a) if alg is None else alg
    A = L_op(a, a).A
    W = alg.W
    resid = np.linalg.norm(A - W @ (W.conj().T @ A), axis=0)
    k = int(resid.argmax())
    return float(resid[k]) / a.norm() ** 2, k


def check_Laa_in_Ea(a, tol=None):
    """Whether the range of ``L(a, a)`` lies in ``E(a)``."""
    tol = a.space.tol if tol is None else tol
    return laa_defect(a)[0] <= tol


def _interleave(x):
    z = np.asarray(x.coords)
    return [float(v) for pair in zip(z.real, z.imag) for v in pair]


@dataclass
class CommutativityReport:
    """Per-item verdicts over sampled tripotents and generators.

    Item keys follow the numbering of the commutativity characterization
    they test; ``xii`` and ``xiii`` record only the associativity and
    nilpotent parts so they can disagree with ``i`` (Hilbert spaces).
    """

    items: dict
    witnesses: dict = field(default_factory=dict)
    n_tripotents: int = 0
    n_complete: int = 0
    n_generators: int = 0

    def to_dict(self):
        return {
            "items": dict(self.items),
            "witnesses": self.witnesses,
            "n_tripotents": self.n_tripotents,
            "n_complete": self.n_complete,
            "n_generators": self.n_generators,
        }


def _inconsistent(msg):
    raise InconsistentCharacterization(msg)


def commutativity_report(space, tol=None, seed=0, n_tripotents=32, n_random_generators=4):
    """Evaluate the finite-dimensional commutativity criteria and check they agree."""
    tol = space.tol if tol is None else tol
    rng = np.random.default_rng(seed)
    witnesses = {}

    defect, where = commutativity_defect(space)
    item_i = defect <= tol
    if not item_i:
        witnesses["i"] = {"basis_quadruple": list(where), "commutator_norm": defect}

    # tripotent sample: range tripotents of basis elements plus completed random ones
    trips = [range_tripotent(b) for b in space.basis_elements()]
    while len(trips) < n_tripotents and len(trips) < space.dim + 8:
        trips.append(complete_tripotent(space, rng))
    trips = trips[:n_tripotents]
    item_ix = item_x = item_xi = True
    n_complete = 0
    for v in trips:
        ps = peirce(v)
        p1_zero = np.abs(ps.P1.A).max(initial=0.0) <= tol
        complete = np.abs(ps.P0.A).max(initial=0.0) <= tol
        alg = inner_ideal(v)
        assoc = alg.is_associative(tol)
        cert = find_2nilpotent(alg, tol, seed=seed)
        if assoc != (cert is None):
            _inconsistent("associativity and nilpotent search disagree on a Peirce-2 space")
        if not (assoc and p1_zero):
            if item_ix:
                witnesses["ix"] = {"tripotent": _interleave(v), "associative": assoc,
                                   "P1_zero": bool(p1_zero)}
            item_ix = False
        if complete:
            n_complete += 1
            if not (assoc and p1_zero):
                if item_x:
                    witnesses["x"] = {"tripotent": _interleave(v)}
                item_x = False
            if not (cert is None and p1_zero):
                if item_xi:
                    witnesses["xi"] = {"tripotent": _interleave(v)}
                    if cert is not None:
                        witnesses["xi"]["nilpotent"] = _interleave(cert.element)
                item_xi = False
    if n_complete == 0:
        raise InternalError("tripotent sample contains no complete tripotent")

    gens = space.basis_elements()
    gens += [space.random_element(rng) for _ in range(n_random_generators)]
    gens += [v for v in trips if v.norm() > 0]
    item_xii = item_xiii = item_xiv = True
    for a in gens:
        alg = inner_ideal(a)
        assoc = alg.is_associative(tol)
        cert = find_2nilpotent(alg, tol, seed=seed)
        if assoc != (cert is None):
            _inconsistent("associativity and nilpotent search disagree on an inner ideal")
        laa, k = laa_defect(a, alg)
        if not assoc and item_xii:
            witnesses["xii"] = {"generator": _interleave(a)}
            item_xii = False
        if cert is not None and item_xiii:
            witnesses["xiii"] = {"generator": _interleave(a), "nilpotent": _interleave(cert.element),
                                 "residual": cert.residual}
            item_xiii = False
        if laa > tol and item_xiv:
            witnesses["xiv"] = {"generator": _interleave(a), "basis_index": k, "defect": laa}
            item_xiv = False

    items = {
        "i": bool(item_i), "ix": bool(item_ix), "x": bool(item_x), "xi": bool(item_xi),
        "xii": bool(item_xii), "xiii": bool(item_xiii), "xiv": bool(item_xiv),
    }
    if items["i"] != items["xiv"]:
        _inconsistent(f"(i)={items['i']} but (xiv)={items['xiv']}")
    if (items["xii"] and items["xiv"]) != items["i"]:
        _inconsistent("(xii) and (xiv) together do not match (i)")
    if items["xii"] != items["xiii"]:
        _inconsistent("(xii) and (xiii) disagree")
    if not items["xiii"] and items["i"]:
        _inconsistent("a 2-nilpotent exists in a commutative triple")
    for key in ("ix", "x", "xi"):
        if items[key] != items["i"]:
            _inconsistent(f"({key})={items[key]} but (i)={items['i']}")
    return CommutativityReport(items, witnesses, len(trips), n_complete, len(gens))


@dataclass(frozen=True, eq=False)
class TOperator:
    """``T = L(b, c) + L(c, b#)`` together with the elements used to build it."""

    operator: RealLinearOperator
    b: Element
    unit: Element
    b_star: Element
    c: Element
    b_cube: Element
    range_c: Element


def build_T_operator(a, b, tol=None):
    """Build ``T = L(b, c) + L(c, b#)`` with ``c = b o b#`` in ``E(a)``.

    ``b`` must be a 2-nilpotent of ``E(a)``; it is rescaled to norm one.
    Along the way this checks that ``c = {b, b, r(a)}`` is nonzero and positive
    in ``E(a)``, that ``{b,b,b} = 2 b o c`` and that ``{b,b,b}`` is 2-nilpotent
    in ``E(c)``.
    """
    tol = a.space.tol if tol is None else tol
    alg = inner_ideal(a)
    if not alg.contains(b, tol):
        raise InputError("b does not lie in E(a)")
    nb = b.norm()
    if nb == 0:
        raise NotNilpotent("b is zero")
    b = b / nb
    r = alg.unit
    res = triple_product(b, r, b).norm()
    if res > tol:
        raise NotNilpotent(f"{{b, r(a), b}} has norm {res:.3g}")
    b_star = alg.involution(b)
    c = alg.product(b, b_star)
    if (c - triple_product(b, b, r)).norm() > tol:
        raise InternalError("b o b# differs from {b, b, r(a)}")
    if c.norm() <= tol or not alg.is_positive(c, tol):
        raise InternalError("c = b o b# is not a nonzero positive element")
    op = L_op(b, c) + L_op(c, b_star)
    b_cube = triple_product(b, b, b)
    if (b_cube - 2 * alg.product(b, c)).norm() > tol:
        raise InternalError("{b,b,b} differs from 2 b o c")
    r_c = range_tripotent(c)
    alg_c = inner_ideal(c)
    if not alg_c.contains(b_cube, tol):
        raise InternalError("b^[3] is not in E(c)")
    if triple_product(b_cube, r_c, b_cube).norm() > tol:
        raise InternalError("b^[3] is not 2-nilpotent in E(c)")
    return TOperator(op, b, r, b_star, c, b_cube, r_c)


def nilpotent_L_operator(b, e, tol=None):
    """``L(b, e)`` for a 2-nilpotent ``b`` of the Peirce-2 algebra of the tripotent ``e``."""
    tol = e.space.tol if tol is None else tol
    ps = peirce(e)
    if (ps.P2(b) - b).norm() > tol * max(1.0, b.norm()):
        raise InputError("b is not in the Peirce-2 space of e")
    if triple_product(b, e, b).norm() > tol * max(1.0, b.norm() ** 2):
        raise NotNilpotent("{b, e, b} is not zero")
    return L_op(b, e)


def generated_subalgebra_dim(alg, b, rank_tol=RANK_TOL):
    """Dimension of the *-subalgebra of ``E(a)`` generated by ``b``."""
    elems = [b, alg.involution(b)]
    W = np.zeros((alg.parent.dim, 0), dtype=complex)
    for _ in range(8):
        new = list(elems)
        for x in elems:
            new.append(alg.involution(x))
            for y in elems:
                new.append(alg.product(x, y))
        M = np.array([x.coords for x in new]).T
        u, s, _ = np.linalg.svd(M)
        rank = int((s > rank_tol * max(s[0], 1e-300)).sum())
        if rank == W.shape[1]:
            break
        W = u[:, :rank]
        elems = [alg.parent.element(c) for c in W.T]
    return W.shape[1]


def q3_table_residual(alg, b):
    """Deviation of ``b, b#, 2 b o b#`` from the product table of ``E21, E12, I`` in Q3.

    ``b`` is rescaled to norm one; meaningful when ``b`` has a single nonzero
    singular value.
    """
    b = b / b.norm()
    bs = alg.involution(b)
    one = 2 * alg.product(b, bs)
    prod, inv = alg.product, alg.involution
    checks = [
        prod(b, b),                      # E21 o E21 = 0
        prod(bs, bs),                    # E12 o E12 = 0
        prod(b, bs) - 0.5 * one,         # E21 o E12 = I/2
        prod(one, b) - b,                # I o E21 = E21
        prod(one, bs) - bs,              # I o E12 = E12
        prod(one, one) - one,            # I o I = I
        inv(bs) - b,                     # (E12)* = E21
        inv(one) - one,                  # I* = I
    ]
    return max(x.norm() for x in checks)
