"""Concrete finite-dimensional JB*-triples realized as spaces of complex matrices.

Every space is a subspace of some ``m x n`` matrix space, closed under the
triple product ``{x, y, z} = (x y* z + z y* x) / 2`` and normed by the operator
(spectral) norm.  Elements are stored as coordinate vectors over a basis that
is orthonormal for the trace pairing ``<X, Y> = tr(Y* X)``, so coordinates are
recovered from an ambient matrix by pairing against the basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .exceptions import (
    DegenerateBasis,
    InputError,
    InternalError,
    NotATripotent,
    NotUnitary,
    SpaceMismatch,
    SubspaceNotClosed,
)

DEFAULT_TOL = 1e-8
RANK_TOL = 1e-10

__all__ = [
    "Rectangular", "Symmetric", "Antisymmetric", "Diagonal", "Q3", "Subspace",
    "DirectSum", "FactorSpec", "TripleSpace", "Element", "RealLinearOperator",
    "PeirceSystem", "build_space", "triple_product", "L_op", "Q_op",
    "jordan_product", "jordan_multiplication", "left_multiplication",
    "right_multiplication", "is_tripotent", "is_orthogonal", "peirce",
    "is_commutative", "commutativity_defect", "is_associative_jb_algebra",
    "peirce_arithmetic_residual", "DEFAULT_TOL",
]


def _positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InputError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class Rectangular:
    """All ``p x q`` complex matrices (type 1 Cartan factor).

    ``Rectangular(1, n)`` is the n-dimensional Hilbert space.
    """

    p: int
    q: int

    def __post_init__(self):
        _positive_int(self.p, "p")
        _positive_int(self.q, "q")


@dataclass(frozen=True)
class Symmetric:
    n: int

    def __post_init__(self):
        _positive_int(self.n, "n")


@dataclass(frozen=True)
class Antisymmetric:
    n: int

    def __post_init__(self):
        _positive_int(self.n, "n")
        if self.n < 2:
            raise InputError("Antisymmetric(n) needs n >= 2")


@dataclass(frozen=True)
class Diagonal:
    n: int

    def __post_init__(self):
        _positive_int(self.n, "n")


@dataclass(frozen=True)
class Q3:
    """2x2 matrices with equal diagonal entries."""


@dataclass(frozen=True)
class Subspace:
    """Span of ``basis`` (coordinate vectors over the parent's basis)."""

    parent: "FactorSpec"
    basis: tuple

    def __post_init__(self):
        rows = tuple(tuple(complex(c) for c in row) for row in self.basis)
        if not rows:
            raise InputError("Subspace needs at least one basis vector")
        object.__setattr__(self, "basis", rows)


@dataclass(frozen=True)
class DirectSum:
    """Block-diagonal (l-infinity) sum of its members."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InputError("DirectSum needs at least one member")
        object.__setattr__(self, "members", members)


FactorSpec = Union[Rectangular, Symmetric, Antisymmetric, Diagonal, Q3, Subspace, DirectSum]


def _unit(shape, i, j):
    out = np.zeros(shape, dtype=complex)
    out[i, j] = 1.0
    return out


def _canonical_basis(spec):
    """Return (basis array of shape (d, m, n), blocks) for a spec."""
    if isinstance(spec, Rectangular):
        shape = (spec.p, spec.q)
        mats = [_unit(shape, i, j) for i in range(spec.p) for j in range(spec.q)]
    elif isinstance(spec, Diagonal):
        shape = (spec.n, spec.n)
        mats = [_unit(shape, i, i) for i in range(spec.n)]
    elif isinstance(spec, Symmetric):
        shape = (spec.n, spec.n)
        mats = []
        for i in range(spec.n):
            for j in range(i, spec.n):
                if i == j:
                    mats.append(_unit(shape, i, i))
                else:
                    mats.append((_unit(shape, i, j) + _unit(shape, j, i)) / np.sqrt(2))
    elif isinstance(spec, Antisymmetric):
        shape = (spec.n, spec.n)
        mats = [
            (_unit(shape, i, j) - _unit(shape, j, i)) / np.sqrt(2)
            for i in range(spec.n)
            for j in range(i + 1, spec.n)
        ]
    elif isinstance(spec, Q3):
        shape = (2, 2)
        mats = [np.eye(2, dtype=complex) / np.sqrt(2), _unit(shape, 0, 1), _unit(shape, 1, 0)]
    else:
        raise InputError(f"unknown factor spec {spec!r}")
    return np.array(mats), None


def _orthonormalize(mats, rank_tol=RANK_TOL):
    d = mats.shape[0]
    flat = mats.reshape(d, -1).T
    q, r = np.linalg.qr(flat)
    diag = np.abs(np.diag(r))
    scale = np.linalg.norm(flat, axis=0).max()
    if scale == 0 or diag.min() <= rank_tol * scale:
        raise DegenerateBasis(f"subspace basis of {d} vectors is linearly dependent")
    # keep each direction's phase so the first basis vector is a positive multiple of the input
    phases = np.diag(r) / diag
    q = q * phases
    return q.T.reshape(mats.shape)


def _triple_products_all(basis):
    """Ambient matrices {b_i, b_j, b_k} for all index triples, shape (d, d, d, m, n)."""
    bh = np.conj(np.swapaxes(basis, -1, -2))
    left = np.einsum("iab,jbc->ijac", basis, bh)          # b_i b_j*
    right = np.einsum("jab,ibc->jiac", bh, basis)          # b_j* b_i
    t1 = np.einsum("ijab,kbc->ijkac", left, basis)          # b_i b_j* b_k
    t2 = np.einsum("kab,jibc->ijkac", basis, right)         # b_k b_j* b_i
    return 0.5 * (t1 + t2)


class TripleSpace:
    """A finite-dimensional JC*-triple given by an orthonormal matrix basis.

    Instances are immutable; build them with :func:`build_space`.
    """

    def __init__(self, spec, basis, tol=DEFAULT_TOL, blocks=None):
        basis = np.array(basis, dtype=complex)
        basis.setflags(write=False)
        self.spec = spec
        self.basis = basis
        self.tol = float(tol)
        self.blocks = blocks

    def __repr__(self):
        return f"TripleSpace({self.spec!r}, dim={self.dim})"

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def shape(self):
        return self.basis.shape[1:]

    @cached_property
    def _flat_basis(self):
        return self.basis.reshape(self.dim, -1)

    def to_matrix(self, coords):
        return np.tensordot(np.asarray(coords), self.basis, axes=([-1], [0]))

    def coords_of(self, mat):
        """Trace-pairing coordinates of an ambient matrix (or stack of matrices)."""
        mat = np.asarray(mat, dtype=complex)
        flat = mat.reshape(mat.shape[:-2] + (-1,))
        return flat @ np.conj(self._flat_basis).T

    def residual(self, mat):
        """Frobenius distance of an ambient matrix from the span of the basis."""
        mat = np.asarray(mat, dtype=complex)
        return float(np.linalg.norm(mat - self.to_matrix(self.coords_of(mat))))

    def element(self, coords):
        return Element(self, coords)

    def from_matrix(self, mat, tol=None):
        """Element with ambient matrix ``mat``; raises if ``mat`` is not in the space."""
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != self.shape:
            raise InputError(f"matrix shape {mat.shape} != ambient shape {self.shape}")
        tol = self.tol if tol is None else tol
        res = self.residual(mat)
        if res > tol * max(1.0, float(np.linalg.norm(mat))):
            raise InputError(f"matrix is not in the space (residual {res:.3g})")
        return Element(self, self.coords_of(mat))

    def zero(self):
        return Element(self, np.zeros(self.dim, dtype=complex))

    def basis_element(self, k):
        coords = np.zeros(self.dim, dtype=complex)
        coords[k] = 1.0
        return Element(self, coords)

    def basis_elements(self):
        return [self.basis_element(k) for k in range(self.dim)]

    def random_element(self, rng):
        """Standard complex Gaussian coordinates."""
        z = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return Element(self, z / np.sqrt(2))

    def norm(self, x):
        _check_space(self, x)
        return float(np.linalg.norm(x.matrix, 2)) if self.dim else 0.0

    def closure_residual(self):
        """Largest distance of a basis triple product from the span."""
        prods = _triple_products_all(self.basis)
        flat = prods.reshape(-1, *self.shape)
        proj = self.to_matrix(self.coords_of(flat))
        return float(np.abs(flat - proj).max()) if flat.size else 0.0


def _check_space(space, *elements):
    for x in elements:
        if not isinstance(x, Element):
            raise InputError(f"expected an Element, got {type(x).__name__}")
        if x.space is not space:
            raise SpaceMismatch("operands belong to different spaces")


def _same_space(*elements):
    space = elements[0].space
    _check_space(space, *elements)
    return space


@dataclass(frozen=True, eq=False)
class Element:
    """Coordinate vector over a :class:`TripleSpace` basis."""

    space: TripleSpace
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=complex).reshape(-1)
        if coords.shape[0] != self.space.dim:
            raise InputError(
                f"coordinate length {coords.shape[0]} != space dimension {self.space.dim}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def matrix(self):
        return self.space.to_matrix(self.coords)

    def norm(self):
        return self.space.norm(self)

    def __add__(self, other):
        _check_space(self.space, other)
        return Element(self.space, self.coords + other.coords)

    def __sub__(self, other):
        _check_space(self.space, other)
        return Element(self.space, self.coords - other.coords)

    def __neg__(self):
        return Element(self.space, -self.coords)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return Element(self.space, complex(scalar) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Element(self.space, self.coords / complex(scalar))

    def conj_coords(self):
        return np.conj(self.coords)

    def __repr__(self):
        return f"Element(dim={self.space.dim}, coords={np.round(self.coords, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class RealLinearOperator:
    """The real-linear map ``x -> A x + B conj(x)`` in coordinates."""

    space: TripleSpace
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        d = self.space.dim
        A = np.array(self.A, dtype=complex)
        B = np.array(self.B, dtype=complex)
        if A.shape != (d, d) or B.shape != (d, d):
            raise InputError(f"operator matrices must be {d}x{d}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @classmethod
    def identity(cls, space):
        d = space.dim
        return cls(space, np.eye(d), np.zeros((d, d)))

    @classmethod
    def zero(cls, space):
        d = space.dim
        return cls(space, np.zeros((d, d)), np.zeros((d, d)))

    @classmethod
    def from_matrix(cls, space, A):
        """Complex-linear operator with coordinate matrix ``A``."""
        return cls(space, A, np.zeros_like(np.asarray(A, dtype=complex)))

    def __call__(self, x):
        _check_space(self.space, x)
        return Element(self.space, self.A @ x.coords + self.B @ np.conj(x.coords))

    def apply_coords(self, z):
        """Apply to a coordinate vector or a stack of them (last axis)."""
        z = np.asarray(z)
        return z @ self.A.T + np.conj(z) @ self.B.T

    def __matmul__(self, other):
        if not isinstance(other, RealLinearOperator):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatch("operators act on different spaces")
        A = self.A @ other.A + self.B @ np.conj(other.B)
        B = self.A @ other.B + self.B @ np.conj(other.A)
        return RealLinearOperator(self.space, A, B)

    def __add__(self, other):
        if other.space is not self.space:
            raise SpaceMismatch("operators act on different spaces")
        return RealLinearOperator(self.space, self.A + other.A, self.B + other.B)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        s = complex(scalar)
        return RealLinearOperator(self.space, s * self.A, s * self.B)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1) * self

    def matrix_norm(self):
        """Coordinate size ``||A||_2 + ||B||_2``, used for zero tests."""
        return float(np.linalg.norm(self.A, 2) + np.linalg.norm(self.B, 2))

    def is_complex_linear(self, tol=DEFAULT_TOL):
        return float(np.abs(self.B).max(initial=0.0)) <= tol

    def is_conjugate_linear(self, tol=DEFAULT_TOL):
        return float(np.abs(self.A).max(initial=0.0)) <= tol


def build_space(spec, tol=DEFAULT_TOL):
    """Realize ``spec`` as a validated :class:`TripleSpace`."""
    if isinstance(spec, Subspace):
        parent = build_space(spec.parent, tol)
        vecs = np.array(spec.basis, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[1] != parent.dim:
            raise InputError(
                f"subspace basis vectors must have length {parent.dim} (parent dimension)"
            )
        mats = _orthonormalize(parent.to_matrix(vecs))
        space = TripleSpace(spec, mats, tol)
        res = space.closure_residual()
        if res > tol:
            raise SubspaceNotClosed(
                f"span is not closed under the triple product (residual {res:.3g})"
            )
        return space
    if isinstance(spec, DirectSum):
        members = [build_space(m, tol) for m in spec.members]
        rows = sum(m.shape[0] for m in members)
        cols = sum(m.shape[1] for m in members)
        mats, blocks = [], []
        r0 = c0 = 0
        for m in members:
            r1, c1 = r0 + m.shape[0], c0 + m.shape[1]
            blocks.append((slice(r0, r1), slice(c0, c1)))
            for b in m.basis:
                big = np.zeros((rows, cols), dtype=complex)
                big[r0:r1, c0:c1] = b
                mats.append(big)
            r0, c0 = r1, c1
        return TripleSpace(spec, np.array(mats), tol, blocks=tuple(blocks))
    mats, blocks = _canonical_basis(spec)
    space = TripleSpace(spec, mats, tol, blocks)
    res = space.closure_residual()
    if res > tol:  # pragma: no cover - canonical bases are closed
        raise InternalError(f"canonical basis for {spec!r} not closed ({res:.3g})")
    return space


def _tp_matrix(x, y, z):
    yh = np.conj(np.swapaxes(y, -1, -2))
    return 0.5 * (x @ yh @ z + z @ yh @ x)


def triple_product(x, y, z):
    """``{x, y, z}``: linear in ``x`` and ``z``, conjugate-linear in ``y``."""
    space = _same_space(x, y, z)
    return Element(space, space.coords_of(_tp_matrix(x.matrix, y.matrix, z.matrix)))


def L_op(a, b):
    """The complex-linear operator ``x -> {a, b, x}``."""
    space = _same_space(a, b)
    am, bm = a.matrix, b.matrix
    left = am @ np.conj(bm.T)
    right = np.conj(bm.T) @ am
    images = 0.5 * (left @ space.basis + space.basis @ right)
    A = space.coords_of(images).T
    return RealLinearOperator(space, A, np.zeros_like(A))


def Q_op(a, b=None):
    """The conjugate-linear operator ``x -> {a, x, b}``; ``Q_op(a)`` is ``Q(a, a)``."""
    if b is None:
        b = a
    space = _same_space(a, b)
    am, bm = a.matrix, b.matrix
    bh = np.conj(np.swapaxes(space.basis, -1, -2))
    images = 0.5 * (am @ bh @ bm + bm @ bh @ am)
    B = space.coords_of(images).T
    return RealLinearOperator(space, np.zeros_like(B), B)


def jordan_product(x, y, unit):
    """``x o y = {x, unit, y}`` in the Peirce-2 algebra of ``unit``."""
    return triple_product(x, unit, y)


def jordan_multiplication(b, unit):
    """``M_b = L(b, unit)``, multiplication by ``b`` in the Peirce-2 algebra of ``unit``."""
    return L_op(b, unit)


def _one_sided(space, bm, side):
    rows, cols = space.shape
    if rows != cols:
        raise InputError("one-sided multiplication needs a square ambient space")
    images = bm @ space.basis if side == "left" else space.basis @ bm
    res = max(space.residual(m) for m in images)
    if res > space.tol:
        raise InputError(f"space is not invariant under {side} multiplication")
    A = space.coords_of(images).T
    return RealLinearOperator(space, A, np.zeros_like(A))


def left_multiplication(b):
    """``x -> b x`` (associative matrix product); the space must be invariant."""
    return _one_sided(b.space, b.matrix, "left")


def right_multiplication(b):
    """``x -> x b`` (associative matrix product); the space must be invariant."""
    return _one_sided(b.space, b.matrix, "right")


def is_tripotent(e, tol=None):
    tol = e.space.tol if tol is None else tol
    return (triple_product(e, e, e) - e).norm() <= tol


def is_orthogonal(a, b, tol=None):
    """``L(a, b) = 0``, cross-checked against ``{a,a,b} = 0`` and ``{b,b,a} = 0``."""
    space = _same_space(a, b)
    tol = space.tol if tol is None else tol
    na, nb = a.norm(), b.norm()
    # below the rank threshold an element is zero and its direction is roundoff
    if na <= RANK_TOL or nb <= RANK_TOL:
        return True
    l_def = L_op(a, b).matrix_norm() / (na * nb)
    aab = triple_product(a, a, b).norm() / (na * na * nb)
    bba = triple_product(b, b, a).norm() / (nb * nb * na)
    verdict = l_def <= tol
    loose = np.sqrt(tol)
    for other in (aab, bba):
        if (verdict and other > loose) or (not verdict and other <= tol and l_def > loose):
            raise InternalError(
                f"orthogonality reformulations disagree: |L(a,b)|={l_def:.3g}, "
                f"|{{a,a,b}}|={aab:.3g}, |{{b,b,a}}|={bba:.3g}"
            )
    return verdict


@dataclass(frozen=True, eq=False)
class PeirceSystem:
    """Peirce projections of a tripotent; ``P2 + P1 + P0`` is the identity."""

    tripotent: Element
    P2: RealLinearOperator
    P1: RealLinearOperator
    P0: RealLinearOperator

    @property
    def projections(self):
        return {2: self.P2, 1: self.P1, 0: self.P0}

    @property
    def ranks(self):
        return tuple(int(round(np.trace(p.A).real)) for p in (self.P2, self.P1, self.P0))

    def subspace_basis(self, k):
        """Orthonormal coordinate basis (columns) of the Peirce-k space."""
        P = self.projections[k].A
        w, v = np.linalg.eigh(0.5 * (P + P.conj().T))
        return v[:, w > 0.5]

    def component(self, x, k):
        return self.projections[k](x)


def _eigen_projections(L):
    """Projections onto eigenspaces of a Hermitian matrix for eigenvalues 1, 1/2, 0."""
    w, v = np.linalg.eigh(0.5 * (L + L.conj().T))
    targets = np.array([1.0, 0.5, 0.0])
    idx = np.abs(w[:, None] - targets[None, :]).argmin(axis=1)
    dist = np.abs(w - targets[idx]).max(initial=0.0)
    out = []
    for k in range(3):
        cols = v[:, idx == k]
        out.append(cols @ cols.conj().T)
    return out, dist


def peirce(e, tol=None):
    """Peirce projections of the tripotent ``e`` from ``L(e, e)`` by Lagrange interpolation.

    The polynomial projections are cross-checked against the eigenspace
    projections of ``L(e, e)``.
    """
    space = e.space
    tol = space.tol if tol is None else tol
    defect = (triple_product(e, e, e) - e).norm()
    if defect > tol:
        raise NotATripotent(f"{{e,e,e}} - e has norm {defect:.3g}")
    L = L_op(e, e).A
    eye = np.eye(space.dim)
    P2 = L @ (2 * L - eye)
    P1 = 4 * L @ (eye - L)
    P0 = (eye - L) @ (eye - 2 * L)
    eig, dist = _eigen_projections(L)
    mismatch = max(np.abs(p - q).max(initial=0.0) for p, q in zip((P2, P1, P0), eig))
    if dist > 1e-6 or mismatch > max(1e-8, 10 * defect):
        raise InternalError(
            f"Peirce projections disagree with eigenprojections ({mismatch:.3g})"
        )
    ops = [RealLinearOperator.from_matrix(space, P) for P in (P2, P1, P0)]
    return PeirceSystem(e, *ops)


def peirce_arithmetic_residual(ps):
    """Worst violation of Peirce arithmetic over eigenbasis triples.

    Checks ``{E_i, E_j, E_k}`` lies in ``E_{i-j+k}`` (zero when the index falls
    outside 0..2) and ``{E_2, E_0, E} = {E_0, E_2, E} = 0``.
    """
    space = ps.tripotent.space
    bases = {k: [space.element(c) for c in ps.subspace_basis(k).T] for k in (0, 1, 2)}
    worst = 0.0
    for i in (0, 1, 2):
        for j in (0, 1, 2):
            for k in (0, 1, 2):
                target = i - j + k
                for x in bases[i]:
                    for y in bases[j]:
                        for z in bases[k]:
                            p = triple_product(x, y, z)
                            if target in (0, 1, 2):
                                bad = p - ps.projections[target](p)
                            else:
                                bad = p
                            worst = max(worst, bad.norm())
    everything = space.basis_elements()
    for i, j in ((2, 0), (0, 2)):
        for x in bases[i]:
            for y in bases[j]:
                for z in everything:
                    worst = max(worst, triple_product(x, y, z).norm())
    return worst


def _basis_L_stack(space):
    """Coordinate matrices of ``L(b_i, b_j)`` for all basis pairs, shape (d*d, d, d)."""
    d = space.dim
    prods = _triple_products_all(space.basis)  # [i, j, k] -> {b_i, b_j, b_k}
    coords = space.coords_of(prods)            # (d, d, d, d): [i, j, k, l]
    return np.swapaxes(coords, -1, -2).reshape(d * d, d, d)


def _max_commutator(stack):
    worst, where = 0.0, None
    for p in range(stack.shape[0]):
        comm = stack[p] @ stack - stack @ stack[p]
        norms = np.linalg.norm(comm, axis=(1, 2))
        q = int(norms.argmax()) if norms.size else 0
        if norms.size and norms[q] > worst:
            worst, where = float(norms[q]), (p, q)
    return worst, where


def commutativity_defect(space):
    """Largest Frobenius norm of ``[L(b_i,b_j), L(b_k,b_l)]`` over basis quadruples.

    Returns ``(value, (i, j, k, l))``; the index tuple is ``None`` when the value is 0.
    """
    if space.dim == 0:
        return 0.0, None
    worst, where = _max_commutator(_basis_L_stack(space))
    if where is None:
        return worst, None
    d = space.dim
    p, q = where
    return worst, (p // d, p % d, q // d, q % d)


def is_commutative(space, tol=None):
    """True iff all operators ``L(a, b)`` commute (checked on basis quadruples)."""
    tol = space.tol if tol is None else tol
    return commutativity_defect(space)[0] <= tol


def is_associative_jb_algebra(space, unit, tol=None):
    """True iff the Jordan multiplications ``x -> {b_i, unit, x}`` pairwise commute.

    ``unit`` must be a unitary tripotent (its Peirce-2 projection is the identity).
    """
    _check_space(space, unit)
    tol = space.tol if tol is None else tol
    ps = peirce(unit)
    if np.abs(ps.P2.A - np.eye(space.dim)).max(initial=0.0) > tol:
        raise NotUnitary("tripotent is not unitary: Peirce-2 projection is not the identity")
    stack = np.array([L_op(b, unit).A for b in space.basis_elements()])
    return _max_commutator(stack)[0] <= tol
