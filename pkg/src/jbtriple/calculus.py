"""Odd functional calculus on single elements via the singular value decomposition.

For ``x = U diag(s) V*`` the calculus maps an odd continuous ``f`` to
``U diag(f(s)) V*``.  Singular values closer than ``cluster_tol * s_max``
are replaced by their cluster mean first, so the result does not depend on
how LAPACK splits a repeated singular value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RANK_TOL, Element, peirce, triple_product
from .exceptions import InternalError, ResultLeftSpace, ZeroElement

__all__ = [
    "TripleSpectrum", "triple_spectrum", "odd_calculus", "cubic_root",
    "range_tripotent", "iterated_cubic_root", "is_positive_in_peirce2",
    "complete_tripotent",
]


@dataclass(frozen=True)
class TripleSpectrum:
    values: tuple
    rank_threshold: float

    @property
    def nonzero(self):
        return tuple(v for v in self.values if v > self.rank_threshold)


def _svd(mat):
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    return u, s, vh


def _cluster(s, cluster_tol):
    """Replace near-equal singular values (relative to the largest) by their mean."""
    s = s.copy()
    if s.size == 0 or s[0] == 0:
        return s
    gap = cluster_tol * s[0]
    start = 0
    for i in range(1, s.size + 1):
        if i == s.size or s[i - 1] - s[i] > gap:
            s[start:i] = s[start:i].mean()
            start = i
    return s


def triple_spectrum(x, rank_tol=RANK_TOL):
    """Singular values of ``x`` in nonincreasing order."""
    s = np.linalg.svd(x.matrix, compute_uv=False)
    top = float(s[0]) if s.size else 0.0
    return TripleSpectrum(tuple(float(v) for v in s), rank_tol * top)


def odd_calculus(x, f, cluster_tol=RANK_TOL, tol=None):
    """Apply the odd function ``f`` (vectorized over nonnegative reals) to ``x``."""
    space = x.space
    tol = space.tol if tol is None else tol
    u, s, vh = _svd(x.matrix)
    s = _cluster(s, cluster_tol)
    fs = np.asarray(f(s), dtype=float)
    fs = np.where(s > 0, fs, 0.0)
    mat = (u * fs) @ vh
    res = space.residual(mat)
    if res > tol * max(1.0, float(np.linalg.norm(mat))):
        raise ResultLeftSpace(f"functional calculus left the space (residual {res:.3g})")
    return Element(space, space.coords_of(mat))


def cubic_root(x):
    """The unique ``y`` in the subtriple generated by ``x`` with ``{y, y, y} = x``."""
    return odd_calculus(x, np.cbrt)


def range_tripotent(x, rank_tol=RANK_TOL, strict=False):
    """Polar partial isometry of ``x`` over singular values above ``rank_tol * s_max``.

    A zero ``x`` gives the zero tripotent, or :class:`ZeroElement` when ``strict``.
    """
    space = x.space
    s = np.linalg.svd(x.matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        if strict:
            raise ZeroElement("range tripotent of the zero element")
        return space.zero()
    cut = rank_tol * s[0]
    r = odd_calculus(x, lambda t: (t > cut).astype(float), cluster_tol=rank_tol)
    if (triple_product(r, r, r) - r).norm() > space.tol:
        raise InternalError("range tripotent is not a tripotent")
    return r


def iterated_cubic_root(x, n_iter=20):
    """``x^[1/3^n]``; converges to ``range_tripotent(x)`` as ``n`` grows."""
    y = x
    for _ in range(n_iter):
        y = cubic_root(y)
    return y


def is_positive_in_peirce2(x, e, tol=None):
    """Whether ``x`` lies in the Peirce-2 algebra of ``e`` with nonnegative spectrum.

    Uses the compression ``U_e* x V_e`` onto the initial and final spaces of ``e``,
    which must be Hermitian positive semidefinite.
    """
    space = x.space
    tol = space.tol if tol is None else tol
    ps = peirce(e)
    if (ps.P2(x) - x).norm() > tol * max(1.0, x.norm()):
        return False
    u, s, vh = _svd(e.matrix)
    keep = s > 0.5
    comp = u[:, keep].conj().T @ x.matrix @ vh[keep].conj().T
    if np.abs(comp - comp.conj().T).max(initial=0.0) > tol * max(1.0, x.norm()):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (comp + comp.conj().T)).min(initial=0.0) >= -tol)


def complete_tripotent(space, rng, max_rounds=None):
    """A complete tripotent (``P0 = 0``) grown from range tripotents of random elements.

    Each round adds the range tripotent of a random element of the current
    Peirce-0 space, which is orthogonal to what has been collected so far.
    """
    v = range_tripotent(space.random_element(rng))
    for _ in range(max_rounds or space.dim):
        P0 = peirce(v).P0
        if np.abs(P0.A).max(initial=0.0) <= space.tol:
            return v
        v = v + range_tripotent(P0(space.random_element(rng)))
    raise InternalError("failed to complete a tripotent")
