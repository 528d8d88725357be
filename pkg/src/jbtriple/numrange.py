"""Spatial numerical range, numerical radius and operator norm on matrix-realized triples.

Only a norm oracle is used.  For a unit ``x = U diag(s) V*`` with top singular
cluster ``U1, V1`` the right derivative of ``t -> |x + t y|`` at ``0`` is the
largest eigenvalue of the Hermitian part of ``U1* y V1``; the supremum of
``Re(e^{i theta} phi(T x))`` over norming functionals ``phi`` of ``x`` is that
derivative with ``y = e^{i theta} T x``.  Every value produced here is
attained by an explicit norming pair, so all optimizer outputs are lower bounds.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import range_tripotent
from .core import RANK_TOL, Element, L_op, RealLinearOperator, is_commutative, peirce
from .exceptions import InputError, NotUnitVector, OracleMismatch, SearchFailed

__all__ = [
    "RadiusEstimate", "IndexEstimate", "space_norm", "dir_derivative",
    "dir_derivative_fd", "numerical_radius", "operator_norm",
    "numerical_index_estimate", "numerical_range_sample", "write_range_csv",
    "radius_at",
]

DEFAULT_STARTS = 64
DEFAULT_STEPS = 200
_GOLDEN = (math.sqrt(5) - 1) / 2


def space_norm(x):
    """Operator norm of the ambient matrix; for block-diagonal sums this is the max over blocks."""
    return x.norm()


def _top_cluster(mat, cluster_tol=RANK_TOL):
    u, s, vh = np.linalg.svd(mat)
    k = int((s >= s[0] * (1 - cluster_tol)).sum()) if s[0] > 0 else s.size
    return u[:, :k], s, vh[:k].conj().T


def _hermitian_top(D):
    return float(np.linalg.eigvalsh(0.5 * (D + D.conj().T))[-1])


def dir_derivative(x, y, check=True, cluster_tol=RANK_TOL):
    """Right derivative of ``t -> |x + t y|`` at ``0`` for a unit vector ``x``.

    With ``check`` the value is compared against :func:`dir_derivative_fd`.
    """
    if abs(x.norm() - 1.0) > 1e-8:
        raise NotUnitVector(f"|x| = {x.norm():.12g}")
    u1, _, v1 = _top_cluster(x.matrix, cluster_tol)
    value = _hermitian_top(u1.conj().T @ y.matrix @ v1)
    if check:
        oracle = dir_derivative_fd(x, y)
        if abs(oracle - value) > 1e-5 * max(1.0, y.norm()):
            raise OracleMismatch(f"exact {value:.10g} vs finite difference {oracle:.10g}")
    return value


def dir_derivative_fd(x, y, h=1e-4, gap=1e-3):
    """Richardson-extrapolated difference quotients at steps ``h`` and ``h/2``.

    Central quotients are used when the top singular value of ``x`` is
    separated by more than ``gap`` (relative); at nonsmooth points they would
    average the two one-sided derivatives, so one-sided quotients are used.
    """
    base = x.norm()
    s = np.linalg.svd(x.matrix, compute_uv=False)
    smooth = s.size == 1 or s[0] - s[1] > gap * s[0]
    if smooth:
        def quotient(t):
            return ((x + t * y).norm() - (x - t * y).norm()) / (2 * t)

        return (4 * quotient(h / 2) - quotient(h)) / 3

    def quotient(t):
        return ((x + t * y).norm() - base) / t

    return 2 * quotient(h / 2) - quotient(h)


def _phase_max(D):
    """``max_theta lambda_max(Herm(e^{i theta} D))`` and a maximizing phase."""
    if D.shape == (1, 1):
        z = D[0, 0]
        return float(abs(z)), float((-np.angle(z)) % (2 * np.pi)) if z != 0 else 0.0

    def g(theta):
        return _hermitian_top(np.exp(1j * theta) * D)

    grid = np.linspace(0, 2 * np.pi, 73)[:-1]
    vals = np.array([g(t) for t in grid])
    i = int(vals.argmax())
    lo, hi = grid[i] - 2 * np.pi / 72, grid[i] + 2 * np.pi / 72
    a = hi - _GOLDEN * (hi - lo)
    b = lo + _GOLDEN * (hi - lo)
    ga, gb = g(a), g(b)
    while hi - lo > 1e-6:
        if ga < gb:
            lo, a, ga = a, b, gb
            b = lo + _GOLDEN * (hi - lo)
            gb = g(b)
        else:
            hi, b, gb = b, a, ga
            a = hi - _GOLDEN * (hi - lo)
            ga = g(a)
    best_t, best_v = (a, ga) if ga >= gb else (b, gb)
    if vals[i] > best_v:
        best_t, best_v = grid[i], vals[i]
    return float(best_v), float(best_t % (2 * np.pi))


def radius_at(T, x, cluster_tol=RANK_TOL):
    """``sup |phi(T x)|`` over norming functionals of ``x / |x|`` and the phase attaining it."""
    mat = x.matrix
    u1, s, v1 = _top_cluster(mat, cluster_tol)
    if s[0] == 0:
        return 0.0, 0.0
    D = u1.conj().T @ T(x).matrix @ v1 / s[0]
    return _phase_max(D)


@dataclass
class RadiusEstimate:
    """Certified lower bound for ``v(T)`` or ``|T|`` with its witness."""

    value: float
    witness: Element
    phase: float
    n_starts: int
    n_steps: int
    converged: bool
    tol: float
    kind: str = "radius"
    seed: int = 0
    upper_bound: float | None = None

    def to_dict(self):
        z = self.witness.coords
        out = {
            "kind": self.kind,
            "value": self.value,
            "phase": self.phase,
            "witness": [float(v) for pair in zip(z.real, z.imag) for v in pair],
            "n_starts": self.n_starts,
            "n_steps": self.n_steps,
            "converged": self.converged,
            "tol": self.tol,
            "seed": self.seed,
        }
        if self.upper_bound is not None:
            out["upper_bound"] = self.upper_bound
        return out


def _ambient(space, Z):
    return (Z @ space._flat_basis).reshape(Z.shape[:-1] + space.shape)


def _snap_batch(space, Z, rank_tol=RANK_TOL):
    """Range tripotents of a stack of coordinate vectors with their polar factors."""
    X = _ambient(space, Z)
    u, s, vh = np.linalg.svd(X, full_matrices=False)
    keep = (s > rank_tol * s[..., :1]).astype(float)
    R = np.einsum("nik,nk,nkj->nij", u, keep, vh)
    return space.coords_of(R), u * keep[:, None, :], vh.conj().transpose(0, 2, 1) * keep[:, None, :]


def _tripotent_radius_batch(T):
    """Exact cluster value at ``r(x)`` for a fixed phase carried in the last coordinate."""
    space = T.space
    d = space.dim

    def f(W):
        theta = W[:, d].real
        R, U, V = _snap_batch(space, W[:, :d])
        D = U.conj().transpose(0, 2, 1) @ _ambient(space, T.apply_coords(R)) @ V
        D = np.exp(1j * theta)[:, None, None] * D
        return np.linalg.eigvalsh(0.5 * (D + D.conj().transpose(0, 2, 1)))[:, -1]

    return f


def _tripotent_norm_batch(T):
    space = T.space

    def f(Z):
        R, _, _ = _snap_batch(space, Z)
        return np.linalg.norm(_ambient(space, T.apply_coords(R)), 2, axis=(-2, -1))

    return f


def _normalize(space, Z):
    return Z / np.linalg.norm(_ambient(space, Z), 2, axis=(-2, -1))[..., None]


def _sphere(space):
    return lambda Z: _normalize(space, Z)


def _sphere_and_phase(space):
    d = space.dim

    def norm(W):
        W = W.copy()
        W[:, :d] = _normalize(space, W[:, :d])
        W[:, d] = W[:, d].real
        return W

    return norm


_FACTORS = np.array([1.0, 0.5, 0.25, 0.1, 0.03, 0.01])


def _ascend(f, Z, n_steps, project, h=1e-7, patience=1e-12):
    """Batched quasi-Newton ascent of ``f`` with finite-difference gradients.

    Every start keeps its own inverse-Hessian estimate and line search, so a
    start's trajectory never depends on the others.  Points are passed through
    ``project`` after each step.  A start stops once a step gains less than
    ``patience`` relative after a fresh restart of its Hessian estimate.
    Returns points, values and per-start convergence flags.
    """
    N, dc = Z.shape
    n = 2 * dc
    to_c = lambda Y: Y[..., :dc] + 1j * Y[..., dc:]
    to_r = lambda C: np.concatenate([C.real, C.imag], axis=-1)
    E = np.eye(n)

    def grad(Y, v):
        probe = project(to_c((Y[:, None, :] + h * E[None]).reshape(-1, n)))
        return (f(probe).reshape(len(Y), n) - v[:, None]) / h

    Y = to_r(project(Z))
    val = f(to_c(Y))
    g = grad(Y, val)
    gn = np.linalg.norm(g, axis=1)
    scale = 0.1 / np.where(gn > 0, gn, 1.0)
    H = scale[:, None, None] * E[None]
    fresh = np.ones(N, dtype=bool)
    active = gn > 0
    converged = ~active
    for _ in range(n_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        m = idx.size
        p = np.einsum("nij,nj->ni", H[idx], g[idx])
        C = Y[idx, None, :] + _FACTORS[None, :, None] * p[:, None, :]
        C = to_r(project(to_c(C.reshape(-1, n)))).reshape(m, len(_FACTORS), n)
        fc = f(to_c(C.reshape(-1, n))).reshape(m, len(_FACTORS))
        best = fc.argmax(axis=1)
        fb = fc[np.arange(m), best]
        va = val[idx]
        gain = fb - va
        better = gain > 0
        small = gain <= patience * np.maximum(np.abs(va), 1e-300)
        # no progress from a fresh Hessian: done; otherwise restart the estimate
        done = idx[small & fresh[idx]]
        active[done] = False
        converged[done] = True
        restart = idx[small & ~fresh[idx]]
        gr = np.linalg.norm(g[restart], axis=1)
        H[restart] = (0.01 / np.where(gr > 0, gr, 1.0))[:, None, None] * E[None]
        fresh[restart] = True
        up_mask = better & ~small
        up = idx[up_mask]
        if up.size == 0:
            continue
        Ynew = C[up_mask, best[up_mask]]
        gnew = grad(Ynew, fb[up_mask])
        s = Ynew - Y[up]
        yv = g[up] - gnew
        sy = np.einsum("ni,ni->n", s, yv)
        ok = sy > 1e-12 * np.linalg.norm(s, axis=1) * np.linalg.norm(yv, axis=1)
        rho = np.where(ok, 1.0 / np.where(ok, sy, 1.0), 0.0)
        V = E[None] - rho[:, None, None] * np.einsum("ni,nj->nij", s, yv)
        Hn = V @ H[up] @ V.transpose(0, 2, 1) + rho[:, None, None] * np.einsum("ni,nj->nij", s, s)
        H[up] = np.where(ok[:, None, None], Hn, H[up])
        Y[up], val[up], g[up] = Ynew, fb[up_mask], gnew
        fresh[up] = False
    return to_c(Y), val, converged


def _start_points(space, n_starts, seed):
    children = np.random.SeedSequence(seed).spawn(n_starts)
    pts = []
    for child in children:
        rng = np.random.default_rng(child)
        pts.append(rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim))
    return np.array(pts).reshape(n_starts, space.dim)


def _default_anchors(space):
    out = []
    for b in space.basis_elements():
        out.append(b)
        out.append(range_tripotent(b))
    return out


def _initial_phases(T, Z):
    grid = np.linspace(0, 2 * np.pi, 17)[:-1]
    f = _tripotent_radius_batch(T)
    n, d = Z.shape
    W = np.concatenate([np.repeat(Z, grid.size, axis=0),
                        np.tile(grid, n)[:, None].astype(complex)], axis=1)
    vals = f(W).reshape(n, grid.size)
    return grid[vals.argmax(axis=1)]


def _exact_batch(T, Z, cluster_tol=RANK_TOL, n_grid=72):
    """Cluster-aware values on a phase grid for a stack of points.

    Eigenvalues outside the top singular cluster are pushed far below zero so
    each batched eigenproblem equals the one for the cluster block alone.
    Returns grid maxima and maximizing phases.
    """
    space = T.space
    X = _ambient(space, Z)
    u, s, vh = np.linalg.svd(X, full_matrices=False)
    s0 = np.where(s[:, :1] > 0, s[:, :1], 1.0)
    keep = s >= s[:, :1] * (1 - cluster_tol)
    D = u.conj().transpose(0, 2, 1) @ _ambient(space, T.apply_coords(Z)) @ vh.conj().transpose(0, 2, 1)
    D = D / s0[:, :, None] * (keep[:, :, None] & keep[:, None, :])
    big = 4.0 * (np.abs(D).sum(axis=(1, 2)) + 1.0)
    shift = np.where(keep, 0.0, -big[:, None])
    grid = np.linspace(0, 2 * np.pi, n_grid + 1)[:-1]
    Dg = np.exp(1j * grid)[None, :, None, None] * D[:, None]
    H = 0.5 * (Dg + Dg.conj().transpose(0, 1, 3, 2))
    H = H + np.einsum("nk,kl->nkl", shift, np.eye(shift.shape[1]))[:, None]
    vals = np.linalg.eigvalsh(H)[..., -1]
    i = vals.argmax(axis=1)
    return vals[np.arange(len(Z)), i], grid[i]


def _candidate_coords(space, W, anchors):
    R, _, _ = _snap_batch(space, W[:, :space.dim])
    ok = np.linalg.norm(_ambient(space, R), 2, axis=(-2, -1)) > 0
    rows = [R[ok]] + [np.asarray([a.coords for a in anchors]).reshape(-1, space.dim)]
    Z = np.concatenate(rows)
    nrm = np.linalg.norm(_ambient(space, Z), 2, axis=(-2, -1))
    return Z[nrm > 0] / nrm[nrm > 0, None]


def _canonical(T):
    """``(c, T / c)`` with ``c`` the largest-modulus coordinate entry (first in scan order)."""
    M = np.concatenate([T.A.ravel(), T.B.ravel()])
    if not M.size or not np.abs(M).max() > 0:
        return 1.0, T
    mod = np.abs(M)
    c = complex(M[int(np.flatnonzero(mod >= mod.max() * (1 - 1e-12))[0])])
    return c, T * (1.0 / c)


def numerical_radius(T, n_starts=DEFAULT_STARTS, n_steps=DEFAULT_STEPS, seed=0,
                     anchors=(), tol=1e-9):
    """Multi-start lower bound for the numerical radius of a complex-linear ``T``.

    The supremum is attained at an extreme point of the ball (a complete
    tripotent), so the ascent runs over range tripotents with an explicit
    phase.  Final tripotents and anchors are re-evaluated exactly with
    golden-section refinement of the phase.
    """
    space = T.space
    if not T.is_complex_linear():
        raise InputError("numerical radius needs a complex-linear operator")
    if n_starts < 1:
        raise InputError("n_starts must be positive")
    c, T0 = _canonical(T)
    T = T0
    Z0 = _normalize(space, _start_points(space, n_starts, seed))
    W0 = np.concatenate([Z0, _initial_phases(T, Z0)[:, None]], axis=1)
    W, _, conv = _ascend(_tripotent_radius_batch(T), W0, n_steps, _sphere_and_phase(space))
    anchors = list(_default_anchors(space)) + list(anchors)
    Z = _candidate_coords(space, W, anchors)
    grid_vals, _ = _exact_batch(T, Z)
    cut = grid_vals.max() * 0.98 - 1e-12
    best = (-1.0, None, 0.0)
    for z in Z[grid_vals >= cut]:
        x = space.element(z)
        v, theta = radius_at(T, x)
        if v > best[0]:
            best = (v, x, theta)
    value, witness, theta = best
    theta = float((theta - np.angle(c)) % (2 * np.pi))
    return RadiusEstimate(abs(c) * value, witness, theta, n_starts, n_steps, bool(conv.all()), tol,
                          "radius", seed)


def _norm_upper_bound(T):
    r = min(T.space.shape)
    M = np.block([[T.A.real + T.B.real, -T.A.imag + T.B.imag],
                  [T.A.imag + T.B.imag, T.A.real - T.B.real]])
    return float(np.linalg.norm(M, 2) * math.sqrt(r))


def operator_norm(T, n_starts=DEFAULT_STARTS, n_steps=DEFAULT_STEPS, seed=0,
                  anchors=(), tol=1e-9):
    """Multi-start lower bound for ``|T|`` with a coordinate-based upper bound.

    A convex function on the unit ball peaks at an extreme point, and those
    are complete tripotents, so the ascent runs over range tripotents.
    """
    space = T.space
    if n_starts < 1:
        raise InputError("n_starts must be positive")
    c, T0 = _canonical(T)
    Z0 = _normalize(space, _start_points(space, n_starts, seed))
    Y, _, conv = _ascend(_tripotent_norm_batch(T0), Z0, n_steps, _sphere(space))
    anchors = list(_default_anchors(space)) + list(anchors)
    Z = _candidate_coords(space, Y, anchors)
    vals = np.linalg.norm(_ambient(space, T0.apply_coords(Z)), 2, axis=(-2, -1))
    i = int(vals.argmax())
    witness = space.element(Z[i])
    return RadiusEstimate(T(witness).norm(), witness, 0.0, n_starts, n_steps,
                          bool(conv.all()), tol, "norm", seed, _norm_upper_bound(T))


@dataclass
class IndexEstimate:
    """Smallest observed ``v(T) / |T|`` ratio with the operator attaining it."""

    value: float
    witness_name: str
    witness: RealLinearOperator
    samples: list = field(default_factory=list)
    seed: int = 0

    def to_dict(self):
        return {
            "value": self.value,
            "witness": self.witness_name,
            "witness_matrix": [[[float(z.real), float(z.imag)] for z in row]
                               for row in self.witness.A],
            "samples": self.samples,
            "seed": self.seed,
        }


def _structured_witnesses(space, seed):
    """Operators from 2-nilpotents: ``T = L(b,c) + L(c,b#)`` and ``L(b, r(a))``."""
    from .ideals import build_T_operator, find_2nilpotent, inner_ideal

    if is_commutative(space):
        return []
    rng = np.random.default_rng(seed)
    gens = [range_tripotent(space.random_element(rng)) for _ in range(4)]
    gens += space.basis_elements()
    for a in gens:
        if a.norm() == 0:
            continue
        alg = inner_ideal(a)
        if alg.is_associative():
            continue
        cert = find_2nilpotent(alg, seed=seed)
        t = build_T_operator(a, cert.element)
        anchors = [t.range_c, t.c, t.b, t.unit, t.b_star]
        return [
            ("nilpotent_T", t.operator, anchors),
            ("nilpotent_L(b,e)", L_op(t.b, t.unit), anchors),
        ]
    return []


INDEX_STARTS = 16
INDEX_STEPS = 100


def numerical_index_estimate(space, n_samples=20, seed=0, n_starts=INDEX_STARTS,
                             n_steps=INDEX_STEPS):
    """Upper-bound estimate of the numerical index from structured and random operators."""
    if n_samples < 1:
        raise InputError("n_samples must be positive")
    ops = _structured_witnesses(space, seed)
    children = np.random.SeedSequence(seed).spawn(n_samples)
    d = space.dim
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        A = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
        ops.append((f"random_{i}", RealLinearOperator.from_matrix(space, A), []))
    samples = []
    best = None
    for name, T, anchors in ops:
        nrm = operator_norm(T, n_starts, n_steps, seed, anchors).value
        T = T * (1.0 / nrm)
        v = numerical_radius(T, n_starts, n_steps, seed, anchors).value
        nrm_unit = max(1.0, v)
        ratio = min(1.0, v / nrm_unit)
        samples.append({"name": name, "radius": v, "norm": nrm_unit, "ratio": ratio})
        if best is None or ratio < best[0]:
            best = (ratio, name, T)
    return IndexEstimate(best[0], best[1], best[2], samples, seed)


def numerical_range_sample(T, n_points, seed=0, gap_tol=1e-6, max_tries=None):
    """Points ``phi(T x)`` at random smooth unit ``x`` with ``phi`` its norming functional.

    ``x`` is smooth in the space exactly when its top tripotent ``e`` is
    minimal, i.e. ``E_2(e) = C e``; then ``phi`` is the ``e``-coefficient of
    the Peirce-2 projection.  In some spaces (antisymmetric matrices) this is
    never decided by the ambient singular values alone.
    """
    if not T.is_complex_linear():
        raise InputError("numerical range needs a complex-linear operator")
    space = T.space
    rng = np.random.default_rng(seed)
    max_tries = 100 * n_points if max_tries is None else max_tries
    out = []
    tries = 0
    while len(out) < n_points:
        tries += 1
        if tries > max_tries:
            raise SearchFailed(f"found only {len(out)} smooth points in {max_tries} draws")
        x = space.random_element(rng)
        u1, s, v1 = _top_cluster(x.matrix, gap_tol)
        e = space.from_matrix(u1 @ v1.conj().T)
        ps = peirce(e)
        if ps.ranks[0] != 1:
            continue
        P2 = ps.P2
        x = x / s[0]
        phi = np.vdot(e.coords, P2(T(x)).coords) / np.vdot(e.coords, e.coords)
        out.append(complex(phi))
    return np.array(out, dtype=complex)


def write_range_csv(values, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im"])
        for z in values:
            writer.writerow([repr(float(z.real)), repr(float(z.imag))])
