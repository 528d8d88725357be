import numpy as np
import pytest

from jbtriple import (
    Antisymmetric, Diagonal, DirectSum, Q3, Rectangular, Symmetric, build_space,
)

SUITE_SPECS = [
    Diagonal(3),
    Rectangular(2, 2),
    Q3(),
    Rectangular(1, 2),
    Symmetric(2),
    Antisymmetric(4),
    DirectSum((Diagonal(2), Rectangular(1, 2))),
]


def spec_id(spec):
    return repr(spec).replace(" ", "")


# Oracles: plain numpy on ambient matrices, no library internals.

def tp(x, y, z):
    return 0.5 * (x @ y.conj().T @ z + z @ y.conj().T @ x)


def span_residual(basis, mat):
    B = np.array([b.ravel() for b in basis]).T
    coef, *_ = np.linalg.lstsq(B, mat.ravel(), rcond=None)
    return np.linalg.norm(B @ coef - mat.ravel())


def brute_force_closed(mats, tol=1e-8):
    return all(
        span_residual(mats, tp(x, y, z)) <= tol
        for x in mats for y in mats for z in mats
    )


def L_matrix(space, a, b):
    """Coordinate matrix of x -> {a, b, x} computed column by column."""
    basis = space.basis
    cols = []
    for k in range(space.dim):
        m = tp(a, b, basis[k])
        cols.append([np.vdot(basis[i], m) for i in range(space.dim)])
    return np.array(cols).T


def peirce_ranks_oracle(space, e):
    w = np.linalg.eigvalsh(L_matrix(space, e, e))
    return tuple(int(np.sum(np.abs(w - t) < 1e-6)) for t in (1.0, 0.5, 0.0))


def polar_partial_isometry(mat, rank_tol=1e-10):
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = s > rank_tol * s[0]
    return u[:, keep] @ vh[keep]


@pytest.fixture(params=SUITE_SPECS, ids=spec_id)
def space(request):
    return build_space(request.param)


@pytest.fixture
def m2():
    return build_space(Rectangular(2, 2))


@pytest.fixture
def q3():
    return build_space(Q3())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def mat(space, rows):
    return space.from_matrix(np.array(rows, dtype=complex))
