import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import (
    SUITE_SPECS, brute_force_closed, mat, peirce_ranks_oracle, spec_id, span_residual, tp,
)
from jbtriple import (
    Antisymmetric, Diagonal, DirectSum, L_op, Q3, Q_op, RealLinearOperator, Rectangular,
    Subspace, Symmetric, build_space, is_associative_jb_algebra, is_commutative, is_orthogonal,
    is_tripotent, peirce, range_tripotent, triple_product,
)
from jbtriple.core import commutativity_defect, peirce_arithmetic_residual
from jbtriple.exceptions import (
    DegenerateBasis, InputError, NotATripotent, NotUnitary, SpaceMismatch, SubspaceNotClosed,
)

E11 = [[1, 0], [0, 0]]
E12 = [[0, 1], [0, 0]]
E21 = [[0, 0], [1, 0]]
E22 = [[0, 0], [0, 1]]
I2 = [[1, 0], [0, 1]]


# ---- construction ---------------------------------------------------------

def test_rectangular_basis_is_matrix_units(m2):
    assert m2.dim == 4
    expected = [E11, E12, E21, E22]
    for b, e in zip(m2.basis, expected):
        assert np.allclose(b, e)


def test_q3_basis():
    space = build_space(Q3())
    assert space.dim == 3
    assert np.allclose(space.basis[0], np.eye(2) / np.sqrt(2))
    assert np.allclose(space.basis[1], E12)
    assert np.allclose(space.basis[2], E21)


@pytest.mark.parametrize("spec,dim", [
    (Symmetric(3), 6), (Antisymmetric(4), 6), (Diagonal(5), 5), (Rectangular(2, 3), 6),
    (DirectSum((Diagonal(2), Rectangular(1, 2))), 4),
])
def test_dimensions(spec, dim):
    assert build_space(spec).dim == dim


def test_direct_sum_is_block_diagonal():
    space = build_space(DirectSum((Diagonal(2), Rectangular(1, 2))))
    assert space.shape == (3, 4)
    x = space.element(np.array([2, 0, 0, 3j]))
    assert x.norm() == pytest.approx(3.0)


@pytest.mark.parametrize("cls,args", [
    (Rectangular, (0, 2)), (Symmetric, (-1,)), (Antisymmetric, (1,)), (Diagonal, (2.5,)),
    (Rectangular, (True, 2)),
])
def test_bad_dimension_parameters(cls, args):
    with pytest.raises(InputError):
        cls(*args)


def test_subspace_closure_matches_brute_force():
    # first row of M2: closed, so it builds
    mats = [np.array(E11, complex), np.array(E12, complex)]
    assert brute_force_closed(mats)
    space = build_space(Subspace(Rectangular(2, 2), ((1, 0, 0, 0), (0, 1, 0, 0))))
    assert space.dim == 2


def test_subspace_not_closed():
    mats = [np.eye(2, dtype=complex), np.array(E12, complex)]
    assert not brute_force_closed(mats)
    with pytest.raises(SubspaceNotClosed):
        build_space(Subspace(Rectangular(2, 2), ((1, 0, 0, 1), (0, 1, 0, 0))))


def test_subspace_degenerate_basis():
    with pytest.raises(DegenerateBasis):
        build_space(Subspace(Rectangular(2, 2), ((1, 0, 0, 0), (2, 0, 0, 0))))


def test_spin_like_subspace_builds():
    # symmetric 2x2 matrices as a subspace of M2
    space = build_space(Subspace(Rectangular(2, 2), ((1, 0, 0, 0), (0, 1, 1, 0), (0, 0, 0, 1))))
    assert space.dim == 3
    assert not is_commutative(space)


def test_coordinate_round_trip(space, rng):
    for _ in range(10):
        x = space.random_element(rng)
        y = space.from_matrix(x.matrix)
        assert np.allclose(x.coords, y.coords, atol=1e-12)


def test_from_matrix_rejects_outside(q3):
    with pytest.raises(InputError):
        q3.from_matrix(E11)


def test_closure_of_canonical_bases(space):
    assert brute_force_closed(list(space.basis))


# ---- triple product -------------------------------------------------------

def test_triple_product_examples(m2):
    e12, e11 = mat(m2, E12), mat(m2, E11)
    assert np.allclose(triple_product(e12, e12, e12).matrix, E12)
    assert np.allclose(triple_product(e11, e11, e12).matrix, 0.5 * np.array(E12))


def test_hilbert_space_triple_product():
    h = build_space(Rectangular(1, 2))
    x1, x2 = h.basis_elements()
    assert np.allclose(triple_product(x1, x1, x2).coords, 0.5 * x2.coords)


def test_triple_product_matches_oracle(space, rng):
    for _ in range(5):
        x, y, z = (space.random_element(rng) for _ in range(3))
        assert np.allclose(triple_product(x, y, z).matrix, tp(x.matrix, y.matrix, z.matrix))


def test_sesquilinearity(space, rng):
    x, y, z = (space.random_element(rng) for _ in range(3))
    lam = 0.3 - 1.7j
    assert np.allclose(triple_product(lam * x, y, z).coords, lam * triple_product(x, y, z).coords)
    assert np.allclose(triple_product(x, lam * y, z).coords,
                       np.conj(lam) * triple_product(x, y, z).coords)


def test_space_mismatch():
    a, b = build_space(Diagonal(2)), build_space(Diagonal(2))
    with pytest.raises(SpaceMismatch):
        triple_product(a.basis_element(0), b.basis_element(0), a.basis_element(0))


# ---- L and Q operators -----------------------------------------------------

def test_L_q3_example(q3):
    v, w = mat(q3, E21), mat(q3, I2)
    assert np.allclose(L_op(v, v)(w).coords, 0.5 * w.coords)


def test_L_zero(space, rng):
    b = space.random_element(rng)
    op = L_op(space.zero(), b)
    assert op.matrix_norm() == 0.0
    assert op.is_complex_linear()


def test_Q_image_of_E11(m2):
    q = Q_op(mat(m2, E11))
    assert q.is_conjugate_linear()
    image = np.array([q(b).matrix for b in m2.basis_elements()])
    u, s, _ = np.linalg.svd(image.reshape(4, -1))
    assert int((s > 1e-10).sum()) == 1
    assert span_residual([np.array(E11, complex)], image[0]) < 1e-12


def test_Q_action_is_conjugate_linear(space, rng):
    a, b, x = (space.random_element(rng) for _ in range(3))
    q = Q_op(a, b)
    assert np.allclose(q(x).matrix, tp(a.matrix, x.matrix, b.matrix))
    assert np.allclose(q(2j * x).coords, -2j * q(x).coords)


def test_real_linear_composition(space, rng):
    a, b, c, d, x = (space.random_element(rng) for _ in range(5))
    p, q = Q_op(a, b), Q_op(c, d)
    comp = p @ q
    assert comp.is_complex_linear()
    assert np.allclose(comp(x).coords, p(q(x)).coords)


# ---- tripotents and orthogonality -----------------------------------------

def test_tripotent_examples(m2, q3):
    assert is_tripotent(mat(q3, E21))
    assert is_tripotent(mat(m2, I2))
    assert not is_tripotent(2 * mat(m2, E11))


def test_orthogonality_examples(m2):
    assert is_orthogonal(mat(m2, E11), mat(m2, E22))
    assert not is_orthogonal(mat(m2, E11), mat(m2, E12))


def test_orthogonal_sum_is_tripotent(m2):
    e, v = mat(m2, E11), mat(m2, E22)
    s = e + v
    assert is_tripotent(s)
    # e <= e + v: e is in the Peirce-2 space of e + v with {e, s, e} = e
    assert np.allclose(triple_product(e, s, e).coords, e.coords)


# ---- Peirce ----------------------------------------------------------------

def test_peirce_ranks_E11(m2):
    e = mat(m2, E11)
    ps = peirce(e)
    assert ps.ranks == (1, 2, 1)
    assert ps.ranks == peirce_ranks_oracle(m2, e.matrix)


def test_peirce_unitary(m2):
    ps = peirce(mat(m2, I2))
    assert np.allclose(ps.P2.A, np.eye(4))
    assert np.allclose(ps.P1.A, 0) and np.allclose(ps.P0.A, 0)


def test_peirce_hilbert():
    h = build_space(Rectangular(1, 2))
    ps = peirce(h.basis_element(0))
    assert ps.ranks == (1, 1, 0)
    assert np.allclose(ps.P2.A, np.diag([1, 0]))


def test_peirce_rejects_non_tripotent(m2):
    with pytest.raises(NotATripotent):
        peirce(2 * mat(m2, E11))


def test_peirce_ranks_match_eigensolver(space, rng):
    for _ in range(5):
        e = range_tripotent(space.random_element(rng))
        assert peirce(e).ranks == peirce_ranks_oracle(space, e.matrix)


def test_peirce_arithmetic(space, rng):
    e = range_tripotent(space.random_element(rng))
    assert peirce_arithmetic_residual(peirce(e)) < 1e-8


# ---- commutativity ---------------------------------------------------------

@pytest.mark.parametrize("spec,expected", [
    (Diagonal(3), True), (Rectangular(2, 2), False), (Rectangular(1, 2), False),
    (Q3(), False), (DirectSum((Diagonal(1), Diagonal(2))), True),
])
def test_is_commutative(spec, expected):
    assert is_commutative(build_space(spec)) is expected


def test_commutativity_defect_witness(m2):
    value, (i, j, k, l) = commutativity_defect(m2)
    b = m2.basis_elements()
    comm = L_op(b[i], b[j]) @ L_op(b[k], b[l]) - L_op(b[k], b[l]) @ L_op(b[i], b[j])
    assert value > 0.1
    assert comm.matrix_norm() > 0.1


@pytest.mark.parametrize("spec,expected", [
    (Diagonal(3), True), (Q3(), False), (Rectangular(2, 2), False),
])
def test_associativity_with_identity(spec, expected):
    space = build_space(spec)
    assert is_associative_jb_algebra(space, space.from_matrix(np.eye(space.shape[0]))) is expected


def test_associativity_needs_unitary(m2):
    with pytest.raises(NotUnitary):
        is_associative_jb_algebra(m2, mat(m2, E11))


# ---- properties --------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)
specs = st.sampled_from(SUITE_SPECS)


@settings(max_examples=40, deadline=None)
@given(spec=specs, seed=seeds)
def test_jordan_identity(spec, seed):
    space = build_space(spec)
    rng = np.random.default_rng(seed)
    a, b, x, y = (space.random_element(rng) for _ in range(4))
    lhs = L_op(a, b) @ L_op(x, y) - L_op(x, y) @ L_op(a, b)
    rhs = L_op(L_op(a, b)(x), y) - L_op(x, L_op(b, a)(y))
    scale = a.norm() * b.norm() * x.norm() * y.norm()
    assert (lhs - rhs).matrix_norm() <= 1e-8 * scale


@settings(max_examples=40, deadline=None)
@given(spec=specs, seed=seeds, scale=st.floats(1e-3, 1e3))
def test_gelfand_naimark_cube(spec, seed, scale):
    space = build_space(spec)
    a = scale * space.random_element(np.random.default_rng(seed))
    assert abs(triple_product(a, a, a).norm() - a.norm() ** 3) <= 1e-8 * a.norm() ** 3


@settings(max_examples=30, deadline=None)
@given(spec=specs, seed=seeds)
def test_peirce_identities(spec, seed):
    space = build_space(spec)
    rng = np.random.default_rng(seed)
    e = range_tripotent(space.random_element(rng))
    ps = peirce(e)
    P = [ps.P2.A, ps.P1.A, ps.P0.A]
    eye = np.eye(space.dim)
    assert np.allclose(sum(P), eye, atol=1e-8)
    for i in range(3):
        for j in range(3):
            assert np.allclose(P[i] @ P[j], P[i] if i == j else 0, atol=1e-8)
    assert np.allclose(L_op(e, e).A, P[0] + 0.5 * P[1], atol=1e-8)
    x = space.random_element(rng)
    for p in (ps.P2, ps.P1, ps.P0):
        assert p(x).norm() <= x.norm() * (1 + 1e-8)


@settings(max_examples=30, deadline=None)
@given(spec=specs, seed=seeds)
def test_orthogonality_equivalences(spec, seed):
    space = build_space(spec)
    rng = np.random.default_rng(seed)
    e = range_tripotent(space.random_element(rng))
    z = peirce(e).P0(space.random_element(rng))
    pairs = [(e, space.random_element(rng))]
    if z.norm() > 1e-6:
        pairs += [(e, z), (z, e)]
    for a, b in pairs:
        verdicts = {
            L_op(a, b).matrix_norm() <= 1e-8 * max(1.0, a.norm() * b.norm()),
            triple_product(a, a, b).norm() <= 1e-8 * max(1.0, a.norm() ** 2 * b.norm()),
            triple_product(b, b, a).norm() <= 1e-8 * max(1.0, b.norm() ** 2 * a.norm()),
        }
        assert len(verdicts) == 1
        assert is_orthogonal(a, b) in verdicts
    if z.norm() > 1e-6:
        v = range_tripotent(z)
        assert is_orthogonal(e, v)
        s = e + v
        assert is_tripotent(s)
        assert np.allclose(triple_product(e, s, e).coords, e.coords, atol=1e-8)
        assert np.allclose(triple_product(v, s, v).coords, v.coords, atol=1e-8)


def test_real_linear_operator_shape_check(m2):
    with pytest.raises(InputError):
        RealLinearOperator.from_matrix(m2, np.eye(3))
