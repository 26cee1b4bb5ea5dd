"""Weight matrices, cone membership, and determinant closed forms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrig import (
    ModelError,
    NotInConeError,
    build_weight_matrix,
    complete_weights,
    cone_membership,
    daisy_weights,
    det_complete,
    det_daisy,
    m_matrix,
    schur_split,
    weight_matrix_from_dense,
)
from mrig.integrals import _x_from_t


def path3():
    return build_weight_matrix(3, [(0, 1, 1.0), (1, 2, 0.5)])


# ---------------------------------------------------------------------------
# Construction and validation


def test_build_basic_metadata():
    W = path3()
    assert W.n == 3
    assert W.edges == ((0, 1), (1, 2))
    assert W.degrees == (1, 2, 1)
    assert W.connected and W.is_tree
    assert np.allclose(W.w, W.w.T)
    assert np.all(np.diag(W.w) == 0.0)


def test_build_complete_and_star():
    K = complete_weights(4, 0.7)
    assert len(K.edges) == 6 and K.connected and not K.is_tree
    D = daisy_weights([1.0, 2.0, 3.0])
    assert D.n == 4 and D.is_tree
    assert D.degrees == (3, 1, 1, 1)


def test_build_disconnected():
    W = build_weight_matrix(4, [(0, 1, 1.0), (2, 3, 1.0)])
    assert not W.connected and not W.is_tree


def test_build_validation_errors():
    with pytest.raises(ModelError):
        build_weight_matrix(0, [])
    with pytest.raises(ModelError):
        build_weight_matrix(2, [(0, 0, 1.0)])  # i == j
    with pytest.raises(ModelError):
        build_weight_matrix(2, [(1, 0, 1.0)])  # not upper triangle
    with pytest.raises(ModelError):
        build_weight_matrix(2, [(0, 2, 1.0)])  # out of range
    with pytest.raises(ModelError):
        build_weight_matrix(3, [(0, 1, 1.0), (0, 1, 2.0)])  # duplicate
    with pytest.raises(ModelError):
        build_weight_matrix(2, [(0, 1, 0.0)])  # nonpositive weight


def test_from_dense_validation():
    with pytest.raises(ModelError):
        weight_matrix_from_dense(np.zeros((2, 3)))
    with pytest.raises(ModelError):
        weight_matrix_from_dense(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ModelError):
        weight_matrix_from_dense(np.array([[1.0, 0.5], [0.5, 0.0]]))
    with pytest.raises(ModelError):
        weight_matrix_from_dense(np.array([[0.0, -0.5], [-0.5, 0.0]]))


def test_head_tail_cross_permute():
    W = path3()
    assert np.allclose(W.head(2).w, [[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(W.tail(2).w, [[0.0]])
    assert np.allclose(W.cross(2), [[0.0], [0.5]])
    P = W.permute([2, 1, 0])
    assert P.w[0, 1] == 0.5 and P.w[1, 2] == 1.0


# ---------------------------------------------------------------------------
# Cone membership


def test_cone_membership_against_eigenvalues():
    W = path3()
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.uniform(0.1, 3.0, 3)
        M = m_matrix(W, x)
        eigs = np.linalg.eigvalsh(M)
        if eigs.min() > 1e-8:
            cp = cone_membership(W, x)
            assert np.allclose(cp.chol @ cp.chol.T, M, atol=1e-12)
            sign, logdet = np.linalg.slogdet(M)
            assert sign > 0 and abs(cp.log_det - logdet) < 1e-10
            assert np.allclose(cp.inv, np.linalg.inv(M), atol=1e-10)
        elif eigs.min() < -1e-8:
            with pytest.raises(NotInConeError):
                cone_membership(W, x)


def test_boundary_rejected():
    # x = (1, 1/2, 1) on the path graph puts det M_x exactly at 0
    W = build_weight_matrix(3, [(0, 1, 1.0), (1, 2, 1.0)])
    with pytest.raises(NotInConeError) as exc:
        cone_membership(W, [1.0, 0.5, 1.0])
    assert 0 <= exc.value.pivot_index < 3


def test_not_in_cone_reports_pivot():
    W = build_weight_matrix(2, [(0, 1, 2.0)])
    with pytest.raises(NotInConeError) as exc:
        cone_membership(W, [-1.0, 1.0])
    assert exc.value.pivot_index == 0
    assert exc.value.pivot_value <= 0.0


def test_rel_tol_validation():
    W = path3()
    with pytest.raises(ModelError):
        cone_membership(W, [1.0, 1.0, 1.0], rel_tol=0.0)


def test_schur_split_determinant_identity():
    W = path3()
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = _x_from_t(W, rng.uniform(0.3, 2.0, 3))
        cp = cone_membership(W, x)
        for k in (1, 2):
            head, S, cross = schur_split(cp, W, k)
            det_s = np.linalg.det(S)
            assert det_s > 0
            total = head.log_det + np.log(det_s)
            assert abs(total - cp.log_det) < 1e-10
            assert cross.shape == (k, 3 - k)


def test_schur_split_range():
    W = path3()
    cp = cone_membership(W, [1.0, 1.0, 1.0])
    with pytest.raises(ModelError):
        schur_split(cp, W, 0)
    with pytest.raises(ModelError):
        schur_split(cp, W, 3)


# ---------------------------------------------------------------------------
# Closed-form determinants


def test_det_complete_matches_dense():
    rng = np.random.default_rng(2)
    for n in (1, 2, 3, 5, 8):
        for _ in range(10):
            c = rng.uniform(0.1, 2.0)
            x = rng.uniform(0.1, 3.0, n)
            W = complete_weights(n, c) if n > 1 else build_weight_matrix(1, [])
            w = W.w if n > 1 else np.zeros((1, 1))
            ref = np.linalg.det(2.0 * np.diag(x) - (c * (1 - np.eye(n))))
            assert abs(det_complete(c, x) - ref) < 1e-9 * max(1.0, abs(ref))


def test_det_daisy_matches_dense():
    rng = np.random.default_rng(3)
    for leaves in (1, 2, 4, 7):
        for _ in range(10):
            c = rng.uniform(0.1, 2.0, leaves)
            x = rng.uniform(0.1, 3.0, leaves + 1)
            W = daisy_weights(c)
            ref = np.linalg.det(m_matrix(W, x))
            assert abs(det_daisy(c, x) - ref) < 1e-9 * max(1.0, abs(ref))


def test_det_closed_form_validation():
    with pytest.raises(ModelError):
        det_complete(0.0, [1.0, 1.0])
    with pytest.raises(ModelError):
        det_daisy([1.0, 1.0], [1.0, 1.0])


# ---------------------------------------------------------------------------
# Property tests


@st.composite
def random_model(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                entries.append(
                    (i, j, draw(st.floats(min_value=0.05, max_value=2.0)))
                )
    t = [draw(st.floats(min_value=0.3, max_value=2.0)) for _ in range(n)]
    return build_weight_matrix(n, entries), np.array(t)


@settings(max_examples=150, deadline=None)
@given(random_model())
def test_stieltjes_property(model):
    """M_x is an M-matrix on the cone: inverse entries are nonnegative."""
    W, t = model
    x = _x_from_t(W, t)
    try:
        cp = cone_membership(W, x)
    except NotInConeError:
        return  # heavily skewed candidate rejected by the relative tolerance
    assert cp.inv.min() >= -1e-12


@settings(max_examples=100, deadline=None)
@given(random_model(), random_model())
def test_cone_convexity_midpoints(m1, m2):
    """C_W is convex: the midpoint of two accepted points is accepted."""
    W, t1 = m1
    _, t2 = m2[0], m2[1]
    if len(t2) != W.n:
        t2 = t1[::-1].copy()
    x1, x2 = _x_from_t(W, t1), _x_from_t(W, t2)
    try:
        cone_membership(W, x1)
        cone_membership(W, x2)
    except NotInConeError:
        return
    cone_membership(W, 0.5 * (x1 + x2), rel_tol=1e-14)
