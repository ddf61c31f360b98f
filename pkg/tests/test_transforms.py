import numpy as np
import pytest
import scipy.fft
from hypothesis import given, settings
from hypothesis import strategies as st

from allatonce.errors import DimensionError, ParameterError
from allatonce.transforms import (
    TransformPlan,
    apply_kron_transform,
    dst1,
    dst1_matrix,
    fft_time,
    space_basis_matrix,
)


def test_dst1_frozen_values():
    # explicit sine sums for v = [1, 2, 3]
    np.testing.assert_allclose(
        dst1([1.0, 2.0, 3.0]),
        [3.4142135623730954, -1.414213562373095, 0.5857864376269046],
        rtol=0,
        atol=1e-14,
    )


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 31])
def test_dst1_matches_dense_matrix(n, rng):
    v = rng.standard_normal(n)
    np.testing.assert_allclose(dst1(v), dst1_matrix(n) @ v, atol=1e-13)


@pytest.mark.parametrize("n", [1, 5, 12])
def test_dst1_matches_scipy_orthonormal(n, rng):
    v = rng.standard_normal(n)
    np.testing.assert_allclose(dst1(v), scipy.fft.dst(v, type=1, norm="ortho"), atol=1e-13)


def test_dst1_along_axis(rng):
    X = rng.standard_normal((4, 6, 3))
    out = dst1(X, axis=1)
    np.testing.assert_allclose(out, np.einsum("ij,ajb->aib", dst1_matrix(6), X), atol=1e-13)


def test_dst1_matrix_symmetric_orthogonal():
    S = dst1_matrix(9)
    np.testing.assert_allclose(S, S.T, atol=1e-15)
    np.testing.assert_allclose(S @ S, np.eye(9), atol=1e-13)


def test_dst1_diagonalizes_tridiagonal():
    n = 8
    Pn = 0.5 * (np.eye(n, k=1) + np.eye(n, k=-1))
    S = dst1_matrix(n)
    D = S @ Pn @ S
    np.testing.assert_allclose(np.diag(D), np.cos(np.arange(1, n + 1) * np.pi / (n + 1)), atol=1e-14)
    np.testing.assert_allclose(D - np.diag(np.diag(D)), 0, atol=1e-14)


def test_dst1_rejects_scalars():
    with pytest.raises(DimensionError):
        dst1(np.float64(1.0))


def test_space_basis_2d_is_kron():
    U = space_basis_matrix((3, 3))
    np.testing.assert_allclose(U, np.kron(dst1_matrix(3), dst1_matrix(3)))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 12),
    m1=st.integers(1, 6),
    dim=st.sampled_from([1, 2]),
    seed=st.integers(0, 2**32 - 1),
)
def test_kron_transform_is_involution(n, m1, dim, seed):
    plan = TransformPlan(n, (m1,) * dim)
    x = np.random.default_rng(seed).standard_normal(plan.n * plan.m)
    np.testing.assert_allclose(plan.kron(plan.kron(x)), x, atol=1e-12)
    np.testing.assert_allclose(plan.space(plan.space(x)), x, atol=1e-12)
    np.testing.assert_allclose(plan.time(plan.time(x)), x, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 10), m1=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_kron_transform_matches_dense(n, m1, seed):
    plan = TransformPlan(n, (m1, m1))
    x = np.random.default_rng(seed).standard_normal(plan.n * plan.m)
    Q = np.kron(dst1_matrix(n), space_basis_matrix((m1, m1)))
    np.testing.assert_allclose(apply_kron_transform(plan, x), Q @ x, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 16), m1=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_fft_time_unitary(n, m1, seed):
    plan = TransformPlan(n, (m1,))
    r = np.random.default_rng(seed)
    x = r.standard_normal(n * m1) + 1j * r.standard_normal(n * m1)
    y = fft_time(plan, x)
    assert abs(np.linalg.norm(y) - np.linalg.norm(x)) <= 1e-12 * max(1.0, np.linalg.norm(x))
    np.testing.assert_allclose(fft_time(plan, y, "inverse"), x, atol=1e-12)


def test_partial_transforms():
    plan = TransformPlan(3, (2,))
    x = np.arange(6.0)
    np.testing.assert_allclose(apply_kron_transform(plan, x, time=False, space=False), x)
    np.testing.assert_allclose(
        apply_kron_transform(plan, x, time=True, space=False), np.kron(dst1_matrix(3), np.eye(2)) @ x, atol=1e-14
    )
    np.testing.assert_allclose(
        apply_kron_transform(plan, x, time=False, space=True), np.kron(np.eye(3), dst1_matrix(2)) @ x, atol=1e-14
    )


def test_plan_validation():
    with pytest.raises(ParameterError):
        TransformPlan(0, (3,))
    with pytest.raises(ParameterError):
        TransformPlan(2, (2, 2, 2))
    with pytest.raises(DimensionError):
        TransformPlan(2, (3,)).kron(np.zeros(5))
    with pytest.raises(ParameterError):
        fft_time(TransformPlan(2, (1,)), np.zeros(2), "sideways")
