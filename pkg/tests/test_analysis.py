import numpy as np
import pytest

from allatonce.analysis import (
    SymbolSampler,
    circulant_split,
    cluster_report,
    dense_abs,
    normal_equation_rank_check,
    numerical_rank,
    preconditioned_spectrum,
    rank_bound_lemma_check,
    square_identity_defect,
    symbol_distribution_compare,
    write_spectrum,
)
from allatonce.discretize import TimeStencil, build_laplacian_1d
from allatonce.errors import ParameterError, SizeGuardError
from allatonce.precond import build_circulant, build_tau
from allatonce.toeplitz_ops import AllAtOnceOperator

from conftest import ALL_SCHEMES, make_case


def test_cluster_report_counts():
    rep = cluster_report([0.05, 1.1, -0.95, 3.0, -1.0], 0.2)
    np.testing.assert_array_equal(rep.eigenvalues, [-1.0, -0.95, 0.05, 1.1, 3.0])
    assert (rep.outliers, rep.near_zero, rep.clustered) == (2, 1, 3)


@pytest.mark.parametrize("scheme, theta", ALL_SCHEMES)
def test_exact_abs_preconditioner_gives_plus_minus_one(scheme, theta):
    op, *_ = make_case(scheme, 8, 3, theta=theta)
    A = op.materialize_dense(symmetric=True)
    rep = preconditioned_spectrum(op, dense_abs(A), epsilon=1e-10)
    assert rep.outliers == 0
    np.testing.assert_allclose(np.abs(rep.eigenvalues), 1.0, atol=1e-10)


def test_unpreconditioned_spectrum_matches_eigvalsh():
    op, *_ = make_case("theta", 4, 2, theta=1.0, T=1.0)
    np.testing.assert_allclose(
        preconditioned_spectrum(op).eigenvalues,
        np.linalg.eigvalsh(op.materialize_dense(symmetric=True)),
        atol=1e-12,
    )


def test_wave_two_step_tau_spectrum_clustered():
    op, sp_, st_, _ = make_case("wave-two-step", 32, 31, T=1.0)
    plain = preconditioned_spectrum(op, None, epsilon=0.5)
    tau = preconditioned_spectrum(op, build_tau(st_, sp_, 32), epsilon=0.5)
    assert plain.outliers > 800
    assert tau.outliers <= 4 and tau.near_zero <= 4


def test_heat_tau_outliers_bounded_and_stable():
    counts = []
    for n in (16, 32, 64):
        op, sp_, st_, _ = make_case("theta", n, 3, theta=1.0)
        counts.append(preconditioned_spectrum(op, build_tau(st_, sp_, n), epsilon=0.2).outliers)
    assert counts[0] <= 3 * 3
    assert counts[1] <= counts[0] and counts[2] <= counts[1]


@pytest.mark.parametrize("n, m1", [(4, 3), (6, 4)])
@pytest.mark.parametrize("theta", [1.0, 0.5])
def test_square_identity(n, m1, theta):
    op, sp_, st_, _ = make_case("theta", n, m1, theta=theta)
    assert square_identity_defect(op, build_tau(st_, sp_, n)) <= 1e-11


def test_square_identity_needs_one_step():
    op, sp_, st_, _ = make_case("bdf2", 4, 2)
    with pytest.raises(ParameterError):
        square_identity_defect(op, build_tau(st_, sp_, 4))


@pytest.mark.parametrize(
    "n, m1, theta, expected",
    # at (6, 3) with theta = 1/2 one eigenvalue of A_(1) = -I + tau K / 2 is exactly zero
    [(3, 2, 1.0, 2), (4, 2, 1.0, 2), (6, 3, 0.5, 2), (16, 7, 1.0, 7)],
)
def test_normal_equation_rank(n, m1, theta, expected):
    op, sp_, st_, _ = make_case("theta", n, m1, theta=theta)
    rank, off = normal_equation_rank_check(op, build_tau(st_, sp_, n))
    assert rank <= op.m
    assert rank == expected == np.count_nonzero(np.abs(op.block_eigs[1]) > 1e-12)
    assert off > 0


def test_normal_equation_rank_zero_when_a1_vanishes():
    sp_ = build_laplacian_1d(3)
    st_ = TimeStencil(((1.0, 0.1), (0.0, 0.0)), 0.1)
    op = AllAtOnceOperator(5, sp_, st_)
    rank, off = normal_equation_rank_check(op, build_tau(st_, sp_, 5))
    assert rank == 0 and off < 1e-12


def test_symbol_sampler_n_one_matches_a0():
    op, sp_, st_, _ = make_case("theta", 1, 4, theta=1.0)
    sampler = SymbolSampler(st_, sp_, [0.0])
    # |g(0)| = |A0 + A1| = tau K, eigenvalues of Y T = A0 = I + tau K
    assert symbol_distribution_compare(op, sampler) == pytest.approx(1.0, abs=1e-12)


def test_symbol_distribution_trend():
    d = []
    for n in (16, 32, 64):
        op, *_ = make_case("theta", n, 3, theta=1.0)
        d.append(symbol_distribution_compare(op))
    assert d[1] <= 1.05 * d[0] and d[2] <= 1.05 * d[1]
    assert d[2] < d[0]


def test_flipped_spectrum_splits_in_half():
    op, *_ = make_case("theta", 64, 3, theta=1.0)
    e = preconditioned_spectrum(op).eigenvalues
    assert np.count_nonzero(e < 0) == np.count_nonzero(e > 0) == 96


def test_sampler_validation():
    _, sp_, st_, _ = make_case("theta", 4, 2, theta=1.0)
    with pytest.raises(ParameterError):
        SymbolSampler(st_, sp_, [])
    with pytest.raises(ParameterError):
        SymbolSampler(st_, sp_, [4.0])
    with pytest.raises(ParameterError):
        SymbolSampler.uniform(st_, sp_, 0)
    op, *_ = make_case("theta", 4, 2, theta=1.0)
    with pytest.raises(ParameterError):
        symbol_distribution_compare(op, SymbolSampler.uniform(st_, sp_, 3))


@pytest.mark.parametrize("n, m1, K", [(8, 1, 1), (12, 2, 2), (10, 1, 2)])
def test_rank_bound_lemma(n, m1, K):
    _, sp_, st_, _ = make_case("theta", n, m1, theta=1.0)
    assert rank_bound_lemma_check(st_, sp_, n, K) <= 2 * K * m1


def test_rank_bound_lemma_constant_symbol():
    sp_ = build_laplacian_1d(2)
    st_ = TimeStencil(((1.0, 0.1), (0.0, 0.0)), 0.1)
    assert rank_bound_lemma_check(st_, sp_, 12, 2) == 0


def test_rank_bound_lemma_precondition():
    _, sp_, st_, _ = make_case("theta", 8, 2, theta=1.0)
    with pytest.raises(ParameterError):
        rank_bound_lemma_check(st_, sp_, 8, 2)


@pytest.mark.parametrize("scheme, theta", ALL_SCHEMES[:4])
def test_circulant_split_rank(scheme, theta):
    op, sp_, st_, _ = make_case(scheme, 12, 2, theta=theta)
    orth, sym, rank = circulant_split(op, build_circulant(st_, sp_, 12))
    assert orth < 1e-12 and sym < 1e-12
    assert rank <= op.l * op.m


def test_circulant_outliers_at_most_twice_rank():
    # a rank-r perturbation of a symmetric orthogonal matrix moves at most 2r eigenvalues
    op, sp_, st_, _ = make_case("theta", 12, 2, theta=1.0)
    rep = preconditioned_spectrum(op, build_circulant(st_, sp_, 12), epsilon=1e-6)
    assert rep.outliers <= 2 * op.m


@pytest.mark.xfail(strict=True, reason="a rank-m correction can displace 2m eigenvalues, not m")
def test_circulant_outliers_at_most_m():
    op, sp_, st_, _ = make_case("theta", 12, 2, theta=1.0)
    rep = preconditioned_spectrum(op, build_circulant(st_, sp_, 12), epsilon=1e-6)
    assert rep.outliers <= op.m


def test_numerical_rank():
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert numerical_rank(np.diag([1.0, 1e-12, 0.5])) == 2


def test_write_spectrum_roundtrip(tmp_path):
    path = tmp_path / "eigs.txt"
    write_spectrum(path, [3.0, -1.0 / 3.0, 2.0])
    lines = path.read_text().split()
    assert len(lines) == 3
    np.testing.assert_array_equal(np.loadtxt(path), [-1.0 / 3.0, 2.0, 3.0])


def test_size_guard():
    op, sp_, st_, _ = make_case("theta", 8, 8, theta=1.0)
    with pytest.raises(SizeGuardError):
        preconditioned_spectrum(op, guard=32)
    with pytest.raises(SizeGuardError):
        normal_equation_rank_check(op, build_tau(st_, sp_, 8), guard=32)
    with pytest.raises(SizeGuardError):
        symbol_distribution_compare(op, guard=32)
    with pytest.raises(SizeGuardError):
        rank_bound_lemma_check(st_, sp_, 40, 1, guard=32)
