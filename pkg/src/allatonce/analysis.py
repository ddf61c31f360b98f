"""Dense spectral checks for small all-at-once systems.

Everything here forms dense matrices and uses LAPACK eigen/singular value
solvers, so all entry points refuse problems with more than ``guard``
unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ParameterError, SizeGuardError
from .precond import build_circulant, build_tau, symbol_modulus
from .toeplitz_ops import DENSE_GUARD

__all__ = [
    "SpectrumReport",
    "SymbolSampler",
    "RANK_RTOL",
    "numerical_rank",
    "dense_abs",
    "cluster_report",
    "preconditioned_spectrum",
    "square_identity_defect",
    "normal_equation_rank_check",
    "symbol_distribution_compare",
    "rank_bound_lemma_check",
    "strang_dense",
    "circulant_split",
    "write_spectrum",
]

RANK_RTOL = 1e-10


@dataclass
class SpectrumReport:
    """Sorted eigenvalues with counts relative to the clusters at ``±1``."""

    eigenvalues: np.ndarray
    epsilon: float
    outliers: int
    near_zero: int

    @property
    def clustered(self):
        return self.eigenvalues.size - self.outliers


def cluster_report(eigs, epsilon):
    eigs = np.sort(np.asarray(eigs, dtype=float))
    dist = np.minimum(np.abs(eigs - 1.0), np.abs(eigs + 1.0))
    return SpectrumReport(
        eigenvalues=eigs,
        epsilon=float(epsilon),
        outliers=int(np.count_nonzero(dist > epsilon)),
        near_zero=int(np.count_nonzero(np.abs(eigs) < epsilon)),
    )


def _guard(op, guard):
    N = op.n * op.m
    if N > guard:
        raise SizeGuardError(f"dense size {N} exceeds guard {guard}")


def numerical_rank(A, rtol=RANK_RTOL):
    """Number of singular values above ``rtol * sigma_max``."""
    s = np.linalg.svd(np.asarray(A), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def dense_abs(A):
    """Matrix absolute value ``(A^T A)^{1/2}`` of a symmetric matrix."""
    w, V = np.linalg.eigh(A)
    return (V * np.abs(w)) @ V.T


def _sym_spectrum(A, Pinv_half):
    B = Pinv_half @ A @ Pinv_half
    return scipy.linalg.eigvalsh(0.5 * (B + B.T))


def preconditioned_spectrum(op, P=None, epsilon=0.2, guard=DENSE_GUARD):
    """Eigenvalues of ``P^{-1} Y T`` via the congruent ``P^{-1/2} Y T P^{-1/2}``.

    ``P`` may be a :class:`~allatonce.precond.SpectralPreconditioner`, a
    dense SPD array, or ``None`` (unpreconditioned ``Y T``).
    """
    _guard(op, guard)
    A = op.materialize_dense(guard=guard, symmetric=True)
    if P is None:
        eigs = scipy.linalg.eigvalsh(A)
    elif isinstance(P, np.ndarray):
        w, V = np.linalg.eigh(P)
        eigs = _sym_spectrum(A, (V / np.sqrt(w)) @ V.T)
    else:
        eigs = _sym_spectrum(A, P.dense(-0.5))
    return cluster_report(eigs, epsilon)


def square_identity_defect(op, P, guard=DENSE_GUARD):
    """Relative size of ``P^2 - T^T T - blockdiag(0, ..., 0, A_(1)^2)``.

    For one-step stencils the tau preconditioner satisfies this identity
    exactly; the return value is the max-abs error divided by
    ``max|A_(1)^2|``.
    """
    _guard(op, guard)
    if op.l != 1:
        raise ParameterError("the squared identity only holds for one-step stencils")
    T = op.materialize_dense(guard=guard)
    A1 = op.spatial_dense(1)
    corner = np.zeros_like(T)
    corner[-op.m :, -op.m :] = A1 @ A1
    D = P.dense(2.0) - T.T @ T - corner
    scale = max(np.abs(A1 @ A1).max(), np.finfo(float).tiny)
    return float(np.abs(D).max() / scale)


def normal_equation_rank_check(op, P, guard=DENSE_GUARD, rtol=RANK_RTOL):
    """Rank of ``(P^{-1}T)^T (P^{-1}T) - I`` and its largest entry in magnitude."""
    _guard(op, guard)
    T = op.materialize_dense(guard=guard)
    N = T.T @ P.dense(-2.0) @ T
    R = N - np.eye(N.shape[0])
    # threshold relative to ||N|| (>= 1), not ||R||, so a tiny R has rank 0
    s = np.linalg.svd(R, compute_uv=False)
    floor = rtol * max(1.0, np.linalg.norm(N, 2))
    return int(np.count_nonzero(s > floor)), float(np.abs(R).max())


@dataclass(frozen=True, eq=False)
class SymbolSampler:
    """Samples of the signed modulus ``±|g_j(x)|`` on a grid in ``[-pi, pi]``.

    Points with ``x >= 0`` contribute ``+|g_j(x)|`` and points with ``x < 0``
    contribute ``-|g_j(x)|``, one value per spatial mode ``j``.  Because
    ``|g_j|`` is even for real blocks this is the symmetric two-sheet
    distribution that ``eig(Y T)`` approaches.
    """

    stencil: object
    spatial: object
    grid: np.ndarray

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.grid, dtype=float))
        if grid.size < 1:
            raise ParameterError("sampler grid needs at least one point")
        if np.any(np.abs(grid) > np.pi):
            raise ParameterError("sampler grid must lie in [-pi, pi]")
        object.__setattr__(self, "grid", grid)

    @classmethod
    def uniform(cls, stencil, spatial, n):
        """Midpoints of ``n`` equal cells of ``[-pi, pi]``."""
        if n < 1:
            raise ParameterError("sample count must be >= 1")
        grid = -np.pi + (np.arange(n) + 0.5) * (2 * np.pi / n)
        return cls(stencil, spatial, grid)

    def samples(self):
        mod = symbol_modulus(self.stencil.block_eigs(self.spatial), self.grid)
        sign = np.where(self.grid >= 0, 1.0, -1.0)
        return np.sort((sign[:, None] * mod).ravel())


def symbol_distribution_compare(op, sampler=None, guard=DENSE_GUARD):
    """Max gap between sorted ``eig(Y T)`` and sorted ``±|g|`` samples."""
    _guard(op, guard)
    sampler = sampler or SymbolSampler.uniform(op.stencil, op.spatial, op.n)
    eigs = scipy.linalg.eigvalsh(op.materialize_dense(guard=guard, symmetric=True))
    samples = sampler.samples()
    if samples.size != eigs.size:
        raise ParameterError(f"sampler gives {samples.size} values for {eigs.size} eigenvalues")
    return float(np.abs(np.sort(eigs) - samples).max())


def rank_bound_lemma_check(stencil, spatial, n, K, guard=DENSE_GUARD, rtol=RANK_RTOL):
    """Numerical rank of ``C^{2K} - P^{2K}`` for the circulant and tau preconditioners.

    Requires ``n > 2 K l m``; the rank is then at most ``2 K l m``.
    """
    m, l = spatial.m, stencil.l
    if K < 1 or n <= 2 * K * l * m:
        raise ParameterError(f"need K >= 1 and n > 2*K*l*m = {2 * K * l * m}, got n={n}, K={K}")
    if n * m > guard:
        raise SizeGuardError(f"dense size {n * m} exceeds guard {guard}")
    C2 = build_circulant(stencil, spatial, n).dense(2.0)
    P2 = build_tau(stencil, spatial, n).dense(2.0)
    D = np.linalg.matrix_power(C2, K) - np.linalg.matrix_power(P2, K)
    scale = max(np.linalg.norm(np.linalg.matrix_power(C2, K), 2), np.finfo(float).tiny)
    s = np.linalg.svd(D, compute_uv=False)
    return int(np.count_nonzero(s > rtol * scale))


def strang_dense(op, guard=DENSE_GUARD):
    """Dense Strang block circulant: ``T`` with its bands wrapped around."""
    _guard(op, guard)
    n, m = op.n, op.m
    S = np.zeros((n * m, n * m))
    for k in range(op.l + 1):
        shift = np.roll(np.eye(n), k, axis=0)
        S += np.kron(shift, op.spatial_dense(k))
    return S


def circulant_split(op, C, guard=DENSE_GUARD, rtol=RANK_RTOL):
    """Split ``C^{-1} Y T = Q0 + R0`` with ``Q0 = C^{-1} Y S``.

    Returns ``(orthogonality_defect, symmetry_defect, rank(R0))`` where the
    defects are max-abs entries of ``Q0^T Q0 - I`` and ``Q0 - Q0^T``.
    """
    _guard(op, guard)
    n, m = op.n, op.m
    N = n * m
    Cinv = C.dense(-1.0)
    T = op.materialize_dense(guard=guard)
    S = strang_dense(op, guard=guard)

    def Y(A):
        return A.reshape(n, m, N)[::-1].reshape(N, N)

    Q0 = Cinv @ Y(S)
    R0 = Cinv @ Y(T - S)
    s = np.linalg.svd(R0, compute_uv=False)
    rank = int(np.count_nonzero(s > rtol * max(1.0, np.linalg.norm(Q0, 2))))
    return (
        float(np.abs(Q0.T @ Q0 - np.eye(N)).max()),
        float(np.abs(Q0 - Q0.T).max()),
        rank,
    )


def write_spectrum(path, eigenvalues):
    """Plain-text dump, one eigenvalue per line."""
    np.savetxt(path, np.sort(np.asarray(eigenvalues, dtype=float)), fmt="%.17g")
