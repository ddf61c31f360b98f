"""Matrix-free block Toeplitz operators.

The all-at-once matrix is lower block triangular and banded::

    T = [A0               ]
        [A1  A0           ]
        [A2  A1  A0       ]
        [    A2  A1  A0   ]
        [        ...      ]

Each block ``A_(k) = mu_k M + kappa_k K`` is applied in the DST basis of
space, so a product costs two spatial transforms plus ``O(l n m)`` work.
The flip ``Y = Y_n ⊗ I_m`` reverses the block order and makes ``Y T``
symmetric.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .errors import DimensionError, ParameterError, SizeGuardError
from .transforms import as_blocks, space_basis_matrix

__all__ = ["AllAtOnceOperator", "flip", "DENSE_GUARD"]

DENSE_GUARD = 4096


def flip(x, n):
    """Reverse the order of the ``n`` time blocks of a flat vector."""
    x = np.asarray(x)
    if x.size % n:
        raise DimensionError(f"length {x.size} is not a multiple of n={n}")
    return x.reshape(n, -1)[::-1].reshape(x.shape).copy()


class AllAtOnceOperator:
    """The block Toeplitz matrix generated by a stencil over ``n`` time steps.

    Parameters
    ----------
    n : int
        Number of time blocks.
    spatial : SpectralSpatialOperator
    stencil : TimeStencil
    """

    def __init__(self, n, spatial, stencil):
        if n < 1:
            raise ParameterError("n must be >= 1")
        self.n = int(n)
        self.spatial = spatial
        self.stencil = stencil
        self.m = spatial.m
        self.block_eigs = stencil.block_eigs(spatial)

    @property
    def shape(self):
        N = self.n * self.m
        return (N, N)

    @property
    def l(self):
        return self.stencil.l

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.size != self.n * self.m:
            raise DimensionError(f"expected vector of length {self.n * self.m}, got {x.size}")
        return x

    def _banded(self, x, transpose):
        X = as_blocks(self._check(x), self.n, self.m)
        Xh = self.spatial.to_spectral(X)
        Yh = np.zeros_like(Xh)
        n = self.n
        for k, ak in enumerate(self.block_eigs):
            if k >= n:
                break
            if transpose:
                Yh[: n - k] += ak * Xh[k:]
            else:
                Yh[k:] += ak * Xh[: n - k]
        return self.spatial.from_spectral(Yh).reshape(np.shape(x))

    def matvec(self, x):
        """``y_k = sum_j A_(j) x_{k-j}`` with out-of-range terms dropped."""
        return self._banded(x, transpose=False)

    def transpose_matvec(self, x):
        """``y_k = sum_j A_(j) x_{k+j}``; the blocks are symmetric."""
        return self._banded(x, transpose=True)

    def flip(self, x):
        return flip(self._check(x), self.n)

    def sym_matvec(self, x):
        """Apply the symmetric matrix ``Y T``."""
        return flip(self.matvec(x), self.n)

    def sparse_matrix(self):
        """Assemble ``T`` from the sparse stencil blocks (cross-check path)."""
        M = self.spatial.mass_matrix()
        K = self.spatial.stiffness_matrix()
        T = sp.csr_matrix(self.shape)
        for k, (mu, ka) in enumerate(self.stencil.coeffs):
            if k >= self.n:
                break
            shift = sp.eye(self.n, k=-k)
            T = T + sp.kron(shift, mu * M + ka * K)
        return sp.csr_matrix(T)

    def spatial_dense(self, k):
        """Dense ``A_(k)`` from its eigenvalues and the dense DST."""
        U = space_basis_matrix(self.spatial.spatial_shape)
        return (U * self.block_eigs[k]) @ U

    def materialize_dense(self, guard=DENSE_GUARD, symmetric=False):
        """Dense ``T`` (or ``Y T`` if ``symmetric``).

        Raises :class:`SizeGuardError` when ``n*m`` exceeds ``guard``.
        """
        N = self.n * self.m
        if N > guard:
            raise SizeGuardError(f"dense size {N} exceeds guard {guard}")
        T = np.zeros((N, N))
        for k in range(min(self.l + 1, self.n)):
            T += np.kron(np.eye(self.n, k=-k), self.spatial_dense(k))
        if symmetric:
            T = T.reshape(self.n, self.m, N)[::-1].reshape(N, N)
        return T

    def as_linear_operator(self, symmetric=True):
        """Wrap as a SciPy :class:`~scipy.sparse.linalg.LinearOperator`."""
        if symmetric:
            return LinearOperator(self.shape, matvec=self.sym_matvec, rmatvec=self.sym_matvec, dtype=float)
        return LinearOperator(self.shape, matvec=self.matvec, rmatvec=self.transpose_matvec, dtype=float)
