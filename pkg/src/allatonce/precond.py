"""Sine-transform (tau) and absolute-value block circulant preconditioners.

Both preconditioners are diagonal in a fixed orthonormal basis, so they are
stored as an ``(n, m)`` array of eigenvalues.  With ``a_kj`` the eigenvalue
of ``A_(k)`` on spatial mode ``j`` and ``g_j(x) = sum_k a_kj exp(i k x)``:

* tau: ``d[i, j] = |g_j(i pi / (n+1))|``, ``i = 1..n``, basis ``S_n ⊗ U_m``.
  This is the square root of ``sum_k P_n^k ⊗ qbar_k``; writing
  ``cos(kx) = T_k(cos x)`` turns ``|g|^2`` into a polynomial in ``cos x``,
  and the eigenvalues of ``P_n`` are exactly ``cos(i pi/(n+1))``, so the
  polynomial coefficients never need to be formed.
* circulant: ``d[i, j] = |g_j(2 pi i / n)|``, ``i = 0..n-1``, basis
  ``F_n ⊗ U_m``.  These are the singular values of the Strang block
  circulant built from the same blocks, i.e. ``C = sqrt(S^T S)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularSymbolError, StateError
from .transforms import TransformPlan, dst1_matrix, space_basis_matrix

__all__ = [
    "SpectralPreconditioner",
    "symbol_modulus",
    "build_tau",
    "build_circulant",
    "apply_inverse",
    "apply_inverse_normal",
    "SINGULAR_RTOL",
]

SINGULAR_RTOL = 1e-14
IMAG_RTOL = 1e-12


def symbol_modulus(block_eigs, x):
    """``|g_j(x_i)|`` for every sample ``x_i`` and spatial mode ``j``.

    ``block_eigs`` has shape ``(l+1, m)``; returns shape ``(len(x), m)``.
    """
    x = np.asarray(x, dtype=float)
    phases = np.exp(1j * np.outer(x, np.arange(block_eigs.shape[0])))
    return np.abs(phases @ block_eigs)


@dataclass(frozen=True, eq=False)
class SpectralPreconditioner:
    """An SPD matrix ``Q diag(d) Q^*`` with ``Q`` a fast transform.

    ``kind`` is ``"tau"`` or ``"circulant"``; ``diag`` has shape ``(n, m)``.
    """

    kind: str
    diag: np.ndarray
    spatial_shape: tuple

    @property
    def n(self):
        return self.diag.shape[0]

    @property
    def m(self):
        return self.diag.shape[1]

    @property
    def plan(self):
        return TransformPlan(self.n, self.spatial_shape)

    def _scale(self, v, power):
        v = np.asarray(v, dtype=float)
        if v.size != self.diag.size:
            raise StateError(f"preconditioner is {self.n}x{self.m} blocks, vector has {v.size} entries")
        plan = self.plan
        d = self.diag**power
        if self.kind == "tau":
            return plan.kron(d.reshape(v.shape) * plan.kron(v))
        vh = plan.fft_time(plan.space(v))
        z = plan.fft_time(d.reshape(vh.shape) * vh, inverse=True)
        if np.linalg.norm(z.imag) > IMAG_RTOL * max(np.linalg.norm(z.real), np.finfo(float).tiny):
            raise StateError("circulant application left a non-negligible imaginary part")
        return plan.space(z.real)

    def apply_inverse(self, v):
        """Solve ``P z = v``."""
        return self._scale(v, -1.0)

    def apply(self, v):
        """Multiply by ``P``."""
        return self._scale(v, 1.0)

    def apply_power(self, v, power):
        return self._scale(v, power)

    def basis(self):
        """Dense unitary ``Q`` with ``P = Q diag(d).ravel() Q^*``."""
        U = space_basis_matrix(self.spatial_shape)
        if self.kind == "tau":
            return np.kron(dst1_matrix(self.n), U)
        k = np.arange(self.n)
        F = np.exp(2j * np.pi * np.outer(k, k) / self.n) / np.sqrt(self.n)
        return np.kron(F, U)

    def dense(self, power=1.0):
        """Dense ``P**power``; for small analysis problems only."""
        Q = self.basis()
        D = (self.diag**power).ravel()
        out = (Q * D) @ Q.conj().T
        # circulant case: imaginary part is rounding noise for a real symmetric matrix
        return out.real


def _finish(kind, diag, spatial, rtol):
    floor = rtol * diag.max()
    bad = diag <= floor
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise SingularSymbolError(
            f"{kind} symbol modulus {diag[i, j]:.3e} at mode ({i}, {j}) is below {floor:.3e}"
        )
    return SpectralPreconditioner(kind, diag, tuple(spatial.spatial_shape))


def build_tau(stencil, spatial, n, rtol=SINGULAR_RTOL):
    """The sine-transform preconditioner for ``Y T`` with ``n`` time blocks."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    x = np.arange(1, n + 1) * np.pi / (n + 1)
    return _finish("tau", symbol_modulus(stencil.block_eigs(spatial), x), spatial, rtol)


def build_circulant(stencil, spatial, n, rtol=SINGULAR_RTOL):
    """The absolute-value Strang block circulant preconditioner."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    x = 2 * np.pi * np.arange(n) / n
    return _finish("circulant", symbol_modulus(stencil.block_eigs(spatial), x), spatial, rtol)


def apply_inverse(P, v):
    if P is None:
        raise StateError("preconditioner has not been built")
    return P.apply_inverse(v)


def apply_inverse_normal(P, op, v):
    """``T^T P^{-2} T v``: the operator of CG on the preconditioned normal equations."""
    if (P.n, P.m) != (op.n, op.m):
        raise StateError("preconditioner and operator sizes differ")
    return op.transpose_matvec(P.apply_inverse(P.apply_inverse(op.matvec(v))))
