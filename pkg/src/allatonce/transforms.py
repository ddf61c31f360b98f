"""Fast orthonormal transforms acting on block vectors.

A block vector of ``n`` time blocks, each with ``m`` spatial unknowns, is
stored as a flat array of length ``n*m`` (time-major, so block ``k`` is
``x[k*m:(k+1)*m]``).  For two-dimensional problems the spatial index is
row-major with ``x`` fastest, i.e. a block reshapes to ``(m1, m1)`` with
the last axis running along ``x``.

The DST-I matrix

.. math::

    S_n = \\sqrt{2/(n+1)}\\,[\\sin(ij\\pi/(n+1))]_{i,j=1}^n

is symmetric and orthogonal, hence involutory.  It diagonalizes the
tridiagonal matrix ``P_n = tridiag(1/2, 0, 1/2)`` and the 1D Dirichlet
Laplacian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import DimensionError, ParameterError

__all__ = [
    "dst1",
    "dst1_matrix",
    "space_basis_matrix",
    "TransformPlan",
    "as_blocks",
    "apply_kron_transform",
    "fft_time",
]


def dst1(v, axis=-1, workers=None):
    """Orthonormal type-I discrete sine transform along ``axis``.

    Computed from a complex FFT of the odd extension of length ``2(n+1)``.

    Parameters
    ----------
    v : array_like
        Real input; the transform runs along ``axis`` of length ``n >= 1``.
    axis : int
        Axis to transform.
    workers : int, optional
        Passed to :func:`scipy.fft.rfft` for threading over the other axes.

    Returns
    -------
    numpy.ndarray
        ``S_n v`` along ``axis``, same shape as ``v``.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        raise DimensionError("dst1 needs at least a 1-D array")
    x = np.moveaxis(v, axis, -1)
    n = x.shape[-1]
    if n < 1:
        raise DimensionError("dst1 length must be >= 1")
    ext = np.zeros(x.shape[:-1] + (2 * (n + 1),))
    ext[..., 1 : n + 1] = x
    ext[..., n + 2 :] = -x[..., ::-1]
    spec = scipy.fft.rfft(ext, axis=-1, workers=workers)
    # spec[k] = -2i * sum_j x_j sin(pi j k / (n+1))
    out = spec[..., 1 : n + 1].imag * (-0.5 * math.sqrt(2.0 / (n + 1)))
    return np.moveaxis(out, -1, axis)


def dst1_matrix(n):
    """Dense ``S_n``; meant for tests and small dense analysis."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    idx = np.arange(1, n + 1)
    return math.sqrt(2.0 / (n + 1)) * np.sin(np.outer(idx, idx) * np.pi / (n + 1))


def space_basis_matrix(spatial_shape):
    """Dense ``U_m``: ``S_m1`` in 1D, ``S_m1 ⊗ S_m2`` in 2D."""
    mats = [dst1_matrix(s) for s in spatial_shape]
    out = mats[0]
    for mat in mats[1:]:
        out = np.kron(out, mat)
    return out


def as_blocks(x, n, m):
    """View ``x`` as an ``(n, m)`` array, raising on a size mismatch."""
    x = np.asarray(x)
    if x.size != n * m:
        raise DimensionError(f"expected {n}*{m}={n * m} entries, got {x.size}")
    return x.reshape(n, m)


@dataclass(frozen=True)
class TransformPlan:
    """Sizes of the time and space transforms for an ``(n, m)`` block layout.

    ``spatial_shape`` is ``(m,)`` in 1D or ``(m1, m2)`` in 2D.  The plan holds
    no mutable state, so one instance can be shared between operators and
    threads.
    """

    n: int
    spatial_shape: tuple
    workers: int | None = None

    def __post_init__(self):
        shape = tuple(int(s) for s in self.spatial_shape)
        if self.n < 1 or not shape or any(s < 1 for s in shape) or len(shape) > 2:
            raise ParameterError(f"invalid plan sizes n={self.n}, spatial_shape={shape}")
        object.__setattr__(self, "spatial_shape", shape)

    @property
    def m(self):
        return math.prod(self.spatial_shape)

    @property
    def dim(self):
        return len(self.spatial_shape)

    def _grid(self, x):
        return as_blocks(x, self.n, self.m).reshape((self.n,) + self.spatial_shape)

    def space(self, x):
        """Apply ``I_n ⊗ U_m`` (spatial DST on every time block)."""
        g = self._grid(x)
        for ax in range(1, 1 + self.dim):
            g = dst1(g, axis=ax, workers=self.workers)
        return g.reshape(np.shape(x))

    def time(self, x):
        """Apply ``S_n ⊗ I_m``."""
        g = as_blocks(x, self.n, self.m)
        return dst1(g, axis=0, workers=self.workers).reshape(np.shape(x))

    def kron(self, x):
        """Apply ``S_n ⊗ U_m``; an involution."""
        g = self._grid(x)
        for ax in range(0, 1 + self.dim):
            g = dst1(g, axis=ax, workers=self.workers)
        return g.reshape(np.shape(x))

    def fft_time(self, x, inverse=False):
        """Unitary DFT of length ``n`` along the time index of each component."""
        g = as_blocks(x, self.n, self.m)
        if inverse:
            out = scipy.fft.ifft(g, axis=0, norm="ortho", workers=self.workers)
        else:
            out = scipy.fft.fft(g, axis=0, norm="ortho", workers=self.workers)
        return out.reshape(np.shape(x))


def apply_kron_transform(plan, x, time=True, space=True):
    """Apply ``S_n ⊗ U_m`` (or only one factor) to a flat block vector.

    With ``U_m = S_m`` (or ``S_{m1} ⊗ S_{m2}`` in 2D) the map is symmetric and
    orthogonal, so applying it twice returns ``x``.
    """
    if time and space:
        return plan.kron(x)
    if time:
        return plan.time(x)
    if space:
        return plan.space(x)
    return np.array(x, dtype=float, copy=True)


def fft_time(plan, x, direction="forward"):
    """Unitary FFT along time; ``direction`` is ``"forward"`` or ``"inverse"``."""
    if direction not in ("forward", "inverse"):
        raise ParameterError(f"unknown direction {direction!r}")
    return plan.fft_time(x, inverse=(direction == "inverse"))
