"""Finite-difference spatial operators, time stencils and right-hand sides.

Space is the open interval (or square) ``(0, L)`` with homogeneous Dirichlet
data and ``m1`` interior nodes per direction, so ``h = L/(m1+1)``.  The mass
matrix is the identity and the stiffness matrix is ``(a/h^2) tridiag(-1,2,-1)``
(or its Kronecker sum in 2D), both diagonalized by the DST-I.  Everything
that depends on space is therefore carried as eigenvalues only.

A time stencil lists the ``l+1`` Toeplitz blocks as pairs ``(mu_k, kappa_k)``
with ``A_(k) = mu_k M + kappa_k K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError
from .transforms import TransformPlan, dst1

__all__ = [
    "SpectralSpatialOperator",
    "TimeStencil",
    "ProblemSpec",
    "SCHEMES",
    "build_laplacian_1d",
    "build_laplacian_2d",
    "build_spatial",
    "make_stencil",
    "evaluate_initial",
    "evaluate_forcing",
    "build_rhs",
    "INITIAL_CONDITIONS",
    "FORCINGS",
]

SCHEMES = ("theta", "bdf2", "wave-two-step", "wave-central")


@dataclass(frozen=True, eq=False)
class SpectralSpatialOperator:
    """Mass/stiffness pair stored by its DST eigenvalues.

    Attributes
    ----------
    m1 : int
        Interior nodes per direction.
    dim : int
        1 or 2.
    mass_eigs, stiff_eigs : numpy.ndarray
        Length ``m = m1**dim``; ordering is row-major with ``x`` fastest.
    h, a, L : float
        Grid spacing, diffusion coefficient, domain length.
    """

    m1: int
    dim: int
    mass_eigs: np.ndarray
    stiff_eigs: np.ndarray
    h: float
    a: float
    L: float

    @property
    def m(self):
        return self.m1**self.dim

    @property
    def spatial_shape(self):
        return (self.m1,) * self.dim

    def nodes(self):
        """Interior node coordinates ``x_i = i h``, ``i = 1..m1``."""
        return self.h * np.arange(1, self.m1 + 1)

    def mesh(self):
        """Coordinate arrays shaped like one block (``x`` along the last axis)."""
        x = self.nodes()
        if self.dim == 1:
            return (x,)
        X, Y = np.meshgrid(x, x, indexing="xy")
        return (X, Y)

    def to_spectral(self, z):
        """Apply ``U_m`` to the trailing spatial index of ``z`` (shape ``(..., m)``)."""
        z = np.asarray(z, dtype=float)
        g = z.reshape(z.shape[:-1] + self.spatial_shape)
        for ax in range(g.ndim - self.dim, g.ndim):
            g = dst1(g, axis=ax)
        return g.reshape(z.shape)

    # U_m is symmetric and involutory
    from_spectral = to_spectral

    def apply_eigs(self, eigs, z):
        """Compute ``U_m diag(eigs) U_m z`` for a single spatial vector or a stack."""
        return self.from_spectral(eigs * self.to_spectral(z))

    def solve_eigs(self, eigs, z):
        return self.from_spectral(self.to_spectral(z) / eigs)

    def plan(self, n):
        return TransformPlan(n, self.spatial_shape)

    def stiffness_matrix(self):
        """Sparse ``K_m``; the cross-check path for the spectral representation."""
        k1 = sp.diags(
            [-np.ones(self.m1 - 1), 2.0 * np.ones(self.m1), -np.ones(self.m1 - 1)],
            [-1, 0, 1],
        ) * (self.a / self.h**2)
        if self.dim == 1:
            return sp.csr_matrix(k1)
        eye = sp.identity(self.m1)
        return sp.csr_matrix(sp.kron(eye, k1) + sp.kron(k1, eye))

    def mass_matrix(self):
        return sp.identity(self.m, format="csr")


def _laplacian_eigs(m1, a, L):
    h = L / (m1 + 1)
    j = np.arange(1, m1 + 1)
    return h, (a / h**2) * (2.0 - 2.0 * np.cos(j * np.pi / (m1 + 1)))


def _check_space_args(m, a, L):
    if int(m) != m or m < 1:
        raise ParameterError(f"number of interior nodes must be a positive integer, got {m}")
    if not a > 0:
        raise ParameterError(f"diffusion coefficient must be positive, got {a}")
    if not L > 0:
        raise ParameterError(f"domain length must be positive, got {L}")


def build_laplacian_1d(m, a=1.0, L=1.0):
    """1D Dirichlet finite-difference Laplacian ``-a u''`` on ``m`` interior nodes."""
    _check_space_args(m, a, L)
    h, lam = _laplacian_eigs(int(m), a, L)
    return SpectralSpatialOperator(int(m), 1, np.ones(int(m)), lam, h, float(a), float(L))


def build_laplacian_2d(m1, a=1.0, L=1.0):
    """5-point Laplacian on the square, ``m1**2`` unknowns.

    Eigenvalue ``(j-1)*m1 + i`` (1-based) is ``lam_i + lam_j``.
    """
    _check_space_args(m1, a, L)
    h, lam = _laplacian_eigs(int(m1), a, L)
    stiff = (lam[None, :] + lam[:, None]).ravel()
    return SpectralSpatialOperator(int(m1), 2, np.ones(int(m1) ** 2), stiff, h, float(a), float(L))


def build_spatial(spec):
    builder = build_laplacian_1d if spec.dim == 1 else build_laplacian_2d
    return builder(spec.m1, spec.a, spec.L)


@dataclass(frozen=True)
class TimeStencil:
    """Coefficients ``(mu_k, kappa_k)`` of the blocks ``A_(0..l)``."""

    coeffs: tuple
    tau: float
    scheme: str = "custom"

    def __post_init__(self):
        coeffs = tuple((float(mu), float(ka)) for mu, ka in self.coeffs)
        if len(coeffs) < 2:
            raise ParameterError("a stencil needs at least two blocks")
        if not self.tau > 0:
            raise ParameterError(f"time step must be positive, got {self.tau}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def l(self):
        return len(self.coeffs) - 1

    def block_eigs(self, spatial):
        """Array ``(l+1, m)`` with the eigenvalues of every ``A_(k)``."""
        return np.array([mu * spatial.mass_eigs + ka * spatial.stiff_eigs for mu, ka in self.coeffs])

    def check_spd(self, spatial):
        """Raise unless ``A_(0)`` is positive definite on ``spatial``."""
        a0 = self.block_eigs(spatial)[0]
        if np.any(a0 <= 0):
            raise ParameterError("leading block A_(0) is not positive definite")


# ---------------------------------------------------------------------------
# initial data and forcing


def _sin2(x):
    return np.sin(np.pi * x) ** 2


def _bump(x):
    inside = (x >= 3 / 8) & (x <= 5 / 8)
    return np.where(inside, np.cos(4 * np.pi * (x - 0.5)) ** 2, 0.0)


def _poly2d(x, y):
    return x * (x - 1) * y * (y - 1)


def _zero(*coords):
    return np.zeros_like(coords[0])


def _wave2d_forcing(x, y, t):
    return x * (x - 1) * y * (y - 1) / (t + 1) - 2 * ((t + 1) * np.log(t + 1) - t + 1) * (
        x * (x - 1) + y * (y - 1)
    )


def _one(*args):
    return np.ones_like(args[0])


INITIAL_CONDITIONS: dict[str, Callable] = {
    "sin2": _sin2,
    "bump": _bump,
    "poly2d": _poly2d,
    "zero": _zero,
}

FORCINGS: dict[str, Callable] = {
    "wave2d": _wave2d_forcing,
    "one": _one,
}


@dataclass(frozen=True)
class ProblemSpec:
    """Everything needed to assemble one all-at-once system.

    ``initial`` and ``forcing`` are either names from
    :data:`INITIAL_CONDITIONS` / :data:`FORCINGS` or callables.  Initial
    callables take the node coordinates (``x`` or ``x, y``); forcing
    callables take the coordinates followed by ``t``.  ``forcing=None``
    means ``f = 0``.
    """

    equation: str
    scheme: str
    n: int
    m1: int
    dim: int = 1
    T: float = 1.0
    a: float = 1.0
    theta: float | None = None
    L: float = 1.0
    initial: str | Callable = "zero"
    forcing: str | Callable | None = field(default=None)

    def __post_init__(self):
        if self.equation not in ("heat", "wave"):
            raise ParameterError(f"unknown equation {self.equation!r}")
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "theta":
            if self.theta is None or not 0.0 <= self.theta <= 1.0:
                raise ParameterError("theta scheme needs theta in [0, 1]")
        if self.dim not in (1, 2):
            raise ParameterError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 1 or self.m1 < 1:
            raise ParameterError("n and m1 must be >= 1")
        if not self.T > 0:
            raise ParameterError("final time must be positive")
        if isinstance(self.initial, str) and self.initial not in INITIAL_CONDITIONS:
            raise ParameterError(f"unknown initial condition {self.initial!r}")
        if isinstance(self.forcing, str) and self.forcing not in FORCINGS:
            raise ParameterError(f"unknown forcing {self.forcing!r}")

    @property
    def tau(self):
        return self.T / self.n

    @property
    def m(self):
        return self.m1**self.dim


def make_stencil(spec):
    """Block Toeplitz coefficients for ``spec.scheme``.

    ========================  ===================================================
    ``theta``                 ``[(1, θτ), (-1, (1-θ)τ)]``
    ``bdf2``                  ``[(3/2, τ), (-2, 0), (1/2, 0)]``
    ``wave-two-step``         ``[(1, τ²), (-2, 0), (1, 0)]``
    ``wave-central``          ``[(1, 0), (-2, τ²), (1, 0)]``
    ========================  ===================================================
    """
    tau = spec.tau
    if spec.scheme == "theta":
        th = spec.theta
        coeffs = [(1.0, th * tau), (-1.0, (1.0 - th) * tau)]
    elif spec.scheme == "bdf2":
        coeffs = [(1.5, tau), (-2.0, 0.0), (0.5, 0.0)]
    elif spec.scheme == "wave-two-step":
        coeffs = [(1.0, tau**2), (-2.0, 0.0), (1.0, 0.0)]
    elif spec.scheme == "wave-central":
        coeffs = [(1.0, 0.0), (-2.0, tau**2), (1.0, 0.0)]
    else:
        raise ParameterError(f"unknown scheme {spec.scheme!r}")
    stencil = TimeStencil(tuple(coeffs), tau, spec.scheme)
    if spec.n < stencil.l:
        raise ParameterError(f"n={spec.n} is shorter than the stencil length l={stencil.l}")
    return stencil


def _resolve(obj, table):
    return table[obj] if isinstance(obj, str) else obj


def evaluate_initial(spec, spatial):
    """Sample the initial condition at the interior nodes (length ``m``)."""
    fn = _resolve(spec.initial, INITIAL_CONDITIONS)
    return np.asarray(fn(*spatial.mesh()), dtype=float).ravel()


def evaluate_forcing(spec, spatial, t):
    """Sample ``f(·, t)`` at the interior nodes; zeros when there is no forcing."""
    if spec.forcing is None:
        return np.zeros(spatial.m)
    fn = _resolve(spec.forcing, FORCINGS)
    coords = spatial.mesh()
    return np.broadcast_to(np.asarray(fn(*coords, t), dtype=float), coords[0].shape).ravel()


def build_rhs(spec, spatial, stencil):
    """Right-hand side of the (unpermuted) all-at-once system, length ``n*m``.

    Start-up values are folded into the first ``l`` blocks so the matrix
    stays block Toeplitz:

    * ``theta``: block 1 gains ``(M - (1-θ)τK) u0 = -A_(1) u0``.
    * ``bdf2``: ``u1`` comes from one backward-Euler step; block 1 is
      ``A_(0) u1`` and block 2 gains ``-A_(2) u0``.
    * wave schemes: zero initial velocity means ``u1 = u0``; block 1 is
      ``A_(0) u0`` and block 2 gains ``-A_(2) u0``.
    """
    n, m, tau = spec.n, spatial.m, stencil.tau
    eigs = stencil.block_eigs(spatial)
    u0 = evaluate_initial(spec, spatial)
    forcing = None
    if spec.forcing is not None:
        forcing = np.array([evaluate_forcing(spec, spatial, k * tau) for k in range(n + 1)])

    F = np.zeros((n, m))
    scheme = stencil.scheme
    if scheme == "theta":
        th = spec.theta
        if forcing is not None:
            F += th * tau * forcing[1:] + (1.0 - th) * tau * forcing[:-1]
        F[0] -= spatial.apply_eigs(eigs[1], u0)
        return F.ravel()

    if scheme == "bdf2":
        if forcing is not None:
            F += tau * forcing[1:]
        first = spatial.mass_eigs * spatial.to_spectral(u0)
        if forcing is not None:
            first += tau * spatial.to_spectral(forcing[1])
        u1 = spatial.from_spectral(first / (spatial.mass_eigs + tau * spatial.stiff_eigs))
        F[0] = spatial.apply_eigs(eigs[0], u1)
    elif scheme in ("wave-two-step", "wave-central"):
        if forcing is not None:
            src = forcing[1:] if scheme == "wave-two-step" else forcing[:-1]
            F += tau**2 * src
        F[0] = spatial.apply_eigs(eigs[0], u0)
    else:
        raise ParameterError(f"no right-hand side rule for scheme {scheme!r}")
    if n >= 2:
        F[1] -= spatial.apply_eigs(eigs[2], u0)
    return F.ravel()
