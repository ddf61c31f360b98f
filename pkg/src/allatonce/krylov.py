"""Preconditioned MINRES and CG on the preconditioned normal equations.

Both solvers start from ``x0 = 0`` and take operators as plain callables.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ParameterError

__all__ = ["SolveReport", "minres", "cgne"]


@dataclass
class SolveReport:
    """Convergence record of one solve.

    ``residual_history`` holds the monitored norm (index 0 is the initial
    value).  For MINRES it is the 2-norm ``||b - A x_k||`` kept up to date by
    a short recurrence, unless ``monitor="preconditioned"`` was requested;
    ``preconditioned_history`` always holds the ``M^{-1}``-norm estimates
    produced by the Lanczos/QR recurrence, which are non-increasing.
    """

    iterations: int
    residual_history: np.ndarray
    final_true_relres: float
    converged: bool
    wall_time: float
    preconditioned_history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    breakdown: bool = False

    @property
    def relative_history(self):
        h = self.residual_history
        return h / h[0] if h.size and h[0] > 0 else h


def _identity(v):
    return v


def minres(apply_A, b, apply_Minv=None, tol=1e-6, maxit=500, monitor="residual"):
    """Preconditioned MINRES for a symmetric ``A`` and SPD preconditioner ``M``.

    Parameters
    ----------
    apply_A : callable
        ``v -> A v`` for symmetric (possibly indefinite) ``A``.
    b : numpy.ndarray
        Right-hand side.
    apply_Minv : callable, optional
        ``v -> M^{-1} v`` for SPD ``M``; identity when omitted.
    tol : float
        Relative tolerance on the monitored residual norm.
    maxit : int
        Iteration cap.
    monitor : {"residual", "preconditioned"}
        ``"residual"`` stops on ``||b - A x_k||_2 / ||b||_2 <= tol``.  The
        residual is updated alongside the solution (``r -= phi * A w``), so
        no extra products with ``A`` are spent; a converged flag is only
        issued after an explicit residual confirms it.
        ``"preconditioned"`` stops on the recurrence estimate of
        ``||b - A x_k||_{M^{-1}} / ||b||_{M^{-1}}``.

    Returns
    -------
    x : numpy.ndarray
    report : SolveReport
    """
    if monitor not in ("residual", "preconditioned"):
        raise ParameterError(f"unknown monitor {monitor!r}")
    if not 0 < tol < 1:
        raise ParameterError("tol must lie in (0, 1)")
    Minv = apply_Minv or _identity
    start = time.perf_counter()

    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return x, SolveReport(0, np.zeros(1), 0.0, True, time.perf_counter() - start, np.zeros(1))

    r1 = b.copy()
    y = Minv(r1)
    beta1 = float(r1 @ y)
    if beta1 <= 0:
        raise ParameterError("preconditioner is not positive definite")
    beta1 = math.sqrt(beta1)

    # Lanczos / QR state, following Paige & Saunders (1975)
    oldb = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = np.zeros_like(b)
    w2 = np.zeros_like(b)
    Aw = np.zeros_like(b)
    Aw2 = np.zeros_like(b)
    r2 = r1.copy()
    res = b.copy()

    true_hist = [bnorm]
    prec_hist = [beta1]
    converged = False
    breakdown = False
    itn = 0
    for itn in range(1, maxit + 1):
        v = y / beta
        Av = apply_A(v)
        y = Av.copy()
        if itn >= 2:
            y -= (beta / oldb) * r1
        alfa = float(v @ y)
        y -= (alfa / beta) * r2
        r1 = r2
        r2 = y
        y = Minv(r2)
        oldb = beta
        beta2 = float(r2 @ y)
        if not math.isfinite(beta2) or not math.isfinite(alfa):
            raise DivergenceError(f"non-finite Lanczos coefficients at iteration {itn}")
        if beta2 < 0:
            raise ParameterError("preconditioner is not positive definite")
        beta = math.sqrt(beta2)

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(math.hypot(gbar, beta), np.finfo(float).tiny)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w, w2 = (v - oldeps * w2 - delta * w) / gamma, w
        Aw, Aw2 = (Av - oldeps * Aw2 - delta * Aw) / gamma, Aw
        x += phi * w
        res -= phi * Aw

        true_hist.append(float(np.linalg.norm(res)))
        prec_hist.append(abs(phibar))

        if monitor == "residual":
            done = true_hist[-1] <= tol * bnorm
        else:
            done = prec_hist[-1] <= tol * beta1
        lucky = beta <= np.finfo(float).eps * beta1
        if not (done or lucky):
            continue
        res = b - apply_A(x)
        exact_norm = float(np.linalg.norm(res))
        exact_ok = exact_norm <= tol * bnorm
        if monitor == "residual":
            true_hist[-1] = exact_norm
        if (done and monitor == "preconditioned") or exact_ok:
            converged = True
            breakdown = lucky and not done
            break
        if lucky:
            breakdown = True
            break
        # the updated residual drifted from the explicit one; keep iterating from the latter
    if not np.all(np.isfinite(x)):
        raise DivergenceError("solution contains non-finite values")

    final = float(np.linalg.norm(b - apply_A(x))) / bnorm
    hist = np.array(true_hist if monitor == "residual" else prec_hist)
    return x, SolveReport(
        iterations=itn,
        residual_history=hist,
        final_true_relres=final,
        converged=converged,
        wall_time=time.perf_counter() - start,
        preconditioned_history=np.array(prec_hist),
        breakdown=breakdown,
    )


def cgne(op, P, b, tol=1e-6, maxit=500):
    """CG on ``(P^{-1} T)^T (P^{-1} T) u = (P^{-1} T)^T P^{-1} b``.

    ``op`` provides ``matvec``/``transpose_matvec`` for the unpermuted ``T``
    and ``P`` is a built preconditioner (``None`` for the plain normal
    equations).  Convergence is measured on the normal-equation residual
    relative to its initial value.
    """
    if not 0 < tol < 1:
        raise ParameterError("tol must lie in (0, 1)")
    Pinv = P.apply_inverse if P is not None else _identity
    start = time.perf_counter()

    def normal(v):
        return op.transpose_matvec(Pinv(Pinv(op.matvec(v))))

    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    rhs = op.transpose_matvec(Pinv(Pinv(b)))
    rnorm0 = float(np.linalg.norm(rhs))
    bnorm = float(np.linalg.norm(b))
    if rnorm0 == 0.0:
        return x, SolveReport(0, np.zeros(1), 0.0, True, time.perf_counter() - start)

    r = rhs.copy()
    p = r.copy()
    rr = float(r @ r)
    hist = [math.sqrt(rr)]
    converged = False
    itn = 0
    for itn in range(1, maxit + 1):
        q = normal(p)
        pq = float(p @ q)
        if not math.isfinite(pq):
            raise DivergenceError(f"non-finite curvature at iteration {itn}")
        if pq <= 0:
            break
        alpha = rr / pq
        x += alpha * p
        r -= alpha * q
        rr_new = float(r @ r)
        hist.append(math.sqrt(rr_new))
        if hist[-1] <= tol * rnorm0:
            converged = True
            break
        p = r + (rr_new / rr) * p
        rr = rr_new

    final = float(np.linalg.norm(b - op.matvec(x))) / bnorm
    return x, SolveReport(itn, np.array(hist), final, converged, time.perf_counter() - start)
