"""Experiment configuration, single runs and table suites.

A run builds one all-at-once system, optionally a preconditioner, solves it
(or computes a dense preconditioned spectrum) and reports a flat record
suitable for CSV output.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import analysis
from .discretize import FORCINGS, INITIAL_CONDITIONS, SCHEMES, ProblemSpec, build_rhs, build_spatial, make_stencil
from .errors import AllAtOnceError, DivergenceError, ParameterError, SingularSymbolError
from .krylov import cgne, minres
from .precond import build_circulant, build_tau
from .toeplitz_ops import DENSE_GUARD, AllAtOnceOperator, flip

__all__ = [
    "CSV_COLUMNS",
    "EXAMPLES",
    "TABLES",
    "ReferenceRow",
    "TableSpec",
    "ExperimentConfig",
    "RunResult",
    "build_problem",
    "solve",
    "run",
    "run_suite",
    "write_rows",
    "format_value",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "equation",
    "scheme",
    "n",
    "m_plus_1",
    "dof",
    "preconditioner",
    "solver",
    "iterations",
    "converged",
    "final_true_relres",
    "wall_time_seconds",
)

PRECONDITIONERS = ("none", "circulant", "tau")
SOLVERS = ("minres", "cgne")
MODES = ("solve", "spectrum")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2

# problem data of the four benchmark examples
EXAMPLES = {
    "ex1": dict(equation="heat", dim=1, a=1e-5, initial="sin2", forcing=None),
    "ex2": dict(equation="heat", dim=2, a=1e-5, initial="poly2d", forcing=None),
    "ex3": dict(equation="wave", dim=1, a=1.0, initial="bump", forcing=None),
    "ex4": dict(equation="wave", dim=2, a=1.0, initial="poly2d", forcing="wave2d"),
}


@dataclass(frozen=True)
class ReferenceRow:
    """Reference iteration counts for one ``(n, m+1)`` pair.

    ``None`` means the entry is missing; a string such as ``">500"``
    records a failure to converge within that many iterations.
    """

    n: int
    m_plus_1: int
    circulant: int | str | None
    tau: int | None


@dataclass(frozen=True)
class TableSpec:
    table_id: str
    example: str
    scheme: str
    theta: float | None
    rows: tuple

    def config(self, row, preconditioner, **overrides):
        base = dict(EXAMPLES[self.example])
        base.update(
            scheme=self.scheme,
            theta=self.theta,
            n=row.n,
            m_plus_1=row.m_plus_1,
            preconditioner=preconditioner,
        )
        base.update(overrides)
        return ExperimentConfig(**base)


def _grid(values):
    return tuple(ReferenceRow(2**a, 2**b, c, t) for a, b, c, t in values)


TABLES = {
    "T1": TableSpec(
        "T1", "ex1", "theta", 0.5,
        _grid([
            (8, 8, 59, 16), (8, 9, 61, 16), (8, 10, 62, 16), (8, 11, 62, 16),
            (9, 8, 60, 17), (9, 9, 61, 17), (9, 10, 62, 17), (9, 11, 64, 17),
            (10, 8, 59, 18), (10, 9, 67, 18), (10, 10, 67, 18), (10, 11, 62, 18),
            (11, 8, 65, 19), (11, 9, 68, 19), (11, 10, 70, 19), (11, 11, 70, 19),
        ]),
    ),
    "T2": TableSpec(
        "T2", "ex1", "bdf2", None,
        _grid([
            (8, 8, 66, 16), (8, 9, 71, 16), (8, 10, 72, 16), (8, 11, 78, 16),
            (9, 8, 67, 17), (9, 9, 75, 17), (9, 10, 75, 17), (9, 11, 77, 17),
            (10, 8, 68, 18), (10, 9, 77, 18), (10, 10, 76, 18), (10, 11, 84, 18),
            (11, 8, 80, 19), (11, 9, 90, 19), (11, 10, 85, 19), (11, 11, 84, 19),
        ]),
    ),
    "T3": TableSpec(
        "T3", "ex2", "theta", 1.0,
        _grid([(5, 5, 34, 11), (6, 6, 48, 11), (7, 7, 73, 13), (8, 8, 80, 14)]),
    ),
    "T4": TableSpec(
        "T4", "ex2", "bdf2", None,
        _grid([(5, 5, 42, 11), (6, 6, 71, 11), (7, 7, 88, 13), (8, 8, 111, 13)]),
    ),
    "T5": TableSpec(
        "T5", "ex3", "wave-two-step", None,
        _grid([(7, 7, 190, 30), (8, 8, 493, 33), (9, 9, ">500", 33), (10, 10, None, 37)]),
    ),
    "T6": TableSpec(
        "T6", "ex3", "wave-central", None,
        _grid([(7, 7, ">500", 3), (8, 8, None, 3), (9, 9, None, 3), (10, 10, None, 4)]),
    ),
    "T7": TableSpec(
        "T7", "ex4", "wave-two-step", None,
        _grid([(5, 5, 44, 18), (6, 6, 79, 25), (7, 7, 166, 36), (8, 8, ">200", 56)]),
    ),
    "T8": TableSpec(
        "T8", "ex4", "wave-central", None,
        _grid([(5, 5, None, 2), (6, 6, None, 2), (7, 7, None, 2), (8, 8, None, 2)]),
    ),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment; see :func:`run`.

    ``m_plus_1`` is the number of spatial intervals per direction, so each
    block has ``(m_plus_1 - 1)**dim`` unknowns.
    """

    equation: str = "heat"
    scheme: str = "theta"
    theta: float | None = None
    dim: int = 1
    n: int = 16
    m_plus_1: int = 16
    T: float = 1.0
    a: float = 1.0
    initial: str = "zero"
    forcing: str | None = None
    preconditioner: str = "tau"
    solver: str = "minres"
    tol: float = 1e-6
    maxit: int = 500
    mode: str = "solve"
    out: str | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        expected = "wave" if self.scheme.startswith("wave") else "heat"
        if self.equation != expected:
            raise ParameterError(f"scheme {self.scheme!r} belongs to the {expected} equation, not {self.equation!r}")
        if self.scheme == "theta" and (self.theta is None or not 0.0 <= self.theta <= 1.0):
            raise ParameterError("the theta scheme needs --theta in [0, 1]")
        if self.dim not in (1, 2):
            raise ParameterError("dim must be 1 or 2")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.m_plus_1 < 2:
            raise ParameterError("m_plus_1 must be >= 2")
        if not 0.0 < self.tol < 1.0:
            raise ParameterError("tol must lie in (0, 1)")
        if self.maxit < 1:
            raise ParameterError("maxit must be >= 1")
        if self.preconditioner not in PRECONDITIONERS:
            raise ParameterError(f"preconditioner must be one of {PRECONDITIONERS}")
        if self.solver not in SOLVERS:
            raise ParameterError(f"solver must be one of {SOLVERS}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}")
        if self.initial not in INITIAL_CONDITIONS:
            raise ParameterError(f"unknown initial condition {self.initial!r}")
        if self.forcing is not None and self.forcing not in FORCINGS:
            raise ParameterError(f"unknown forcing {self.forcing!r}")
        if self.mode == "spectrum" and self.n * self.m > DENSE_GUARD:
            raise ParameterError(f"spectrum mode needs n*m <= {DENSE_GUARD}, got {self.n * self.m}")

    @property
    def m1(self):
        return self.m_plus_1 - 1

    @property
    def m(self):
        return self.m1**self.dim

    @property
    def dof(self):
        return self.n * self.m

    def problem(self):
        return ProblemSpec(
            equation=self.equation,
            scheme=self.scheme,
            n=self.n,
            m1=self.m1,
            dim=self.dim,
            T=self.T,
            a=self.a,
            theta=self.theta,
            initial=self.initial,
            forcing=self.forcing,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass
class RunResult:
    status: int
    row: dict
    solution: np.ndarray | None = None
    spectrum: analysis.SpectrumReport | None = None


def build_problem(config):
    """Return ``(operator, rhs)`` for the unpermuted system ``T u = f``."""
    spec = config.problem()
    spatial = build_spatial(spec)
    stencil = make_stencil(spec)
    op = AllAtOnceOperator(spec.n, spatial, stencil)
    return op, build_rhs(spec, spatial, stencil)


def _build_preconditioner(config, op):
    if config.preconditioner == "tau":
        return build_tau(op.stencil, op.spatial, op.n)
    if config.preconditioner == "circulant":
        return build_circulant(op.stencil, op.spatial, op.n)
    return None


def solve(config, op=None, rhs=None):
    """Solve one configured system.

    Returns ``(x, report)``.  Numerical failures propagate as exceptions.
    """
    if op is None or rhs is None:
        op, rhs = build_problem(config)
    P = _build_preconditioner(config, op)
    if config.solver == "cgne":
        return cgne(op, P, rhs, tol=config.tol, maxit=config.maxit)
    Minv = P.apply_inverse if P is not None else None
    return minres(op.sym_matvec, flip(rhs, op.n), Minv, tol=config.tol, maxit=config.maxit)


def _row(config, iterations, converged, relres, wall):
    return {
        "equation": config.equation,
        "scheme": config.scheme,
        "n": config.n,
        "m_plus_1": config.m_plus_1,
        "dof": config.dof,
        "preconditioner": config.preconditioner,
        "solver": config.solver,
        "iterations": int(iterations),
        "converged": bool(converged),
        "final_true_relres": float(relres),
        "wall_time_seconds": float(wall),
    }


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(path, rows):
    """Append rows to a CSV file, writing the header if the file is new or empty."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        if new:
            writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in CSV_COLUMNS])


def _run_spectrum(config):
    op, _ = build_problem(config)
    P = _build_preconditioner(config, op)
    report = analysis.preconditioned_spectrum(op, P, epsilon=0.5)
    if config.out:
        analysis.write_spectrum(config.out, report.eigenvalues)
    return RunResult(EXIT_OK, {}, spectrum=report)


def run(config, write=True):
    """Run one experiment and (optionally) append its CSV row to ``config.out``.

    A singular preconditioner, a diverging iteration or a solve that stops
    at ``maxit`` is reported as a row with ``converged=false`` and
    ``iterations=maxit`` and status 2.
    """
    if config.mode == "spectrum":
        return _run_spectrum(config)
    op, rhs = build_problem(config)
    start = time.perf_counter()
    try:
        x, report = solve(config, op, rhs)
    except (SingularSymbolError, DivergenceError) as exc:
        log.warning("numerical failure (%s, n=%d, %s): %s", config.scheme, config.n, config.preconditioner, exc)
        bnorm = float(np.linalg.norm(rhs))
        row = _row(config, config.maxit, False, 1.0 if bnorm > 0 else 0.0, time.perf_counter() - start)
        result = RunResult(EXIT_NUMERICAL, row)
    else:
        iters = report.iterations if report.converged else config.maxit
        row = _row(config, iters, report.converged, report.final_true_relres, report.wall_time)
        result = RunResult(EXIT_OK if report.converged else EXIT_NUMERICAL, row, solution=x)
    if write and config.out:
        write_rows(config.out, [result.row])
    return result


def run_suite(table_id, cap=2**20, out=None, preconditioners=("circulant", "tau"), **overrides):
    """Run every row of a table with ``dof <= cap`` for each preconditioner.

    Returns a list of ``(ReferenceRow, RunResult)`` pairs in table order; rows are
    appended to ``out`` as they finish.  Errors in one row do not stop the suite.
    """
    if table_id not in TABLES:
        raise ParameterError(f"unknown table {table_id!r}; choose from {sorted(TABLES)}")
    table = TABLES[table_id]
    results = []
    for expected in table.rows:
        for pc in preconditioners:
            config = table.config(expected, pc, **overrides)
            if config.dof > cap:
                continue
            try:
                res = run(config, write=False)
            except AllAtOnceError as exc:
                log.error("row %s/%s failed: %s", expected, pc, exc)
                res = RunResult(EXIT_NUMERICAL, _row(config, config.maxit, False, math.nan, 0.0))
            if out:
                write_rows(out, [res.row])
            results.append((expected, res))
    return results

