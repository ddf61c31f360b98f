"""Command-line runner for single experiments and table suites.

Settings are layered, later layers winning: built-in defaults, an
``--example`` preset, a ``--config`` file of ``key=value`` lines, then
explicit flags.  Exit codes: 0 success, 1 usage error, 2 numerical failure
(singular preconditioner, divergence or no convergence within ``maxit``).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .errors import AllAtOnceError, ParameterError
from .experiments import (
    CSV_COLUMNS,
    EXAMPLES,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    MODES,
    PRECONDITIONERS,
    SOLVERS,
    TABLES,
    ExperimentConfig,
    format_value,
    run,
    run_suite,
)
from .discretize import FORCINGS, INITIAL_CONDITIONS, SCHEMES

__all__ = ["main", "build_parser", "read_config_file", "resolve_config"]

log = logging.getLogger(__name__)

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
# config-file keys that are not ExperimentConfig fields
_FILE_ONLY = {"example"}
_CASTS = {
    "theta": float,
    "dim": int,
    "n": int,
    "m_plus_1": int,
    "T": float,
    "a": float,
    "tol": float,
    "maxit": int,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="allatonce", description="Preconditioned all-at-once solves of heat and wave equations.")
    S = argparse.SUPPRESS
    p.add_argument("--example", choices=sorted(EXAMPLES), default=S, help="problem data preset")
    p.add_argument("--equation", choices=("heat", "wave"), default=S)
    p.add_argument("--scheme", choices=SCHEMES, default=S)
    p.add_argument("--theta", type=float, default=S)
    p.add_argument("--dim", type=int, choices=(1, 2), default=S)
    p.add_argument("--n", type=int, default=S, help="number of time steps")
    p.add_argument("--m-plus-1", dest="m_plus_1", type=int, default=S, help="spatial intervals per direction")
    p.add_argument("--T", type=float, default=S, help="final time (default 1)")
    p.add_argument("--a", type=float, default=S, help="diffusion coefficient / wave speed squared")
    p.add_argument("--initial", choices=sorted(INITIAL_CONDITIONS), default=S)
    p.add_argument("--forcing", choices=sorted(FORCINGS), default=S)
    p.add_argument("--precond", dest="preconditioner", choices=PRECONDITIONERS, default=S)
    p.add_argument("--solver", choices=SOLVERS, default=S)
    p.add_argument("--tol", type=float, default=S)
    p.add_argument("--maxit", type=int, default=S)
    p.add_argument("--mode", choices=MODES, default=S)
    p.add_argument("--out", default=S, help="CSV file (solve) or eigenvalue dump (spectrum)")
    p.add_argument("--config", default=None, help="file of key=value lines")
    p.add_argument("--suite", choices=sorted(TABLES), default=None, help="run a whole table")
    p.add_argument("--cap", type=int, default=2**20, help="largest DoF in suite mode")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def read_config_file(path):
    """Parse ``key=value`` lines; ``#`` starts a comment and dashes equal underscores."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "precond":
            key = "preconditioner"
        if key not in _FIELDS and key not in _FILE_ONLY:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _cast(key, value):
    if value is None or not isinstance(value, str):
        return value
    if value.lower() in ("", "none") and key in ("theta", "forcing", "out"):
        return None
    cast = _CASTS.get(key)
    if cast is None:
        return value
    try:
        return cast(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def resolve_config(args):
    """Merge defaults, example preset, config file and flags into an :class:`ExperimentConfig`."""
    flags = {k: v for k, v in vars(args).items() if k in _FIELDS or k in _FILE_ONLY}
    file_values = read_config_file(args.config) if args.config else {}
    example = flags.get("example", file_values.get("example"))
    merged = {}
    if example is not None:
        if example not in EXAMPLES:
            raise UsageError(f"unknown example {example!r}")
        merged.update(EXAMPLES[example])
    merged.update({k: _cast(k, v) for k, v in file_values.items() if k in _FIELDS})
    merged.update({k: v for k, v in flags.items() if k in _FIELDS})
    if "equation" not in merged and "scheme" in merged:
        merged["equation"] = "wave" if merged["scheme"].startswith("wave") else "heat"
    try:
        return ExperimentConfig(**merged)
    except (ParameterError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _print_row(row):
    print(",".join(format_value(row[c]) for c in CSV_COLUMNS))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        if args.suite:
            overrides = {}
            for key in ("tol", "maxit", "T", "solver"):
                if hasattr(args, key):
                    overrides[key] = getattr(args, key)
            try:
                results = run_suite(args.suite, cap=args.cap, out=getattr(args, "out", None), **overrides)
            except (ParameterError, TypeError) as exc:
                raise UsageError(str(exc)) from exc
            print(",".join(CSV_COLUMNS))
            for _, res in results:
                _print_row(res.row)
            return EXIT_OK if all(r.status == EXIT_OK for _, r in results) else EXIT_NUMERICAL
        config = resolve_config(args)
    except UsageError as exc:
        print(f"allatonce: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        result = run(config)
    except AllAtOnceError as exc:
        print(f"allatonce: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if config.mode == "spectrum":
        rep = result.spectrum
        print(
            f"eigenvalues={rep.eigenvalues.size} min={rep.eigenvalues[0]:.6g} max={rep.eigenvalues[-1]:.6g} "
            f"outliers(eps={rep.epsilon:g})={rep.outliers} near_zero={rep.near_zero}"
        )
    else:
        print(",".join(CSV_COLUMNS))
        _print_row(result.row)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
