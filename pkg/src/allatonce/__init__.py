"""Sine-transform preconditioned MINRES for symmetrized all-at-once systems.

The package assembles the block lower-triangular Toeplitz systems produced
by time-stepping heat and wave equations on uniform Dirichlet grids, flips
them into symmetric form and solves them with MINRES (or CG on the normal
equations) using either a DST-diagonalizable (tau) preconditioner or the
absolute-value block circulant preconditioner.
"""

from .analysis import (
    SpectrumReport,
    SymbolSampler,
    normal_equation_rank_check,
    preconditioned_spectrum,
    rank_bound_lemma_check,
    symbol_distribution_compare,
)
from .discretize import (
    ProblemSpec,
    SpectralSpatialOperator,
    TimeStencil,
    build_laplacian_1d,
    build_laplacian_2d,
    build_rhs,
    build_spatial,
    make_stencil,
)
from .errors import (
    AllAtOnceError,
    DimensionError,
    DivergenceError,
    ParameterError,
    SingularSymbolError,
    SizeGuardError,
    StateError,
)
from .experiments import ExperimentConfig, run, run_suite
from .krylov import SolveReport, cgne, minres
from .precond import SpectralPreconditioner, apply_inverse, build_circulant, build_tau
from .toeplitz_ops import AllAtOnceOperator, flip
from .transforms import TransformPlan, dst1

__version__ = "0.1.0"
