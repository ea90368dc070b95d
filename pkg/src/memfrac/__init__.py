"""Graded-mesh L1 / P1 finite element solver for subdiffusion with a weakly singular memory term."""

from __future__ import annotations

from .errors import (
    ConfigError,
    DomainError,
    InvalidParameterError,
    MemfracError,
    QuadratureError,
    ShapeMismatchError,
    SolverError,
    StepIndexError,
)
from .fem import FemOperators, SpatialMesh, assemble, assemble_1d, assemble_2d, b_form_apply, interpolate
from .kernels import (
    CustomSingular,
    MemoryKernel,
    MemoryWeights,
    SignedPowerLaw,
    TemperedPowerLaw,
    integrate_singular,
    memory_weights,
    mu_beta,
)
from .l1 import (
    ComplementaryKernels,
    L1Weights,
    apply_l1,
    complementary_kernel_table,
    complementary_kernels,
    l1_weight_table,
    l1_weights,
    rim_kernel,
)
from .linsolve import CompositeOperator, SolveReport, solve_cg, solve_tridiagonal
from .mittag_leffler import ml
from .stepper import DiscreteSolution, ProblemSpec, solve, step, step_residuals
from .study import (
    PRESETS,
    ConvergenceTable,
    ExperimentSpec,
    compute_rates,
    get_preset,
    load_config,
    run_study,
    spatial_error,
    temporal_error,
)
from .temporal_mesh import GradedMesh, build_graded_mesh, refine_temporal

__version__ = "0.1.0"
