"""Time marching for the fully discrete L1 / P1-Galerkin scheme.

At step ``n`` the unknown nodal vector ``U^n`` solves::

    (a0 M + S) U^n = M [sum_{k<n} c_k U^k] + sum_{j=1}^{n} w_j B U^{n-j} + F^n

where ``c_k`` are the L1 history coefficients, ``w_j`` the memory weights and
``B = mu2 M - mu1 S`` the Galerkin form of ``mu1*Laplace + mu2*I``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameterError, SolverError
from .fem import FemOperators, assemble, interpolate, interpolate_all
from .kernels import MemoryKernel, MemoryWeights, SignedPowerLaw, memory_weights
from .l1 import L1Weights, check_sigma, history_coefficients, l1_weights
from .linsolve import CompositeOperator, SolveReport, solve_cg, solve_tridiagonal
from .temporal_mesh import GradedMesh, build_graded_mesh

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemSpec:
    sigma: float
    kernel: MemoryKernel = field(default_factory=lambda: SignedPowerLaw(0.0, 0.1))
    mu1: float = 1.0
    mu2: float = 1.0
    u0: str = "zero"
    f: str = "zero"
    dim: int = 1
    length_x: float = 1.0
    length_y: float = 1.0
    T: float = 1.0
    # temporal factor g(t) of a separable source f(x) g(t); None means g = 1
    f_time: Callable[[float], float] | None = field(default=None, compare=False)
    # "mass": M @ (interior interpolant of f); "consistent": also couples boundary values of f
    load_rule: str = "mass"

    def validate(self) -> None:
        check_sigma(self.sigma)
        beta = self.kernel.beta
        if not 0.0 < beta < min(1.0, 2.0 * self.sigma):
            raise InvalidParameterError(
                f"kernel exponent beta={beta} must lie in (0, min(1, 2*sigma)) = (0, {min(1.0, 2 * self.sigma)})"
            )
        if self.dim not in (1, 2):
            raise InvalidParameterError(f"dimension must be 1 or 2, got {self.dim}")
        if not self.T > 0:
            raise InvalidParameterError(f"final time must be positive, got {self.T}")
        if not (np.isfinite(self.mu1) and np.isfinite(self.mu2)):
            raise InvalidParameterError("mu1 and mu2 must be finite")
        if self.load_rule not in ("mass", "consistent"):
            raise InvalidParameterError(f"unknown load rule {self.load_rule!r}")

    def default_gamma(self) -> float:
        return 1.0 / self.sigma


@dataclass
class DiscreteSolution:
    problem: ProblemSpec
    mesh: GradedMesh
    ops: FemOperators
    history: np.ndarray
    memory: MemoryWeights
    reports: list[SolveReport] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.history[-1]

    @property
    def spatial_mesh(self):
        return self.ops.mesh


def _load_vector(problem: ProblemSpec, ops: FemOperators) -> np.ndarray:
    if problem.f == "zero":
        return np.zeros(ops.size)
    if problem.load_rule == "consistent":
        return ops.load @ interpolate_all(problem.f, ops.mesh)
    return ops.mass @ interpolate(problem.f, ops.mesh)


def step(
    history: np.ndarray,
    n: int,
    weights: L1Weights,
    memory: MemoryWeights,
    ops: FemOperators,
    mu1: float,
    mu2: float,
    load: np.ndarray,
    *,
    b_history: np.ndarray | None = None,
    cg_tol: float = 1e-12,
    jacobi: bool = False,
) -> tuple[np.ndarray, SolveReport]:
    """Compute ``U^n`` from ``history[0:n]``.

    ``b_history[k]`` may cache ``B U^k``; it is recomputed from ``history`` otherwise.
    """
    a = weights.a
    past = history[:n]
    if b_history is None:
        b_past = mu2 * (ops.mass @ past.T).T - mu1 * (ops.stiffness @ past.T).T
    else:
        b_past = b_history[:n]
    rhs = ops.mass @ (history_coefficients(a) @ past)
    rhs += memory.w[:n][::-1] @ b_past
    rhs += load
    a0 = a[0]
    if ops.mesh.dim == 1:
        md, mo = ops.mass_bands()
        sd, so = ops.stiffness_bands()
        off = a0 * mo + so
        x = solve_tridiagonal(off, a0 * md + sd, off, rhs)
        return x, SolveReport(0, 0.0, "tridiagonal-direct")
    A = CompositeOperator(a0, ops.mass, ops.stiffness)
    return solve_cg(A, rhs, tol=cg_tol, x0=history[n - 1], jacobi=jacobi)


def solve(
    problem: ProblemSpec,
    N: int,
    M: int,
    gamma: float | None = None,
    *,
    initial: np.ndarray | None = None,
    cg_tol: float = 1e-12,
    jacobi: bool = False,
) -> DiscreteSolution:
    """March the scheme over n = 1..N on the graded mesh (``gamma`` defaults to 1/sigma).

    ``initial`` overrides the ``u0`` preset with an explicit interior nodal vector.
    """
    problem.validate()
    if gamma is None:
        gamma = problem.default_gamma()
    mesh = build_graded_mesh(problem.T, N, gamma)
    ops = assemble(problem.dim, M, problem.length_x, problem.length_y)
    memory = memory_weights(problem.kernel, mesh)
    load = _load_vector(problem, ops)

    U = np.zeros((mesh.steps + 1, ops.size))
    U[0] = interpolate(problem.u0, ops.mesh) if initial is None else np.asarray(initial, dtype=float)
    BU = np.zeros_like(U)
    BU[0] = problem.mu2 * (ops.mass @ U[0]) - problem.mu1 * (ops.stiffness @ U[0])
    reports = []
    g = problem.f_time
    for n in range(1, mesh.steps + 1):
        weights = l1_weights(mesh, problem.sigma, n)
        load_n = load if g is None else g(mesh.nodes[n]) * load
        try:
            U[n], report = step(
                U, n, weights, memory, ops, problem.mu1, problem.mu2, load_n,
                b_history=BU, cg_tol=cg_tol, jacobi=jacobi,
            )
        except SolverError as exc:
            raise SolverError(f"step {n}: {exc}", exc.report, step=n) from exc
        BU[n] = problem.mu2 * (ops.mass @ U[n]) - problem.mu1 * (ops.stiffness @ U[n])
        reports.append(report)
    log.debug("solved N=%d M=%d dim=%d", N, M, problem.dim)
    return DiscreteSolution(problem, mesh, ops, U, memory, reports)


def step_residuals(solution: DiscreteSolution) -> np.ndarray:
    """Relative residual of every step's linear system, re-assembled from the stored history."""
    p = solution.problem
    ops = solution.ops
    mesh = solution.mesh
    U = solution.history
    load = _load_vector(p, ops)
    out = np.zeros(mesh.steps)
    for n in range(1, mesh.steps + 1):
        a = l1_weights(mesh, p.sigma, n).a
        past = U[:n]
        b_past = p.mu2 * (ops.mass @ past.T).T - p.mu1 * (ops.stiffness @ past.T).T
        load_n = load if p.f_time is None else p.f_time(mesh.nodes[n]) * load
        rhs = ops.mass @ (history_coefficients(a) @ past) + solution.memory.w[:n][::-1] @ b_past + load_n
        lhs = a[0] * (ops.mass @ U[n]) + ops.stiffness @ U[n]
        scale = np.linalg.norm(rhs)
        out[n - 1] = np.linalg.norm(lhs - rhs) / scale if scale > 0 else np.linalg.norm(lhs)
    return out
