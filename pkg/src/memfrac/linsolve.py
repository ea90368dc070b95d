"""Solvers for the SPD per-step systems ``(a0 * mass + stiffness) x = rhs``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError, SolverError


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    residual: float
    method: str


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Thomas algorithm. ``lower``/``upper`` hold the n-1 sub/super-diagonal entries.

    ``rhs`` may carry extra trailing columns.
    """
    d = np.asarray(diag, dtype=float)
    lo = np.asarray(lower, dtype=float)
    up = np.asarray(upper, dtype=float)
    b = np.asarray(rhs, dtype=float)
    n = d.shape[0]
    if lo.shape != (n - 1,) or up.shape != (n - 1,) or b.shape[0] != n:
        raise ShapeMismatchError("inconsistent tridiagonal system dimensions")
    cp = np.empty(max(n - 1, 0))
    dp = np.empty_like(b)
    pivot = d[0]
    if pivot == 0:
        raise SolverError("zero pivot at row 0")
    if n > 1:
        cp[0] = up[0] / pivot
    dp[0] = b[0] / pivot
    for i in range(1, n):
        pivot = d[i] - lo[i - 1] * cp[i - 1]
        if pivot == 0 or not np.isfinite(pivot):
            raise SolverError(f"singular pivot at row {i}")
        if i < n - 1:
            cp[i] = up[i] / pivot
        dp[i] = (b[i] - lo[i - 1] * dp[i - 1]) / pivot
    x = np.empty_like(dp)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


class CompositeOperator:
    """Matrix-free ``a0 * mass + stiffness``."""

    def __init__(self, a0: float, mass, stiffness):
        self.a0 = float(a0)
        self.mass = mass
        self.stiffness = stiffness
        self.shape = mass.shape

    def __matmul__(self, v):
        return self.a0 * (self.mass @ v) + self.stiffness @ v

    def diagonal(self) -> np.ndarray:
        return self.a0 * self.mass.diagonal() + self.stiffness.diagonal()


def solve_cg(A, rhs, tol: float = 1e-12, max_iter: int | None = None, x0=None, jacobi: bool = False):
    """Conjugate gradients on an SPD operator supporting ``A @ v``.

    Stops once ``||rhs - A x|| <= tol * ||rhs||`` (recomputed residual).
    Returns ``(x, SolveReport)``; raises :class:`SolverError` carrying the report otherwise.
    """
    b = np.asarray(rhs, dtype=float)
    n = b.shape[0]
    if A.shape != (n, n):
        raise ShapeMismatchError(f"operator shape {A.shape} does not match rhs length {n}")
    if max_iter is None:
        max_iter = 10 * n
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, "conjugate-gradient")
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x if x0 is not None else b.copy()
    inv_diag = 1.0 / A.diagonal() if jacobi else None
    z = r * inv_diag if jacobi else r
    p = z.copy()
    rz = float(r @ z)
    it = 0
    rel = np.linalg.norm(r) / bnorm
    while it < max_iter:
        if rel <= tol:
            # guard against drift of the recursive residual
            rel = np.linalg.norm(b - A @ x) / bnorm
            if rel <= tol:
                return x, SolveReport(it, float(rel), "conjugate-gradient")
            r = b - A @ x
            z = r * inv_diag if jacobi else r
            p = z.copy()
            rz = float(r @ z)
        Ap = A @ p
        alpha = rz / float(p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = r * inv_diag if jacobi else r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
        rel = np.linalg.norm(r) / bnorm
    rel = np.linalg.norm(b - A @ x) / bnorm
    report = SolveReport(it, float(rel), "conjugate-gradient")
    if rel <= tol:
        return x, report
    raise SolverError(f"CG did not reach relative residual {tol:g} in {max_iter} iterations", report)
