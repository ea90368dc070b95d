"""Nonuniform L1 discretisation of the Caputo derivative.

Weights follow the convention ``a[j] = a^(n)_j`` with ``j = n - k``, i.e.
``a[0]`` multiplies the newest increment ``U^n - U^{n-1}`` and ``a[n-1]``
the oldest one ``U^1 - U^0``.  The complementary kernels use the same
offset convention, ``P[j] = P^(n)_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError, ShapeMismatchError, StepIndexError
from .temporal_mesh import GradedMesh


def check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not 0.0 < sigma < 1.0:
        raise InvalidParameterError(f"fractional order must lie in (0, 1), got {sigma}")
    return sigma


def rim_kernel(theta, t):
    """Riemann-Liouville kernel ``t**(theta-1) / Gamma(theta)``; vectorised over ``t``."""
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("rim_kernel requires t > 0")
    out = t ** (theta - 1.0) / math.gamma(theta)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class L1Weights:
    step_index: int
    a: np.ndarray

    def __len__(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class ComplementaryKernels:
    step_index: int
    P: np.ndarray


def _check_step(mesh: GradedMesh, n: int) -> int:
    if int(n) != n or not 1 <= n <= mesh.steps:
        raise StepIndexError(f"step index {n} outside [1, {mesh.steps}]")
    return int(n)


def power_difference(x, d, p: float):
    """``x**p - (x - d)**p`` for 0 < d <= x, free of cancellation when d << x."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(d, dtype=float) / x
    with np.errstate(divide="ignore"):
        return -(x**p) * np.expm1(p * np.log1p(-r))


def _weights_from_nodes(nodes: np.ndarray, n: int, sigma: float, gamma2: float) -> np.ndarray:
    t = nodes[: n + 1]
    tau = np.diff(t)  # tau_k for k = 1..n
    x = t[n] - t[:n]  # t_n - t_{k-1}
    p = 1.0 - sigma
    a_by_k = power_difference(x, tau, p) / (gamma2 * tau)
    a_by_k[-1] = tau[-1] ** (-sigma) / gamma2
    return a_by_k[::-1].copy()


def l1_weights(mesh: GradedMesh, sigma: float, n: int) -> L1Weights:
    """Weights ``a^(n)_j``, j = 0..n-1, of the L1 formula at step ``n``."""
    sigma = check_sigma(sigma)
    n = _check_step(mesh, n)
    a = _weights_from_nodes(mesh.nodes, n, sigma, math.gamma(2.0 - sigma))
    return L1Weights(n, a)


def l1_weight_table(mesh: GradedMesh, sigma: float) -> np.ndarray:
    """Lower-triangular table ``A[n-1, k-1] = a^(n)_{n-k}`` for 1 <= k <= n <= N."""
    sigma = check_sigma(sigma)
    N = mesh.steps
    g2 = math.gamma(2.0 - sigma)
    A = np.zeros((N, N))
    for n in range(1, N + 1):
        A[n - 1, :n] = _weights_from_nodes(mesh.nodes, n, sigma, g2)[::-1]
    return A


def history_coefficients(a: np.ndarray) -> np.ndarray:
    """Coefficients ``c_k`` with ``sum_k a_{n-k} (v^k - v^{k-1}) = a_0 v^n - sum_{k<n} c_k v^k``.

    ``c_0 = a_{n-1}`` and ``c_k = a_{n-k-1} - a_{n-k}`` for 1 <= k <= n-1.
    """
    return np.diff(a[::-1], prepend=0.0)


def apply_l1(mesh: GradedMesh, sigma: float, history) -> np.ndarray | float:
    """Discrete Caputo derivative at ``t_n`` of a history ``v^0..v^n`` (leading axis is time)."""
    v = np.asarray(history, dtype=float)
    if v.ndim == 0 or v.shape[0] < 2:
        raise ShapeMismatchError("history needs at least two time levels v^0, v^1")
    n = v.shape[0] - 1
    if n > mesh.steps:
        raise ShapeMismatchError(f"history has {n + 1} levels but the mesh only {mesh.steps + 1}")
    a = l1_weights(mesh, sigma, n).a
    increments = np.diff(v, axis=0)  # increments[k-1] = v^k - v^{k-1}
    out = np.tensordot(a[::-1], increments, axes=(0, 0))
    return float(out) if out.ndim == 0 else out


def complementary_kernel_table(mesh: GradedMesh, sigma: float) -> np.ndarray:
    """All complementary kernels at once: ``Ptab[n-1, k-1] = P^(n)_{n-k}``.

    Runs the backward recursion over ``k`` simultaneously for every final index ``n``.
    """
    A = l1_weight_table(mesh, sigma)
    N = mesh.steps
    diag = np.diag(A).copy()
    # D[j-1, k-1] = a^(j)_{j-k-1} - a^(j)_{j-k} for j >= k+1
    D = np.zeros_like(A)
    D[:, :-1] = A[:, 1:] - A[:, :-1]
    D = np.tril(D, -1)
    Ptab = np.zeros((N, N))
    for k in range(N, 0, -1):
        col = Ptab[:, k:] @ D[k:, k - 1] if k < N else np.zeros(N)
        col = col / diag[k - 1]
        col[k - 1] = 1.0 / diag[k - 1]
        col[: k - 1] = 0.0
        Ptab[:, k - 1] = col
    return Ptab


def complementary_kernels(mesh: GradedMesh, sigma: float, n: int) -> ComplementaryKernels:
    """Complementary kernels ``P^(n)_j`` for j = 0..n-1 by the backward recursion in ``k``."""
    sigma = check_sigma(sigma)
    n = _check_step(mesh, n)
    g2 = math.gamma(2.0 - sigma)
    rows = [_weights_from_nodes(mesh.nodes, j, sigma, g2) for j in range(1, n + 1)]
    P = np.zeros(n)
    P[0] = 1.0 / rows[n - 1][0]
    for k in range(n - 1, 0, -1):
        s = 0.0
        for j in range(k + 1, n + 1):
            aj = rows[j - 1]
            s += (aj[j - k - 1] - aj[j - k]) * P[n - j]
        P[n - k] = s / rows[k - 1][0]
    return ComplementaryKernels(n, P)
