"""Memory kernels ``K(t)`` with ``|K(t)| <= kappa * t**(-beta)`` and their interval weights."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidParameterError, QuadratureError, StepIndexError
from .l1 import power_difference
from .temporal_mesh import GradedMesh

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_GL_NODES_FINE, _GL_WEIGHTS_FINE = np.polynomial.legendre.leggauss(40)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"singularity exponent must lie in (0, 1), got {beta}")
    return beta


class MemoryKernel:
    """Base class. Subclasses provide ``__call__``, ``kappa`` and ``beta``."""

    beta: float
    kappa: float
    closed_form = False

    def __call__(self, t):
        raise NotImplementedError

    def interval_integral(self, a: float, b: float) -> float:
        return integrate_singular(self, a, b, self.beta)

    def check_bound(self, T: float, samples: int = 100, rtol: float = 1e-12) -> bool:
        """Spot-check ``|K(t)| <= kappa t^-beta`` on log-spaced points of (0, T]."""
        t = np.logspace(math.log10(T) - 8.0, math.log10(T), samples)
        vals = np.abs(np.asarray([self(s) for s in t], dtype=float))
        return bool(np.all(vals <= self.kappa * t ** (-self.beta) * (1.0 + rtol)))


@dataclass(frozen=True)
class SignedPowerLaw(MemoryKernel):
    """``K(t) = c * t**(-beta)``; ``c`` may be negative (non-positive memory) or zero."""

    coefficient: float
    beta: float
    closed_form = True

    def __post_init__(self):
        _check_beta(self.beta)

    @property
    def kappa(self) -> float:
        return abs(self.coefficient)

    def __call__(self, t):
        return self.coefficient * np.asarray(t, dtype=float) ** (-self.beta)

    def interval_integral(self, a: float, b: float) -> float:
        p = 1.0 - self.beta
        return self.coefficient * float(power_difference(b, b - a, p)) / p


@dataclass(frozen=True)
class TemperedPowerLaw(MemoryKernel):
    """``K(t) = c * exp(-lam t) * t**(-beta)``."""

    coefficient: float
    beta: float
    tempering: float = 1.0

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.tempering >= 0:
            raise InvalidParameterError(f"tempering must be nonnegative, got {self.tempering}")

    @property
    def kappa(self) -> float:
        return abs(self.coefficient)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.coefficient * np.exp(-self.tempering * t) * t ** (-self.beta)


@dataclass(frozen=True)
class CustomSingular(MemoryKernel):
    """User kernel; ``kappa`` and ``beta`` form a declared bound that is only spot-checked."""

    evaluator: Callable[[float], float] = field(compare=False)
    kappa: float
    beta: float

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.kappa > 0:
            raise InvalidParameterError(f"kappa must be positive, got {self.kappa}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return float(self.evaluator(float(t)))
        return np.array([self.evaluator(float(s)) for s in t.ravel()]).reshape(t.shape)


def _gauss(f, lo: float, hi: float, nodes, weights) -> float:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(weights, f(mid + half * nodes)))


def integrate_singular(
    kernel: Callable, a: float, b: float, beta: float, rtol: float = 1e-12, max_depth: int = 30
) -> float:
    """Integrate ``kernel`` over [a, b] with the substitution ``s = u**(1/(1-beta))``.

    The map turns ``s**(-beta) ds`` into ``du / (1 - beta)``, so kernels behaving like
    ``s**(-beta)`` near zero become smooth in ``u``.  Panels are bisected until 20- and
    40-point Gauss-Legendre agree.
    """
    if not 0 <= a <= b:
        raise DomainError(f"invalid interval [{a}, {b}]")
    if a == b:
        return 0.0
    p = 1.0 - beta
    inv = 1.0 / p

    def g(u):
        s = u**inv
        return np.asarray(kernel(s), dtype=float) * s**beta / p

    lo, hi = a**p, b**p
    total = 0.0
    scale = None
    stack = [(lo, hi, 0)]
    while stack:
        u0, u1, depth = stack.pop()
        coarse = _gauss(g, u0, u1, _GL_NODES, _GL_WEIGHTS)
        fine = _gauss(g, u0, u1, _GL_NODES_FINE, _GL_WEIGHTS_FINE)
        if scale is None:
            scale = abs(fine)
        tol = rtol * max(scale, abs(fine), 1e-300) * (u1 - u0) / (hi - lo)
        if abs(fine - coarse) <= max(tol, 1e-300) or abs(fine - coarse) <= 4e-16 * abs(fine):
            total += fine
            continue
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive quadrature did not converge on [{a}, {b}] (panel [{u0}, {u1}])"
            )
        um = 0.5 * (u0 + u1)
        stack.append((um, u1, depth + 1))
        stack.append((u0, um, depth + 1))
    return total


def mu_beta(mesh: GradedMesh, beta: float, j: int) -> float:
    """``integral of s**(-beta)`` over [t_{j-1}, t_j]."""
    beta = _check_beta(beta)
    if int(j) != j or not 1 <= j <= mesh.steps:
        raise StepIndexError(f"interval index {j} outside [1, {mesh.steps}]")
    p = 1.0 - beta
    t = mesh.nodes
    return float(power_difference(t[j], t[j] - t[j - 1], p)) / p


def mu_beta_all(mesh: GradedMesh, beta: float) -> np.ndarray:
    beta = _check_beta(beta)
    p = 1.0 - beta
    t = mesh.nodes
    return power_difference(t[1:], np.diff(t), p) / p


@dataclass(frozen=True)
class MemoryWeights:
    """``w[j-1] = integral of K over [t_{j-1}, t_j]`` for j = 1..n."""

    w: np.ndarray

    def __len__(self) -> int:
        return len(self.w)


def memory_weights(kernel: MemoryKernel, mesh: GradedMesh, n: int | None = None) -> MemoryWeights:
    if n is None:
        n = mesh.steps
    if int(n) != n or not 1 <= n <= mesh.steps:
        raise StepIndexError(f"step index {n} outside [1, {mesh.steps}]")
    t = mesh.nodes
    if kernel.closed_form:
        w = np.array([kernel.interval_integral(t[j - 1], t[j]) for j in range(1, n + 1)])
    else:
        w = np.array([integrate_singular(kernel, t[j - 1], t[j], kernel.beta) for j in range(1, n + 1)])
    return MemoryWeights(w)
