"""Power-graded temporal meshes ``t_n = T (n/N)**gamma``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class GradedMesh:
    final_time: float
    steps: int
    gamma: float
    nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def T(self) -> float:
        return self.final_time

    @property
    def N(self) -> int:
        return self.steps

    @property
    def tau(self) -> np.ndarray:
        """Step sizes, ``tau[n-1] = t_n - t_{n-1}`` for n = 1..N."""
        return np.diff(self.nodes)

    def step_size(self, n: int) -> float:
        return float(self.nodes[n] - self.nodes[n - 1])

    def __len__(self) -> int:
        return self.steps + 1


def build_graded_mesh(T: float, N: int, gamma: float) -> GradedMesh:
    """Nodes are evaluated index by index (not by summing steps) so that t_N == T exactly."""
    if not T > 0:
        raise InvalidParameterError(f"final time must be positive, got {T}")
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"number of steps must be a positive integer, got {N}")
    if not gamma >= 1:
        raise InvalidParameterError(f"grading exponent must be >= 1, got {gamma}")
    N = int(N)
    T = float(T)
    gamma = float(gamma)
    nodes = T * (np.arange(N + 1) / N) ** gamma
    nodes[0] = 0.0
    nodes[-1] = T
    nodes.setflags(write=False)
    return GradedMesh(T, N, gamma, nodes)


def refine_temporal(mesh: GradedMesh) -> GradedMesh:
    return build_graded_mesh(mesh.final_time, 2 * mesh.steps, mesh.gamma)
