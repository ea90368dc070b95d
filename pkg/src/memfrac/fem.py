"""P1 finite elements on uniform 1D intervals and 2D boxes, homogeneous Dirichlet data.

Interior unknowns are numbered lexicographically with x fastest:
``idx = (j - 1) * (M - 1) + (i - 1)`` for grid node ``(x_i, y_j)``.
The 2D triangulation splits every cell along its SW-NE diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidParameterError, ShapeMismatchError


@dataclass(frozen=True)
class SpatialMesh:
    dim: int
    M: int
    length_x: float
    length_y: float = 1.0

    @property
    def hx(self) -> float:
        return self.length_x / self.M

    @property
    def hy(self) -> float:
        return self.length_y / self.M

    @property
    def h(self) -> float:
        return self.hx

    @property
    def cell_measure(self) -> float:
        """Weight of the discrete L2 norm: ``h`` in 1D, ``hx*hy`` in 2D."""
        return self.hx if self.dim == 1 else self.hx * self.hy

    @property
    def n_interior(self) -> int:
        return (self.M - 1) ** self.dim

    @property
    def n_nodes(self) -> int:
        return (self.M + 1) ** self.dim

    def interior_coordinates(self) -> tuple[np.ndarray, ...]:
        x = np.arange(1, self.M) * self.hx
        if self.dim == 1:
            return (x,)
        y = np.arange(1, self.M) * self.hy
        X, Y = np.meshgrid(x, y)  # rows are y, x runs fastest
        return X.ravel(), Y.ravel()

    def all_coordinates(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.M + 1) * self.hx
        if self.dim == 1:
            return (x,)
        y = np.arange(self.M + 1) * self.hy
        X, Y = np.meshgrid(x, y)
        return X.ravel(), Y.ravel()

    def interior_index(self) -> np.ndarray:
        """Positions of the interior nodes inside the full node numbering."""
        M = self.M
        if self.dim == 1:
            return np.arange(1, M)
        jj, ii = np.meshgrid(np.arange(1, M), np.arange(1, M), indexing="ij")
        return (jj * (M + 1) + ii).ravel()

    def restrict_from_fine(self, fine_values: np.ndarray) -> np.ndarray:
        """Values of a solution on the 2M-mesh at the interior nodes of this mesh."""
        fine_values = np.asarray(fine_values)
        m = 2 * self.M - 1
        if self.dim == 1:
            if fine_values.shape != (m,):
                raise ShapeMismatchError(f"expected {m} fine values, got {fine_values.shape}")
            return fine_values[1::2]
        if fine_values.shape != (m * m,):
            raise ShapeMismatchError(f"expected {m * m} fine values, got {fine_values.shape}")
        return fine_values.reshape(m, m)[1::2, 1::2].ravel()


@dataclass(frozen=True)
class FemOperators:
    mesh: SpatialMesh
    mass: sp.csr_matrix = field(repr=False)
    stiffness: sp.csr_matrix = field(repr=False)
    # interior rows, all-node columns; maps nodal values of f to the load vector
    load: sp.csr_matrix = field(repr=False)

    @property
    def size(self) -> int:
        return self.mass.shape[0]

    def mass_bands(self) -> tuple[np.ndarray, np.ndarray]:
        """(diagonal, off-diagonal) of the 1D tridiagonal mass matrix."""
        return self.mass.diagonal(), self.mass.diagonal(1)

    def stiffness_bands(self) -> tuple[np.ndarray, np.ndarray]:
        return self.stiffness.diagonal(), self.stiffness.diagonal(1)


def _check_M(M) -> int:
    if int(M) != M or M < 2:
        raise InvalidParameterError(f"number of subdivisions must be an integer >= 2, got {M}")
    return int(M)


def _check_length(L, name="length") -> float:
    if not L > 0:
        raise InvalidParameterError(f"{name} must be positive, got {L}")
    return float(L)


def assemble_1d(M: int, L: float = 1.0) -> FemOperators:
    M = _check_M(M)
    L = _check_length(L)
    mesh = SpatialMesh(1, M, L)
    h = mesh.h
    n = M - 1
    ones = np.ones(n)
    mass = sp.diags([ones[1:] * h / 6, ones * 2 * h / 3, ones[1:] * h / 6], [-1, 0, 1], format="csr")
    stiff = sp.diags([-ones[1:] / h, ones * 2 / h, -ones[1:] / h], [-1, 0, 1], format="csr")
    load = sp.diags(
        [np.full(n, h / 6), np.full(n, 2 * h / 3), np.full(n, h / 6)], [0, 1, 2], shape=(n, M + 1), format="csr"
    )
    return FemOperators(mesh, mass, stiff, load)


def _triangles(M: int) -> np.ndarray:
    """Vertex triples (full node numbering), counter-clockwise, two per cell."""
    i, j = np.meshgrid(np.arange(M), np.arange(M), indexing="xy")
    i = i.ravel()
    j = j.ravel()
    sw = j * (M + 1) + i
    se = sw + 1
    nw = sw + (M + 1)
    ne = nw + 1
    lower = np.stack([sw, se, ne], axis=1)
    upper = np.stack([sw, ne, nw], axis=1)
    return np.concatenate([lower, upper])


def _local_matrices(xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P1 element stiffness and mass for triangles ``xy`` of shape (ntri, 3, 2)."""
    x = xy[..., 0]
    y = xy[..., 1]
    # gradient coefficients of barycentric coordinates
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    K = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4 * area)[:, None, None]
    ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    Mloc = area[:, None, None] * ref
    return K, Mloc


def assemble_2d(M: int, length_x: float = 1.0, length_y: float = 1.0) -> FemOperators:
    M = _check_M(M)
    Lx = _check_length(length_x, "length_x")
    Ly = _check_length(length_y, "length_y")
    mesh = SpatialMesh(2, M, Lx, Ly)
    X, Y = mesh.all_coordinates()
    tri = _triangles(M)
    xy = np.stack([X[tri], Y[tri]], axis=-1)
    Kloc, Mloc = _local_matrices(xy)
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    nn = mesh.n_nodes
    K = sp.coo_matrix((Kloc.ravel(), (rows, cols)), shape=(nn, nn)).tocsr()
    Mm = sp.coo_matrix((Mloc.ravel(), (rows, cols)), shape=(nn, nn)).tocsr()
    inner = mesh.interior_index()
    stiff = K[inner][:, inner].tocsr()
    mass = Mm[inner][:, inner].tocsr()
    load = Mm[inner].tocsr()
    for A in (stiff, mass, load):
        A.sum_duplicates()
        A.eliminate_zeros()
    return FemOperators(mesh, mass, stiff, load)


def assemble(dim: int, M: int, length_x: float = 1.0, length_y: float = 1.0) -> FemOperators:
    if dim == 1:
        return assemble_1d(M, length_x)
    if dim == 2:
        return assemble_2d(M, length_x, length_y)
    raise InvalidParameterError(f"dimension must be 1 or 2, got {dim}")


PRESETS = {
    "zero": lambda x, y=None: np.zeros_like(x),
    "one": lambda x, y=None: np.ones_like(x),
    "sin_pi_x": lambda x, y=None: np.sin(np.pi * x),
    "sin_pi_x_sin_pi_y": lambda x, y=None: np.sin(np.pi * x) * (1.0 if y is None else np.sin(np.pi * y)),
}


def _preset(name: str):
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def interpolate(preset: str, mesh: SpatialMesh) -> np.ndarray:
    """Nodal interpolant of a named function at the interior nodes."""
    fn = _preset(preset)
    return np.asarray(fn(*mesh.interior_coordinates()), dtype=float)


def interpolate_all(preset: str, mesh: SpatialMesh) -> np.ndarray:
    """Nodal values on every node, boundary included (used for load vectors)."""
    fn = _preset(preset)
    return np.asarray(fn(*mesh.all_coordinates()), dtype=float)


def b_form_apply(mu1: float, mu2: float, ops: FemOperators, v: np.ndarray) -> np.ndarray:
    """Galerkin action of ``B = mu1*Laplace + mu2*I``: ``mu2 * M v - mu1 * S v``."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != ops.size:
        raise ShapeMismatchError(f"vector of length {v.shape[0]} does not match {ops.size} unknowns")
    out = np.zeros_like(v)
    if mu2:
        out += mu2 * (ops.mass @ v)
    if mu1:
        out -= mu1 * (ops.stiffness @ v)
    return out
