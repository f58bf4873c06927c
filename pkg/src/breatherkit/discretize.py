"""Finite-difference Neumann Laplacian on the box covered by the site lattice.

The box is the union of the half-open unit cells centered at the integer
sites with coordinates in [-L, L). Each cell carries n grid points per axis
at cell-centered positions, so the mirror (reflecting) Neumann stencil keeps
the constant vector exactly in the kernel, which the ground-state arguments
rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
import scipy.sparse as sp

if TYPE_CHECKING:
    from .potential import PotentialField

# continuum coefficient of the free spectral gap: gap(L) = GAP_COEFF / L^2
GAP_COEFF = math.pi**2 / 4

# smallest admissible box half-length: the half-gap shift is <= 1 only for
# L >= sqrt(GAP_COEFF / 2) ~ 1.1107
L_MIN = math.sqrt(GAP_COEFF / 2)


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered grid over the box of (2L)^d unit cells, n points per unit."""

    d: int
    L: int
    n: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.L < 1:
            raise ValueError(f"box half-length must be >= 1, got {self.L}")
        if self.n < 1:
            raise ValueError(f"points per unit length must be >= 1, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def points_per_axis(self) -> int:
        return 2 * self.L * self.n

    @property
    def size(self) -> int:
        return self.points_per_axis**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.d

    def axis_points(self) -> np.ndarray:
        """Grid point coordinates along one axis (first cell starts at -L-1/2)."""
        i = np.arange(self.points_per_axis)
        return -(self.L + 0.5) + (i + 0.5) * self.h


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Sparse symmetric operator: Neumann Laplacian plus a diagonal term."""

    grid: GridSpec
    lap: sp.csr_matrix
    diag: np.ndarray

    @property
    def size(self) -> int:
        return self.grid.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if v.ndim == 1:
            return self.lap @ v + self.diag * v
        return self.lap @ v + self.diag[:, None] * v

    def to_dense(self) -> np.ndarray:
        dense = self.lap.toarray()
        dense[np.diag_indices_from(dense)] += self.diag
        return dense

    def norm_bound(self) -> float:
        """Upper bound on the spectral radius (Gershgorin)."""
        row_sums = np.abs(self.lap).sum(axis=1)
        return float(np.max(row_sums) + np.max(np.abs(self.diag), initial=0.0))


def _laplacian_1d(m: int, inv_h2: float) -> sp.csr_matrix:
    main = np.full(m, 2.0 * inv_h2)
    main[0] = inv_h2
    main[-1] = inv_h2
    off = np.full(m - 1, -inv_h2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def neumann_laplacian(grid: GridSpec) -> DiscreteOperator:
    """Assemble the reflecting-boundary Laplacian as a kron sum over axes.

    Per axis the stencil is (-1, 2, -1)/h^2 with diagonal 1/h^2 at the two
    boundary points, so row sums vanish exactly and the per-axis eigenvalues
    are (2/h^2)(1 - cos(k pi / M)), k = 0..M-1, M points per axis.
    """
    m = grid.points_per_axis
    inv_h2 = float(grid.n * grid.n)
    one_d = _laplacian_1d(m, inv_h2)
    lap = None
    for k in range(grid.d):
        term = sp.identity(m ** k, format="csr")
        term = sp.kron(term, one_d, format="csr")
        term = sp.kron(term, sp.identity(m ** (grid.d - 1 - k), format="csr"),
                       format="csr")
        lap = term if lap is None else lap + term
    return DiscreteOperator(grid, lap.tocsr(), np.zeros(grid.size))


def add_potential(op: DiscreteOperator, field: "PotentialField",
                  shift: float = 0.0) -> DiscreteOperator:
    """New operator with the field plus a scalar shift added to the diagonal."""
    if field.grid != op.grid:
        raise ValueError(
            f"grid mismatch: operator on {op.grid}, field on {field.grid}"
        )
    return DiscreteOperator(op.grid, op.lap, op.diag + field.flat() + shift)


def free_spectrum_1d(m: int, inv_h2: float) -> np.ndarray:
    k = np.arange(m)
    return 2.0 * inv_h2 * (1.0 - np.cos(k * np.pi / m))


def free_spectrum(grid: GridSpec) -> np.ndarray:
    """All eigenvalues of the free operator: tensor sums of the 1d spectrum."""
    one = free_spectrum_1d(grid.points_per_axis, float(grid.n * grid.n))
    acc = one
    for _ in range(grid.d - 1):
        acc = np.add.outer(acc, one).ravel()
    return np.sort(acc)


class FreeGap(NamedTuple):
    discrete: float
    continuum: float


def free_gap(grid: GridSpec) -> FreeGap:
    """Gap between the two lowest free eigenvalues, discrete and continuum.

    The discrete gap is strictly below the continuum value GAP_COEFF / L^2
    and converges to it as n grows.
    """
    m = grid.points_per_axis
    discrete = 2.0 * grid.n * grid.n * (1.0 - math.cos(math.pi / m))
    return FreeGap(discrete, GAP_COEFF / grid.L**2)


def free_counting(d: int, L: int, energy: float) -> int:
    """Exact count of continuum Neumann eigenvalues of the box at or below energy.

    Counts k in Z_{>=0}^d with pi^2 |k|^2 / (2L)^2 <= energy.
    """
    if energy < 0:
        raise ValueError(f"energy must be >= 0, got {energy}")
    bound = 4.0 * L * L * energy / math.pi**2

    def kmax(r2: float) -> int:
        if r2 < 0:
            return -1
        k = int(math.sqrt(r2))
        while (k + 1) ** 2 <= r2:
            k += 1
        while k > 0 and k**2 > r2:
            k -= 1
        return k

    def count(axes: int, r2: float) -> int:
        if r2 < 0:
            return 0
        if axes == 0:
            return 1
        return sum(count(axes - 1, r2 - k * k) for k in range(kmax(r2) + 1))

    return count(d, bound)
