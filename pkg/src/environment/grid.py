"""Regular scalar grids with multilinear interpolation"""
import math
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from environment.geometry import Environment


class ScalarGrid:
    """Node (i,j,l) sits at origin + (i,j,l) * spacing; axes with one node are inactive"""

    def __init__(self, origin: Sequence[float], spacing: Sequence[float],
                 values: np.ndarray):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = np.asarray(spacing, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 3:
            raise ValueError(f"grid values must be 3-dimensional, got shape {self.values.shape}")
        if np.any(self.spacing <= 0):
            raise ValueError(f"grid spacing must be positive, got {self.spacing}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")
        if np.sum(self.active_axes) < 2 or np.any(self.dims[self.active_axes] < 2):
            raise ValueError(f"grid needs at least 2 nodes per active axis, got {self.dims}")
        self._nodes: Optional[np.ndarray] = None

    @classmethod
    def covering(cls, env: Environment, spacing: float, fill: float = 1.0) -> "ScalarGrid":
        """Smallest grid with node spacing <= spacing spanning env exactly"""
        dims = []
        steps = []
        for axis in range(3):
            extent = env.size[axis]
            if not env.active_axes[axis]:
                dims.append(1)
                steps.append(1.0)
                continue
            n = int(math.ceil(extent / spacing - 1e-9)) + 1
            dims.append(max(n, 2))
            steps.append(extent / (dims[-1] - 1))
        values = np.full(dims, fill, dtype=float)
        return cls(env.lower_array, steps, values)

    @property
    def dims(self) -> np.ndarray:
        return np.asarray(self.values.shape)

    @property
    def active_axes(self) -> np.ndarray:
        return self.dims > 1

    @property
    def upper(self) -> np.ndarray:
        return self.origin + (self.dims - 1) * self.spacing

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.origin[axis] + np.arange(self.dims[axis]) * self.spacing[axis]

    def node_positions(self) -> np.ndarray:
        """All node coordinates, shape (n_nodes, 3), in values.ravel() order"""
        if self._nodes is None:
            axes = [self.axis_coordinates(a) for a in range(3)]
            mesh = np.meshgrid(*axes, indexing='ij')
            self._nodes = np.stack([m.ravel() for m in mesh], axis=1)
        return self._nodes

    def sample(self, points) -> np.ndarray:
        """Multilinear interpolation; points outside the grid are clamped first"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        pts = np.clip(pts, self.origin, self.upper)
        active = self.active_axes
        interpolator = RegularGridInterpolator(
            [self.axis_coordinates(a) for a in range(3) if active[a]],
            self.values.reshape(self.dims[active]),
            method='linear',
            bounds_error=False,
            fill_value=None,
        )
        return interpolator(pts[:, active])

    def copy(self) -> "ScalarGrid":
        return ScalarGrid(self.origin.copy(), self.spacing.copy(), self.values.copy())


def grid_sample(grid: ScalarGrid, p) -> float:
    return float(grid.sample(p)[0])
