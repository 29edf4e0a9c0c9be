"""Bounded search space"""
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

Vector3 = Tuple[float, float, float]


class Environment(BaseModel):
    """Axis-aligned box; a degenerate third axis makes it a 2D arena"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    lower: Vector3
    upper: Vector3

    @model_validator(mode='after')
    def check_bounds(self):
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise ValueError("environment bounds must be finite")
        if not np.all(lo[:2] < hi[:2]):
            raise ValueError(f"lower {self.lower} must be below upper {self.upper} on x and y")
        if lo[2] > hi[2]:
            raise ValueError(f"lower z {lo[2]} above upper z {hi[2]}")
        return self

    @property
    def dimensionality(self) -> int:
        return 2 if self.lower[2] == self.upper[2] else 3

    @property
    def active_axes(self) -> np.ndarray:
        """Boolean mask of the non-degenerate axes"""
        return np.array([True, True, self.dimensionality == 3])

    @property
    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    @property
    def upper_array(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    @property
    def center(self) -> np.ndarray:
        return (self.lower_array + self.upper_array) / 2.0

    @property
    def size(self) -> np.ndarray:
        return self.upper_array - self.lower_array

    def contains(self, p, tol: float = 0.0) -> bool:
        """Closed-bounds membership on the active axes"""
        p = np.asarray(p, dtype=float)
        axes = self.active_axes
        inside = (p >= self.lower_array - tol) & (p <= self.upper_array + tol)
        return bool(np.all(inside[axes]))

    def clamp(self, points: np.ndarray) -> np.ndarray:
        """Project points into the box"""
        return np.clip(points, self.lower_array, self.upper_array)


def contains(env: Environment, p) -> bool:
    return env.contains(p)
