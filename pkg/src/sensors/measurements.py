"""Measurement containers and the range/bearing/elevation geometry"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from errors import DegenerateMeasurementError


@dataclass(frozen=True)
class Measurement:
    """Range (m), bearing (rad) and elevation (rad; None in 2D mode)"""
    d: float
    theta: float
    varpi: Optional[float] = None

    def as_array(self) -> np.ndarray:
        if self.varpi is None:
            return np.array([self.d, self.theta])
        return np.array([self.d, self.theta, self.varpi])


class MeasurementSet:
    """Rows of [d, theta(, varpi)] received at one step"""

    def __init__(self, values: np.ndarray, dim: int = 3):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            values = np.empty((0, dim))
        self.values = values.reshape(-1, dim)
        self.dim = dim

    @classmethod
    def empty(cls, dim: int = 3) -> "MeasurementSet":
        return cls(np.empty((0, dim)), dim)

    @classmethod
    def from_measurements(cls, items: Sequence[Measurement]) -> "MeasurementSet":
        if not items:
            return cls.empty()
        rows = [m.as_array() for m in items]
        return cls(np.vstack(rows), len(rows[0]))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __iter__(self):
        for row in self.values:
            yield Measurement(*row) if self.dim == 3 else Measurement(row[0], row[1])

    def subset(self, keep: np.ndarray) -> "MeasurementSet":
        return MeasurementSet(self.values[keep], self.dim)

    def to_list(self) -> List[Measurement]:
        return list(self)


@dataclass
class TargetSet:
    """Ground-truth static targets"""
    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)

    @property
    def count(self) -> int:
        return self.positions.shape[0]

    def __len__(self) -> int:
        return self.count


def wrap_angle(theta):
    """Map angles into (-pi, pi]"""
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2 * np.pi)


def range_bearing_elevation(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorised h(x) for points x of shape (n, 3); theta = 0 straight above/below"""
    delta = np.atleast_2d(x) - np.asarray(q, dtype=float)
    d = np.linalg.norm(delta, axis=1)
    theta = np.arctan2(delta[:, 1], delta[:, 0])
    safe_d = np.where(d > 0, d, 1.0)
    varpi = np.arcsin(np.clip(delta[:, 2] / safe_d, -1.0, 1.0))
    return np.column_stack([d, theta, varpi])


def cartesian_from_rbe(z: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Inverse of range_bearing_elevation for rows [d, theta, varpi]"""
    z = np.atleast_2d(z)
    d, theta, varpi = z[:, 0], z[:, 1], z[:, 2]
    offset = np.column_stack([
        d * np.cos(varpi) * np.cos(theta),
        d * np.cos(varpi) * np.sin(theta),
        d * np.sin(varpi),
    ])
    return offset + np.asarray(q, dtype=float)


def measure_one(x, q) -> Measurement:
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.array_equal(x, q):
        raise DegenerateMeasurementError(f"target at the sensor position {q.tolist()}")
    d, theta, varpi = range_bearing_elevation(x, q)[0]
    return Measurement(float(d), float(theta), float(varpi))


def inverse_measure(z: Measurement, q) -> np.ndarray:
    return cartesian_from_rbe(np.array([z.d, z.theta, z.varpi or 0.0]), q)[0]
