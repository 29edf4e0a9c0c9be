"""Downward camera with a hard square field of view (indoor 2D mode)"""
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from sensors.base_sensor import BaseSensor


class SensorConfig2D(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    half_extent: Tuple[float, float] = (0.2, 0.2)
    noise_variance: Tuple[float, float] = (0.145, 0.112)

    @field_validator('half_extent', 'noise_variance')
    @classmethod
    def check_positive(cls, value):
        if min(value) <= 0:
            raise ValueError(f"values must be positive, got {value}")
        return value


def detection_prob_2d(x, q, cfg: SensorConfig2D):
    """1 inside the closed box q +/- half_extent, else 0"""
    offset = np.abs(np.atleast_2d(x)[:, :2] - np.asarray(q, dtype=float)[:2])
    inside = np.all(offset <= np.asarray(cfg.half_extent), axis=1)
    prob = inside.astype(float)
    return prob if np.ndim(x) > 1 else float(prob[0])


class FovCameraSensor(BaseSensor):
    """Planar range and bearing of targets inside the camera footprint"""

    measurement_dim = 2

    def __init__(self, config: Optional[SensorConfig2D] = None):
        self.config = config or SensorConfig2D()

    @property
    def covariance(self) -> np.ndarray:
        return np.diag(self.config.noise_variance)

    @property
    def active_axes(self) -> np.ndarray:
        return np.array([True, True, False])

    @property
    def peak_detection(self) -> float:
        return 1.0

    def detection_prob(self, x, q):
        return detection_prob_2d(np.atleast_2d(x), q, self.config)

    def measure(self, x, q):
        delta = np.atleast_2d(x)[:, :2] - np.asarray(q, dtype=float)[:2]
        return np.column_stack([np.linalg.norm(delta, axis=1), np.arctan2(delta[:, 1], delta[:, 0])])

    def inverse(self, z, q):
        z = np.atleast_2d(z)
        q = np.asarray(q, dtype=float)
        points = np.tile(q, (z.shape[0], 1))
        points[:, 0] += z[:, 0] * np.cos(z[:, 1])
        points[:, 1] += z[:, 0] * np.sin(z[:, 1])
        return points

    def birth_regularization(self) -> np.ndarray:
        # quarter of the footprint per axis; the range noise exceeds the footprint itself
        hx, hy = self.config.half_extent
        return np.diag([(hx / 2.0) ** 2, (hy / 2.0) ** 2, 0.0])
