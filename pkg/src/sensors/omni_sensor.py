"""Omnidirectional ranging sensor with a smooth probabilistic field of view"""
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from sensors.base_sensor import BaseSensor
from sensors.measurements import cartesian_from_rbe, range_bearing_elevation


class SensorConfig3D(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    G: float = Field(0.98, gt=0.0, le=1.0, description="peak detection probability")
    F: Tuple[float, float, float] = (25.0, 25.0, 25.0)
    sigma: float = Field(0.5, ge=0.0, description="noise std, m for range and rad for angles")

    @field_validator('F')
    @classmethod
    def check_fov(cls, value):
        if min(value) <= 0:
            raise ValueError(f"FOV constants must be positive, got {value}")
        return value


def detection_prob(x, q, cfg: SensorConfig3D):
    """G * exp(-||zeta|| / 2) with zeta the F-normalised offset"""
    zeta = (np.atleast_2d(x) - np.asarray(q, dtype=float)) / np.asarray(cfg.F)
    prob = cfg.G * np.exp(-np.linalg.norm(zeta, axis=1) / 2.0)
    return prob if np.ndim(x) > 1 else float(prob[0])


class OmniRangeSensor(BaseSensor):
    """Range, bearing and elevation sensor used in the 3D search"""

    measurement_dim = 3

    def __init__(self, config: Optional[SensorConfig3D] = None):
        self.config = config or SensorConfig3D()

    @property
    def covariance(self) -> np.ndarray:
        return np.eye(3) * self.config.sigma ** 2

    @property
    def active_axes(self) -> np.ndarray:
        return np.array([True, True, True])

    @property
    def peak_detection(self) -> float:
        return self.config.G

    def detection_prob(self, x, q):
        return detection_prob(np.atleast_2d(x), q, self.config)

    def measure(self, x, q):
        return range_bearing_elevation(x, q)

    def inverse(self, z, q):
        return cartesian_from_rbe(z, q)

    def birth_regularization(self) -> np.ndarray:
        return np.eye(3) * (2.0 * self.config.sigma) ** 2
