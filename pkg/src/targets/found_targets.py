"""Found-target marking and measurement gating"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from filtering.particles import ParticleSet
from sensors.base_sensor import BaseSensor
from sensors.measurements import MeasurementSet
from targets.clustering import Cluster


class Thresholds(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    T_r: float = Field(1.1, gt=0.0, description="max cluster radius, m")
    T_m: float = Field(2.2, gt=0.0, description="min cluster mass")
    T_z: float = Field(5.0, gt=0.0, description="gating distance, m")


@dataclass
class FoundTargets:
    """Append-only list of confirmed target positions in discovery order"""
    positions: List[np.ndarray] = field(default_factory=list)
    steps: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.positions)

    def add(self, position: np.ndarray, step: int):
        self.positions.append(np.asarray(position, dtype=float))
        self.steps.append(int(step))

    def as_array(self) -> np.ndarray:
        if not self.positions:
            return np.empty((0, 3))
        return np.vstack(self.positions)

    def near(self, position: np.ndarray, radius: float) -> bool:
        if not self.positions:
            return False
        return bool(np.min(np.linalg.norm(self.as_array() - position, axis=1)) < radius)


def is_confident(cluster: Cluster, th: Thresholds) -> bool:
    return cluster.radius <= th.T_r and cluster.mass >= th.T_m


def extract_found(clusters: List[Cluster], th: Thresholds, particles: ParticleSet,
                  found: FoundTargets, step: int) -> Tuple[List[np.ndarray], ParticleSet]:
    """Promote narrow, heavy clusters to found targets and delete their particles"""
    additions = []
    doomed = np.zeros(len(particles), dtype=bool)
    for cluster in clusters:
        if not is_confident(cluster, th):
            continue
        doomed[cluster.members] = True
        if found.near(cluster.center, th.T_r):
            logger.debug(f"Suppressed duplicate target at {cluster.center.round(2).tolist()}")
            continue
        found.add(cluster.center, step)
        additions.append(cluster.center)
        logger.info(f"🎯 Target found at {cluster.center.round(2).tolist()} "
                    f"(radius {cluster.radius:.2f} m, mass {cluster.mass:.2f}) at step {step}")
    return additions, particles.subset(~doomed)


def gate_measurements(measurements: MeasurementSet, found: FoundTargets, th: Thresholds, q,
                      sensor: BaseSensor) -> MeasurementSet:
    """For each found target, drop the single closest measurement within T_z"""
    if len(measurements) == 0 or len(found) == 0:
        return measurements
    points = sensor.inverse(measurements.values, q)
    available = np.ones(len(measurements), dtype=bool)
    for target in found.positions:
        distance = np.linalg.norm(points - target, axis=1)
        candidates = available & (distance <= th.T_z)
        if not np.any(candidates):
            continue
        closest = int(np.argmin(np.where(candidates, distance, np.inf)))
        available[closest] = False
    return measurements.subset(available)
