"""Planner objective terms: exploration bonus and target refinement"""
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from environment.geometry import Environment
from environment.grid import ScalarGrid
from filtering.particles import ParticleSet
from sensors.base_sensor import BaseSensor
from targets.clustering import Cluster


class RefinementMode(str, Enum):
    CENTER_PROB = 'center_prob'
    MI_SURROGATE = 'mi_surrogate'


class ObjectiveConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    alpha: Optional[float] = Field(
        None, ge=0.0, description="exploration weight; None derives T_m / G")
    mode: RefinementMode = RefinementMode.CENTER_PROB

    def resolved_alpha(self, mass_threshold: float, peak_detection: float) -> float:
        if self.alpha is not None:
            return self.alpha
        return mass_threshold / peak_detection


class ExplorationField:
    """Grid of iota values in [0, 1]; starts at 1 everywhere and only decays"""

    def __init__(self, grid: ScalarGrid):
        self.grid = grid

    @classmethod
    def fresh(cls, env: Environment, spacing: float) -> "ExplorationField":
        return cls(ScalarGrid.covering(env, spacing, fill=1.0))

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    def total(self) -> float:
        return float(self.grid.values.sum())

    def explored_fraction(self, level: float = 0.5) -> float:
        return float(np.mean(self.grid.values < level))

    def copy(self) -> "ExplorationField":
        return ExplorationField(self.grid.copy())


def bonus_update(field: ExplorationField, q, sensor: BaseSensor) -> ExplorationField:
    """iota <- iota * (1 - pi(node, q)) at every node, in place"""
    nodes = field.grid.node_positions()
    pi = sensor.detection_prob(nodes, q).reshape(field.grid.values.shape)
    field.grid.values *= (1.0 - pi)
    return field


def exploration_score(field: ExplorationField, seq: np.ndarray) -> float:
    """Interpolated bonus summed over the candidate positions"""
    return float(np.sum(field.grid.sample(np.asarray(seq, dtype=float).reshape(-1, 3))))


def center_prob_score(clusters: List[Cluster], seq: np.ndarray, sensor: BaseSensor) -> float:
    if not clusters:
        return 0.0
    centers = np.vstack([c.center for c in clusters])
    return float(sum(np.sum(sensor.detection_prob(centers, q)) for q in np.reshape(seq, (-1, 3))))


def mi_surrogate_score(particles: ParticleSet, seq: np.ndarray, sensor: BaseSensor) -> float:
    """Expected number of detections along the sequence"""
    if len(particles) == 0:
        return 0.0
    return float(sum(np.dot(particles.weights, sensor.detection_prob(particles.positions, q))
                     for q in np.reshape(seq, (-1, 3))))


def refinement_score(mode: RefinementMode, clusters: List[Cluster], particles: ParticleSet,
                     seq: np.ndarray, sensor: BaseSensor) -> float:
    if mode == RefinementMode.CENTER_PROB:
        return center_prob_score(clusters, seq, sensor)
    return mi_surrogate_score(particles, seq, sensor)
