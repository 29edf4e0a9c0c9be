"""Receding-horizon candidate enumeration and selection"""
import itertools
import time
from dataclasses import dataclass
from typing import List, Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from environment.geometry import Environment
from errors import ConfigError
from filtering.particles import ParticleSet
from planning.objectives import (ExplorationField, ObjectiveConfig, exploration_score,
                                 refinement_score)
from sensors.base_sensor import BaseSensor
from targets.clustering import Cluster

# slack for accumulated float error when a sequence ends exactly on the boundary
BOUNDARY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MoveSet:
    deltas: np.ndarray
    step_length: float

    def __post_init__(self):
        deltas = np.asarray(self.deltas, dtype=float).reshape(-1, 3)
        if deltas.shape[0] == 0:
            raise ValueError("move set must not be empty")
        if not np.allclose(np.linalg.norm(deltas, axis=1), self.step_length):
            raise ValueError(f"every move must have length {self.step_length}")
        object.__setattr__(self, 'deltas', deltas)

    @classmethod
    def axis_aligned(cls, step: float) -> "MoveSet":
        """+x, -x, +y, -y, +z, -z"""
        eye = np.eye(3) * step
        return cls(np.vstack([eye[0], -eye[0], eye[1], -eye[1], eye[2], -eye[2]]), step)

    @classmethod
    def compass(cls, step: float) -> "MoveSet":
        """Forward, backward, right, left and the four diagonals in the horizontal plane"""
        d = step / np.sqrt(2.0)
        deltas = [(step, 0, 0), (-step, 0, 0), (0, step, 0), (0, -step, 0),
                  (d, d, 0), (d, -d, 0), (-d, d, 0), (-d, -d, 0)]
        return cls(np.array(deltas, dtype=float), step)

    def __len__(self) -> int:
        return self.deltas.shape[0]


class PlannerConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    tau: int = Field(1, ge=1, description="horizon")
    objective: ObjectiveConfig = ObjectiveConfig()
    moves: Literal['axis', 'compass'] = 'axis'
    step_length: float = Field(12.0, gt=0.0)

    def move_set(self) -> MoveSet:
        if self.moves == 'compass':
            return MoveSet.compass(self.step_length)
        return MoveSet.axis_aligned(self.step_length)


@dataclass
class PlanResult:
    sequence: np.ndarray
    exploration: float
    refinement: float
    score: float
    candidates: int
    seconds: float


def enumerate_sequences(q, cfg: PlannerConfig, env: Environment) -> np.ndarray:
    """All |moves|^tau cumulative sequences inside env, shape (n, tau, 3)"""
    q = np.asarray(q, dtype=float)
    deltas = cfg.move_set().deltas
    combos = np.array(list(itertools.product(range(len(deltas)), repeat=cfg.tau)))
    sequences = q + np.cumsum(deltas[combos], axis=1)
    inside = np.array([all(env.contains(p, BOUNDARY_TOLERANCE) for p in seq) for seq in sequences])
    if not np.any(inside):
        logger.warning(f"Every candidate from {q.round(2).tolist()} leaves the environment, clamping")
        return env.clamp(sequences)
    return env.clamp(sequences[inside])


def plan(q, field: ExplorationField, particles: ParticleSet, clusters: List[Cluster],
         cfg: PlannerConfig, env: Environment, sensor: BaseSensor) -> PlanResult:
    """argmax over sequences of alpha * E + T, first occurrence wins ties"""
    alpha = cfg.objective.alpha
    if alpha is None:
        raise ConfigError("exploration weight alpha is unresolved; build the planner with resolved_planner")
    started = time.perf_counter()
    sequences = enumerate_sequences(q, cfg, env)
    exploration = np.array([exploration_score(field, seq) for seq in sequences])
    refinement = np.array([refinement_score(cfg.objective.mode, clusters, particles, seq, sensor)
                           for seq in sequences])
    scores = alpha * exploration + refinement
    best = int(np.argmax(scores))
    return PlanResult(
        sequence=sequences[best],
        exploration=float(exploration[best]),
        refinement=float(refinement[best]),
        score=float(scores[best]),
        candidates=len(sequences),
        seconds=time.perf_counter() - started,
    )
