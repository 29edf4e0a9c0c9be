"""One step of the target search loop and the state it carries"""
import time
from dataclasses import dataclass, field
from typing import List, Optional, Protocol

import numpy as np
from loguru import logger

from environment.geometry import Environment
from environment.randomness import RandomStreams
from filtering import phd_filter
from filtering.phd_filter import FilterConfig
from filtering.particles import ParticleSet
from planning.objectives import ExplorationField, bonus_update
from planning.planner import PlannerConfig, plan
from sensors.base_sensor import BaseSensor
from sensors.measurements import TargetSet
from targets.clustering import choose_cluster_count, kmeans
from targets.found_targets import (FoundTargets, Thresholds, extract_found, gate_measurements,
                                   is_confident)


class Vehicle(Protocol):
    position: np.ndarray

    def move_to(self, q_d) -> np.ndarray:
        ...


@dataclass
class StepMetrics:
    step: int
    q: np.ndarray
    n_hat: float
    n_found: int
    n_meas: int
    n_gated: int
    score_expl: float
    score_refine: float
    planning_seconds: float
    wall_seconds: float = 0.0  # the whole step, flight included


@dataclass
class SearchSetup:
    env: Environment
    sensor: BaseSensor
    filter_cfg: FilterConfig
    thresholds: Thresholds
    planner_cfg: PlannerConfig


@dataclass
class SearchState:
    """Working state of one run; q is the commanded waypoint the sensor observes from"""
    q: np.ndarray
    particles: ParticleSet
    field: ExplorationField
    found: FoundTargets = field(default_factory=FoundTargets)
    step: int = 0
    history: List[StepMetrics] = field(default_factory=list)

    @classmethod
    def initial(cls, q, env: Environment, grid_spacing: float) -> "SearchState":
        return cls(q=np.asarray(q, dtype=float), particles=ParticleSet.empty(),
                   field=ExplorationField.fresh(env, grid_spacing))


def search_step(state: SearchState, truth: TargetSet, setup: SearchSetup, streams: RandomStreams,
                vehicle: Vehicle, waypoint: Optional[np.ndarray] = None) -> SearchState:
    """Cluster, mark found, sense, gate, filter, decay the bonus, plan, then move.

    A fixed waypoint skips planning (sweep baselines); the filter and the
    found-target bookkeeping run unchanged.
    """
    started = time.perf_counter()
    k, q, sensor = state.step, state.q, setup.sensor

    clusters = kmeans(state.particles, choose_cluster_count(state.particles), streams.clustering)
    _, particles = extract_found(clusters, setup.thresholds, state.particles, state.found, k)
    open_clusters = [c for c in clusters if not is_confident(c, setup.thresholds)]

    measurements = sensor.sense(truth, q, streams.sensor)
    kept = gate_measurements(measurements, state.found, setup.thresholds, q, sensor)

    particles = phd_filter.predict(particles, kept, q, setup.filter_cfg, sensor, streams.filter)
    particles = phd_filter.update(particles, kept, q, sensor)
    particles = phd_filter.resample(particles, setup.filter_cfg, streams.filter)
    state.particles = particles

    bonus_update(state.field, q, sensor)

    if waypoint is None:
        result = plan(q, state.field, particles, open_clusters, setup.planner_cfg, setup.env, sensor)
        target, expl, refine, seconds = result.sequence[0], result.exploration, result.refinement, result.seconds
    else:
        target, expl, refine, seconds = np.asarray(waypoint, dtype=float), 0.0, 0.0, 0.0

    metrics = StepMetrics(step=k, q=q.copy(), n_hat=particles.total_mass, n_found=len(state.found),
                          n_meas=len(measurements), n_gated=len(measurements) - len(kept),
                          score_expl=expl, score_refine=refine, planning_seconds=seconds)
    state.history.append(metrics)
    logger.debug(f"Step {k}: q={q.round(2).tolist()} N={metrics.n_hat:.2f} "
                 f"found={metrics.n_found} meas={metrics.n_meas} gated={metrics.n_gated}")

    vehicle.move_to(target)
    metrics.wall_seconds = time.perf_counter() - started
    state.q = np.asarray(target, dtype=float).copy()
    state.step = k + 1
    return state
