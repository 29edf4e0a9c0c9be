"""Waypoint tracking between planner steps and the vehicle drivers used by the search loop"""
import math
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import solve_ivp

from errors import SingularityError
from vehicle.controller import (ControlGains, ObstacleSet, apply_avoidance, backstep_control,
                                detour_waypoints, obstacle_indicator)
from vehicle.dynamics import UavParams, UavState, dynamics_deriv

# below these the attitude parametrisation of the controller breaks down
MIN_AIRSPEED = 0.5
MIN_COS_PITCH = 1e-2

Attitude = Tuple[float, float, float, float]


class VehicleConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    mode: Literal['dynamic', 'kinematic'] = 'dynamic'
    params: UavParams = UavParams()
    gains: ControlGains = ControlGains()
    initial_attitude: Attitude = (15.0, math.pi / 4, 0.0, 0.0)
    dt: float = Field(0.01, gt=0.0)
    t_max: float = Field(10.0, gt=0.0)
    tolerance: float = Field(0.5, gt=0.0, description="waypoint reached radius, m")
    integrator: Literal['rk45', 'rk4'] = 'rk45'
    as_printed: bool = False
    on_singularity: Literal['abort', 'reseed'] = 'abort'

    @model_validator(mode='after')
    def check_attitude(self):
        if self.initial_attitude[0] <= 0:
            raise ValueError("initial airspeed must be positive")
        return self


@dataclass
class TrackResult:
    state: UavState
    times: np.ndarray
    trajectory: np.ndarray
    reached: bool
    singular: bool = False


def _closed_loop(x: np.ndarray, q_d: np.ndarray, cfg: VehicleConfig, obs: ObstacleSet) -> np.ndarray:
    s = UavState.from_vector(x)
    u = backstep_control(s, q_d, cfg.gains, cfg.params, cfg.as_printed)
    O = obstacle_indicator(s.q, obs, cfg.gains.d_l)
    return dynamics_deriv(s, apply_avoidance(u, O, cfg.gains.k_obs), cfg.params, cfg.as_printed)


def _is_singular(x: np.ndarray) -> bool:
    return x[3] <= MIN_AIRSPEED or abs(math.cos(x[5])) <= MIN_COS_PITCH or abs(math.cos(x[6])) <= MIN_COS_PITCH


def _track_rk45(x0, q_d, cfg, obs) -> TrackResult:
    def reached(t, x):
        return np.linalg.norm(x[:3] - q_d) - cfg.tolerance

    def stalled(t, x):
        return x[3] - MIN_AIRSPEED

    def vertical(t, x):
        return abs(math.cos(x[5])) - MIN_COS_PITCH

    for event in (reached, stalled, vertical):
        event.terminal = True
        event.direction = -1

    grid = np.arange(0.0, cfg.t_max + 0.5 * cfg.dt, cfg.dt)
    try:
        sol = solve_ivp(lambda t, x: _closed_loop(x, q_d, cfg, obs), (0.0, cfg.t_max), x0,
                        method='RK45', t_eval=grid, max_step=cfg.dt, events=(reached, stalled, vertical))
    except SingularityError as e:
        logger.warning(f"Integration stopped: {e}")
        return TrackResult(UavState.from_vector(x0), np.zeros(1), x0[None, :3], False, True)

    times, samples = sol.t, sol.y.T
    hit_reached = sol.t_events[0].size > 0
    hit_singular = sol.t_events[1].size > 0 or sol.t_events[2].size > 0
    if hit_reached or hit_singular:
        # close the trajectory at the terminating event
        event_index = 0 if hit_reached else (1 if sol.t_events[1].size else 2)
        times = np.append(times, sol.t_events[event_index][0])
        samples = np.vstack([samples, sol.y_events[event_index][0]])
    final = samples[-1]
    return TrackResult(UavState.from_vector(final), times, samples[:, :3], hit_reached, hit_singular)


def _track_rk4(x0, q_d, cfg, obs) -> TrackResult:
    h = cfg.dt
    steps = int(round(cfg.t_max / h))
    x = x0.copy()
    samples = [x.copy()]
    reached = singular = False
    for _ in range(steps):
        try:
            k1 = _closed_loop(x, q_d, cfg, obs)
            k2 = _closed_loop(x + 0.5 * h * k1, q_d, cfg, obs)
            k3 = _closed_loop(x + 0.5 * h * k2, q_d, cfg, obs)
            k4 = _closed_loop(x + h * k3, q_d, cfg, obs)
        except SingularityError as e:
            logger.warning(f"Integration stopped: {e}")
            singular = True
            break
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        samples.append(x.copy())
        if not np.all(np.isfinite(x)) or _is_singular(x):
            singular = True
            break
        if np.linalg.norm(x[:3] - q_d) < cfg.tolerance:
            reached = True
            break
    samples = np.vstack(samples)
    times = np.arange(samples.shape[0]) * h
    return TrackResult(UavState.from_vector(samples[-1]), times, samples[:, :3], reached, singular)


def _track_leg(s: UavState, q_d: np.ndarray, cfg: VehicleConfig, obs: ObstacleSet) -> TrackResult:
    x0 = s.as_vector()
    if np.linalg.norm(s.q - q_d) < cfg.tolerance:
        return TrackResult(s, np.zeros(1), s.q[None, :], True)
    if _is_singular(x0):
        return TrackResult(s, np.zeros(1), s.q[None, :], False, True)
    if cfg.integrator == 'rk4':
        return _track_rk4(x0, q_d, cfg, obs)
    return _track_rk45(x0, q_d, cfg, obs)


def track_to(s: UavState, q_d, cfg: VehicleConfig, obs: Optional[ObstacleSet] = None) -> TrackResult:
    """Fly the closed loop toward q_d until within tolerance, t_max, or a singular regime.

    Obstacles near the straight leg are passed through the via-points of detour_waypoints,
    each tracked in turn under the one t_max budget.
    """
    q_d = np.asarray(q_d, dtype=float)
    obs = obs or ObstacleSet()
    if np.linalg.norm(s.q - q_d) < cfg.tolerance or _is_singular(s.as_vector()):
        return _track_leg(s, q_d, cfg, obs)

    route = detour_waypoints(s.q, q_d, obs, cfg.gains.d_l)
    if len(route) > 1:
        logger.debug(f"Detour toward {np.round(q_d, 2).tolist()} via {np.round(route[:-1], 2).tolist()}")
    times, trajectory = [np.zeros(1)], [s.q[None, :]]
    elapsed, state = 0.0, s
    for reference in route:
        remaining = cfg.t_max - elapsed
        if remaining <= 0.0:
            return TrackResult(state, np.concatenate(times), np.vstack(trajectory), False)
        leg = _track_leg(state, reference, cfg.model_copy(update={'t_max': remaining}), obs)
        times.append(elapsed + leg.times[1:])
        trajectory.append(leg.trajectory[1:])
        elapsed += float(leg.times[-1])
        state = leg.state
        if leg.singular or not leg.reached:
            return TrackResult(state, np.concatenate(times), np.vstack(trajectory), False, leg.singular)
    return TrackResult(state, np.concatenate(times), np.vstack(trajectory), True)


def kinematic_move(q, q_d) -> np.ndarray:
    return np.asarray(q_d, dtype=float).copy()


@dataclass
class KinematicVehicle:
    """Teleports to every commanded waypoint"""
    position: np.ndarray

    def move_to(self, q_d) -> np.ndarray:
        self.position = kinematic_move(self.position, q_d)
        return self.position

    @property
    def min_clearance(self) -> float:
        return float('inf')


@dataclass
class DynamicVehicle:
    """Closed-loop vehicle; keeps the audit of every integrated leg"""
    state: UavState
    cfg: VehicleConfig
    obstacles: ObstacleSet = field(default_factory=ObstacleSet)
    timeouts: int = 0
    singular_legs: int = 0
    flight_time: float = 0.0
    min_clearance: float = float('inf')
    avoidance_legs: int = 0
    legs: List[TrackResult] = field(default_factory=list)
    keep_legs: bool = False

    @classmethod
    def start(cls, q, cfg: VehicleConfig, obstacles: Optional[ObstacleSet] = None,
              keep_legs: bool = False) -> "DynamicVehicle":
        state = UavState(np.asarray(q, dtype=float), np.asarray(cfg.initial_attitude, dtype=float))
        return cls(state=state, cfg=cfg, obstacles=obstacles or ObstacleSet(), keep_legs=keep_legs)

    @property
    def position(self) -> np.ndarray:
        return self.state.q

    def move_to(self, q_d) -> np.ndarray:
        result = track_to(self.state, q_d, self.cfg, self.obstacles)
        self.flight_time += float(result.times[-1])
        clearance = self.obstacles.min_distance(result.trajectory)
        self.min_clearance = min(self.min_clearance, clearance)
        # the heading bias was active on at least one sample of this leg
        if clearance < self.cfg.gains.d_l:
            self.avoidance_legs += 1
        if self.keep_legs:
            self.legs.append(result)

        if result.singular:
            self.singular_legs += 1
            if self.cfg.on_singularity == 'abort':
                raise SingularityError(
                    f"vehicle left the trackable regime near {result.state.q.round(2).tolist()}")
            logger.warning(f"Singular leg toward {np.round(q_d, 2).tolist()}, reseeding vehicle at the waypoint")
            # the jump to the waypoint is audited along the detour route from where the leg stopped
            jump = np.vstack([result.state.q[None, :],
                              detour_waypoints(result.state.q, q_d, self.obstacles, self.cfg.gains.d_l)])
            self.min_clearance = min(self.min_clearance, self.obstacles.path_distance(jump))
            self.state = UavState(np.asarray(q_d, dtype=float), np.asarray(self.cfg.initial_attitude))
            return self.state.q

        if not result.reached:
            self.timeouts += 1
            logger.warning(f"Waypoint {np.round(q_d, 2).tolist()} not reached within {self.cfg.t_max} s, "
                           f"stopped at {result.state.q.round(2).tolist()}")
        self.state = result.state
        return self.state.q
