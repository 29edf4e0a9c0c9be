"""Backstepping tracking control with heading-bias avoidance and detour routing around obstacles"""
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.linalg import expm

from errors import SingularityError
from vehicle.dynamics import (UavParams, UavState, Vector3, drift, input_matrix, velocity,
                              velocity_jacobian)


class ControlGains(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    K_g1: float = Field(9.0, gt=0.0)
    K_g2: float = Field(9.0, gt=0.0)
    K_g3: float = Field(9.0, gt=0.0)
    k_obs: float = Field(5.0, gt=0.0)
    d_l: float = Field(6.0, gt=0.0, description="avoidance distance limit, m")
    condition_limit: float = Field(1e8, gt=1.0)

    @property
    def damping(self) -> float:
        return self.K_g1 + self.K_g2 + self.K_g3

    @property
    def stiffness(self) -> float:
        return 1.0 + self.K_g1 * self.K_g2 * self.K_g3

    def scaled(self, factor: float) -> "ControlGains":
        return self.model_copy(update={
            'K_g1': self.K_g1 * factor, 'K_g2': self.K_g2 * factor, 'K_g3': self.K_g3 * factor})


class ObstacleSet(BaseModel):
    """Point obstacles audited against a collision radius"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    centers: List[Vector3] = []
    collision_radius: float = Field(2.0, gt=0.0)

    @property
    def array(self) -> np.ndarray:
        if not self.centers:
            return np.empty((0, 3))
        return np.asarray(self.centers, dtype=float)

    def min_distance(self, points: np.ndarray) -> float:
        """Closest approach of any point to any obstacle; inf without obstacles"""
        if not self.centers:
            return float('inf')
        points = np.atleast_2d(points)
        gaps = np.linalg.norm(points[:, None, :] - self.array[None, :, :], axis=2)
        return float(gaps.min())

    def segment_distance(self, a, b) -> float:
        """Closest approach of the straight segment a-b to any obstacle"""
        if not self.centers:
            return float('inf')
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        d = b - a
        length2 = float(d @ d)
        if length2 == 0.0:
            return self.min_distance(a)
        s = np.clip((self.array - a) @ d / length2, 0.0, 1.0)
        closest = a + s[:, None] * d
        return float(np.linalg.norm(self.array - closest, axis=1).min())

    def path_distance(self, points) -> float:
        """Closest approach of a polyline through points"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if len(points) == 1:
            return self.min_distance(points)
        return min(self.segment_distance(a, b) for a, b in zip(points[:-1], points[1:]))


def backstep_control(s: UavState, q_d, gains: ControlGains, p: UavParams,
                     as_printed: bool = False) -> np.ndarray:
    """u = (J g)^-1 (-J f - (K1+K2+K3) q_dot - (1 + K1 K2 K3)(q - q_d))"""
    jac = velocity_jacobian(s.theta, as_printed)
    coupling = jac @ input_matrix(s.theta, p)
    if not np.all(np.isfinite(coupling)) or np.linalg.cond(coupling) > gains.condition_limit:
        raise SingularityError(f"tracking controller undefined at theta={np.round(s.theta, 4).tolist()}")
    q_dot = velocity(s.theta, p, as_printed)
    rhs = (-jac @ drift(s.theta, p) - gains.damping * q_dot
           - gains.stiffness * (s.q - np.asarray(q_d, dtype=float)))
    return np.linalg.solve(coupling, rhs)


def obstacle_indicator(q, obs: ObstacleSet, d_l: float) -> int:
    return int(obs.min_distance(np.asarray(q, dtype=float)) < d_l)


def apply_avoidance(u: np.ndarray, O: int, k_obs: float) -> np.ndarray:
    biased = np.array(u, dtype=float, copy=True)
    biased[1] -= k_obs * O
    return biased


def detour_clearance(obs: ObstacleSet, d_l: float) -> float:
    return 0.5 * (obs.collision_radius + d_l)


def _side_normal(t: np.ndarray) -> np.ndarray:
    # horizontal perpendicular of the leg; a vertical leg sidesteps along x
    horizontal = np.array([-t[1], t[0], 0.0])
    norm = np.linalg.norm(horizontal)
    if norm < 1e-9:
        return np.array([1.0, 0.0, 0.0])
    return horizontal / norm


def detour_waypoints(q, q_d, obs: ObstacleSet, d_l: float) -> np.ndarray:
    """References from q to q_d, ending at q_d, that pass obstacles at the detour clearance.

    An obstacle ahead on the leg and closer than the clearance to it is passed on its far
    side from the leg through two via-points offset sideways by the clearance, d_l before
    and after it along the leg, clipped to the leg's ends.
    """
    q, q_d = np.asarray(q, dtype=float), np.asarray(q_d, dtype=float)
    leg = q_d - q
    length = float(np.linalg.norm(leg))
    if not obs.centers or length == 0.0:
        return q_d[None, :]
    t = leg / length
    clearance = detour_clearance(obs, d_l)
    along = (obs.array - q) @ t
    route = []
    for index in np.argsort(along):
        center, s = obs.array[index], float(along[index])
        if s <= 0.0 or s >= length:
            continue
        offset = q + s * t - center
        gap = float(np.linalg.norm(offset))
        if gap >= clearance:
            continue
        n = offset / gap if gap > 1e-9 else _side_normal(t)
        side = center + clearance * n
        route.append(side + (max(s - d_l, 0.0) - s) * t)
        route.append(side + (min(s + d_l, length) - s) * t)
    route.append(q_d)
    return np.vstack(route)


def linearized_error_response(gains: ControlGains, e0, t: float, e_dot0=None) -> float:
    """Position-error norm at time t of e'' = -(K1+K2+K3) e' - (1 + K1 K2 K3) e, per axis"""
    e0 = np.asarray(e0, dtype=float).reshape(-1)
    e_dot0 = np.zeros_like(e0) if e_dot0 is None else np.asarray(e_dot0, dtype=float).reshape(-1)
    A = np.array([[0.0, 1.0], [-gains.stiffness, -gains.damping]])
    transition = expm(A * t)
    errors = transition[0, 0] * e0 + transition[0, 1] * e_dot0
    return float(np.linalg.norm(errors))
