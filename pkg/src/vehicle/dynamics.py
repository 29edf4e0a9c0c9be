"""Fixed-wing UAV point-mass model in the NED frame"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import SingularityError

# cos(gamma) below this is vertical flight, where the lift row of g is undefined
VERTICAL_COS = 1e-9

Vector3 = Tuple[float, float, float]


class UavParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    m: float = Field(10.0, gt=0.0, description="mass, kg")
    g: float = Field(9.8, gt=0.0, description="gravity, m/s^2")
    D: float = Field(0.9, description="drag force, N")
    L: float = Field(0.7, description="aerodynamic lift, N")
    wind: Vector3 = (0.0, 0.0, 0.0)

    @property
    def wind_array(self) -> np.ndarray:
        return np.asarray(self.wind, dtype=float)


@dataclass
class UavState:
    """Position q (m) and attitude theta = [V_a, beta, gamma, phi]"""
    q: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(3)
        self.theta = np.asarray(self.theta, dtype=float).reshape(4)

    @property
    def airspeed(self) -> float:
        return float(self.theta[0])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.theta])

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "UavState":
        return cls(x[:3], x[3:7])


def velocity(theta: np.ndarray, p: UavParams, as_printed: bool = False) -> np.ndarray:
    """y(theta) including wind"""
    V, beta, gamma, _ = theta
    east = V * np.sin(beta) * (np.sin(gamma) if as_printed else np.cos(gamma))
    return np.array([V * np.cos(beta) * np.cos(gamma), east, -V * np.sin(gamma)]) + p.wind_array


def velocity_jacobian(theta: np.ndarray, as_printed: bool = False) -> np.ndarray:
    """d y / d theta, shape (3, 4); wind is constant"""
    V, beta, gamma, _ = theta
    cb, sb, cg, sg = np.cos(beta), np.sin(beta), np.cos(gamma), np.sin(gamma)
    if as_printed:
        east = [sb * sg, V * cb * sg, V * sb * cg, 0.0]
    else:
        east = [sb * cg, V * cb * cg, -V * sb * sg, 0.0]
    return np.array([
        [cb * cg, -V * sb * cg, -V * cb * sg, 0.0],
        east,
        [-sg, 0.0, -V * cg, 0.0],
    ])


def drift(theta: np.ndarray, p: UavParams) -> np.ndarray:
    """f(theta)"""
    V, _, gamma, phi = theta
    return np.array([-p.D / p.m - p.g * np.sin(gamma), -(p.g / V) * np.cos(gamma), 0.0, np.sin(phi)])


def input_matrix(theta: np.ndarray, p: UavParams) -> np.ndarray:
    """g(theta), shape (4, 3); roll has no input"""
    V, _, gamma, phi = theta
    if V <= 0 or abs(np.cos(gamma)) < VERTICAL_COS:
        raise SingularityError(f"input matrix undefined at V={V:.4g}, gamma={gamma:.4g}")
    return np.array([
        [1.0 / p.m, 0.0, 0.0],
        [0.0, (p.g / V) * np.cos(phi), 0.0],
        [0.0, 0.0, p.L / (p.m * V * np.cos(gamma))],
        [0.0, 0.0, 0.0],
    ])


def dynamics_deriv(s: UavState, u: np.ndarray, p: UavParams, as_printed: bool = False) -> np.ndarray:
    """[q_dot, theta_dot] for control u = [u_Va, u_beta, u_gamma]"""
    q_dot = velocity(s.theta, p, as_printed)
    theta_dot = drift(s.theta, p) + input_matrix(s.theta, p) @ np.asarray(u, dtype=float)
    return np.concatenate([q_dot, theta_dot])
