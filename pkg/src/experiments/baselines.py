"""Boustrophedon coverage baseline"""
import math
from typing import List

import numpy as np

from environment.geometry import Environment


def _levels(lower: float, upper: float, spacing: float) -> np.ndarray:
    """Evenly spaced levels covering [lower, upper] no further apart than spacing"""
    if upper <= lower:
        return np.array([lower])
    count = math.ceil((upper - lower) / spacing - 1e-9) + 1
    return np.linspace(lower, upper, count)


def lawnmower_waypoints(env: Environment, spacing_xy: float, layer_dz: float) -> np.ndarray:
    """Corner waypoints of a sweep along x, rows stepped in y, layers stepped in z.

    Every other layer visits its rows in reverse so consecutive waypoints
    differ along exactly one axis.
    """
    if spacing_xy <= 0 or layer_dz <= 0:
        raise ValueError("lawnmower spacings must be positive")
    lo, hi = env.lower_array, env.upper_array
    rows = _levels(lo[1], hi[1], spacing_xy)
    layers = _levels(lo[2], hi[2], layer_dz)

    waypoints: List[List[float]] = []
    forward = True
    for index, z in enumerate(layers):
        ordered_rows = rows if index % 2 == 0 else rows[::-1]
        for y in ordered_rows:
            xs = (lo[0], hi[0]) if forward else (hi[0], lo[0])
            waypoints.extend([[xs[0], y, z], [xs[1], y, z]])
            forward = not forward
    return np.array(waypoints, dtype=float)


def densify(waypoints: np.ndarray, step_length: float) -> np.ndarray:
    """Insert points every step_length along each leg; corners are kept"""
    if step_length <= 0:
        raise ValueError("step_length must be positive")
    waypoints = np.asarray(waypoints, dtype=float).reshape(-1, 3)
    if waypoints.shape[0] == 0:
        return waypoints
    points = [waypoints[0]]
    for start, end in zip(waypoints[:-1], waypoints[1:]):
        length = float(np.linalg.norm(end - start))
        if length == 0.0:
            continue
        pieces = math.ceil(length / step_length - 1e-9)
        for i in range(1, pieces + 1):
            points.append(start + (end - start) * min(1.0, i * step_length / length))
    return np.vstack(points)
