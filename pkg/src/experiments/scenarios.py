"""Ground-truth target placement"""
import numpy as np
from loguru import logger

from environment.geometry import Environment
from experiments.spec import ClusteredTargets, ManualTargets, NoTargets, UniformTargets
from sensors.measurements import TargetSet


def _margin_box(env: Environment, margin: float):
    active = env.active_axes
    lower = env.lower_array + np.where(active, margin, 0.0)
    upper = env.upper_array - np.where(active, margin, 0.0)
    return lower, upper


def uniform_targets(env: Environment, count: int, margin: float, rng: np.random.Generator) -> TargetSet:
    lower, upper = _margin_box(env, margin)
    return TargetSet(rng.uniform(lower, upper, size=(count, 3)))


def clustered_targets(env: Environment, gen: ClusteredTargets, rng: np.random.Generator) -> TargetSet:
    """Cluster centres uniform in the margin box, members Gaussian around them"""
    lower, upper = _margin_box(env, gen.margin)
    centers = rng.uniform(lower, upper, size=(gen.clusters, 3))
    spread = np.where(env.active_axes, gen.spread, 0.0)
    members = np.repeat(centers, gen.per_cluster, axis=0)
    members = members + rng.normal(size=members.shape) * spread
    return TargetSet(np.clip(members, lower, upper))


def generate_targets(generator, env: Environment, rng: np.random.Generator) -> TargetSet:
    if isinstance(generator, UniformTargets):
        targets = uniform_targets(env, generator.count, generator.margin, rng)
    elif isinstance(generator, ClusteredTargets):
        targets = clustered_targets(env, generator, rng)
    elif isinstance(generator, ManualTargets):
        targets = TargetSet(np.asarray(generator.positions, dtype=float).reshape(-1, 3))
    elif isinstance(generator, NoTargets):
        targets = TargetSet(np.empty((0, 3)))
    else:
        raise TypeError(f"unknown target generator {type(generator).__name__}")
    logger.debug(f"Placed {targets.count} targets ({generator.kind})")
    return targets
