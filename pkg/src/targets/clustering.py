"""Weighted K-means over the particle cloud"""
import warnings
from dataclasses import dataclass
from typing import List

import numpy as np
from loguru import logger
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from filtering.particles import ParticleSet
from filtering.phd_filter import expected_count, round_half_up

MAX_ITERATIONS = 50


@dataclass
class Cluster:
    center: np.ndarray
    radius: float
    mass: float
    members: np.ndarray

    @classmethod
    def from_members(cls, particles: ParticleSet, members: np.ndarray) -> "Cluster":
        points = particles.positions[members]
        weights = particles.weights[members]
        if weights.sum() > 0:
            center = np.average(points, axis=0, weights=weights)
        else:
            center = points.mean(axis=0)
        radius = float(np.max(np.linalg.norm(points - center, axis=1)))
        return cls(center=center, radius=radius, mass=float(weights.sum()), members=members)


def choose_cluster_count(particles: ParticleSet) -> int:
    if len(particles) == 0:
        return 0
    return max(1, round_half_up(expected_count(particles)))


def farthest_point_seeds(particles: ParticleSet, count: int, rng: np.random.Generator) -> np.ndarray:
    """First seed drawn by mass, then repeatedly the particle farthest from all seeds"""
    weights = particles.weights
    total = weights.sum()
    probabilities = weights / total if total > 0 else None
    first = int(rng.choice(len(particles), p=probabilities))
    seeds = [first]
    gap = np.linalg.norm(particles.positions - particles.positions[first], axis=1)
    while len(seeds) < count:
        nxt = int(np.argmax(gap))
        seeds.append(nxt)
        gap = np.minimum(gap, np.linalg.norm(particles.positions - particles.positions[nxt], axis=1))
    return particles.positions[seeds]


def kmeans(particles: ParticleSet, count: int, rng: np.random.Generator) -> List[Cluster]:
    """Lloyd iterations with weighted centroids; empty clusters are dropped"""
    if len(particles) == 0 or count < 1:
        return []
    # sklearn relocates surplus centres onto duplicates instead of leaving them empty
    distinct = np.unique(particles.positions, axis=0).shape[0]
    count = min(count, distinct)
    seeds = farthest_point_seeds(particles, count, rng)
    model = KMeans(n_clusters=count, init=seeds, n_init=1, max_iter=MAX_ITERATIONS,
                   algorithm='lloyd', random_state=0)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', ConvergenceWarning)
        labels = model.fit_predict(particles.positions, sample_weight=particles.weights)

    clusters = []
    for label in range(count):
        members = np.flatnonzero(labels == label)
        if members.size:
            clusters.append(Cluster.from_members(particles, members))
    if len(clusters) < count:
        logger.debug(f"K-means kept {len(clusters)} of {count} clusters")
    return clusters
