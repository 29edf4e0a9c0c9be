"""Weighted particle representation of the intensity function"""
from dataclasses import dataclass

import numpy as np


@dataclass
class ParticleSet:
    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if self.positions.shape[0] != self.weights.shape[0]:
            raise ValueError(
                f"{self.positions.shape[0]} positions but {self.weights.shape[0]} weights")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise ValueError("particle weights must be finite and non-negative")

    @classmethod
    def empty(cls) -> "ParticleSet":
        return cls(np.empty((0, 3)), np.empty(0))

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def subset(self, keep: np.ndarray) -> "ParticleSet":
        return ParticleSet(self.positions[keep], self.weights[keep])

    def with_weights(self, weights: np.ndarray) -> "ParticleSet":
        return ParticleSet(self.positions, weights)

    def concatenate(self, other: "ParticleSet") -> "ParticleSet":
        return ParticleSet(np.vstack([self.positions, other.positions]),
                           np.concatenate([self.weights, other.weights]))

    def copy(self) -> "ParticleSet":
        return ParticleSet(self.positions.copy(), self.weights.copy())
