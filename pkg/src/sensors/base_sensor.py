"""Base sensor class with the shared measurement pipeline"""
from abc import ABC, abstractmethod

import numpy as np
from loguru import logger
from scipy.stats import multivariate_normal

from sensors.measurements import MeasurementSet, TargetSet, wrap_angle


class BaseSensor(ABC):
    """Detection model plus measurement function h, its inverse and noise R"""

    #: number of components per measurement row
    measurement_dim: int = 3

    @property
    @abstractmethod
    def covariance(self) -> np.ndarray:
        """Measurement noise covariance R"""

    @property
    @abstractmethod
    def active_axes(self) -> np.ndarray:
        """Boolean mask of the Cartesian axes the sensor observes"""

    @property
    @abstractmethod
    def peak_detection(self) -> float:
        """Largest value detection_prob can take"""

    @abstractmethod
    def detection_prob(self, x: np.ndarray, q: np.ndarray) -> np.ndarray:
        """pi(x, q) for points x of shape (n, 3)"""

    @abstractmethod
    def measure(self, x: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Noiseless h(x) rows for points x of shape (n, 3)"""

    @abstractmethod
    def inverse(self, z: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Cartesian points h^-1(z) for measurement rows z"""

    @abstractmethod
    def birth_regularization(self) -> np.ndarray:
        """Covariance added to the empirical birth covariance"""

    def wrap(self, z: np.ndarray) -> np.ndarray:
        """Bring noisy rows back to the measurement invariants"""
        z = np.array(z, dtype=float, copy=True)
        z[:, 0] = np.maximum(z[:, 0], 0.0)
        z[:, 1] = wrap_angle(z[:, 1])
        if z.shape[1] > 2:
            z[:, 2] = np.clip(z[:, 2], -np.pi / 2, np.pi / 2)
        return z

    def residual(self, z: np.ndarray, hx: np.ndarray) -> np.ndarray:
        """z - h(x) with the bearing difference wrapped"""
        res = z - hx
        res[..., 1] = wrap_angle(res[..., 1])
        return res

    def likelihood(self, z: np.ndarray, x: np.ndarray, q: np.ndarray) -> np.ndarray:
        """g(z | x) for every measurement row and point, shape (m, n)"""
        z = np.atleast_2d(z)
        x = np.atleast_2d(x)
        m, n = z.shape[0], x.shape[0]
        if m == 0 or n == 0:
            return np.zeros((m, n))
        if np.any(np.diag(self.covariance) <= 0):
            raise ValueError("likelihood needs a positive definite noise covariance")
        hx = self.measure(x, q)
        res = self.residual(z[:, None, :], hx[None, :, :]).reshape(m * n, -1)
        density = multivariate_normal(mean=np.zeros(self.measurement_dim), cov=self.covariance)
        return np.atleast_1d(density.pdf(res)).reshape(m, n)

    def sense(self, targets: TargetSet, q: np.ndarray, rng: np.random.Generator) -> MeasurementSet:
        """One Bernoulli detection per target, Gaussian noise, shuffled order, no clutter"""
        if targets.count == 0:
            return MeasurementSet.empty(self.measurement_dim)
        q = np.asarray(q, dtype=float)
        detected = rng.random(targets.count) < self.detection_prob(targets.positions, q)
        if not np.any(detected):
            return MeasurementSet.empty(self.measurement_dim)
        clean = self.measure(targets.positions[detected], q)
        std = np.sqrt(np.diag(self.covariance))
        noisy = self.wrap(clean + rng.normal(0.0, 1.0, size=clean.shape) * std)
        order = rng.permutation(noisy.shape[0])
        logger.debug(f"Sensed {noisy.shape[0]}/{targets.count} targets at {q.round(2).tolist()}")
        return MeasurementSet(noisy[order], self.measurement_dim)
