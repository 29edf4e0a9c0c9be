"""SMC-PHD recursion for static targets: measurement-driven birth, update, adaptive resampling"""
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from filtering.particles import ParticleSet
from sensors.base_sensor import BaseSensor
from sensors.measurements import MeasurementSet

# C(z) below this means no particle supports the measurement
SUPPORT_FLOOR = 1e-300
# particles lighter than this fraction of the total mass are dropped before resampling
PRUNE_FRACTION = 1e-12


class FilterConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    p_s: float = Field(1.0, ge=0.0, le=1.0, description="survival probability")
    birth_count: int = Field(130, ge=0, description="birth particles per step with measurements")
    birth_mass_per_measurement: float = Field(0.2, ge=0.0)
    particles_per_target: int = Field(400, gt=0)
    max_particles: int = Field(5000, gt=0)

    @model_validator(mode='after')
    def check_cap(self):
        if self.max_particles < self.particles_per_target:
            raise ValueError(
                f"max_particles {self.max_particles} below particles_per_target {self.particles_per_target}")
        return self


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def expected_count(particles: ParticleSet) -> float:
    return particles.total_mass


def predict(particles: ParticleSet, measurements: MeasurementSet, q, cfg: FilterConfig,
            sensor: BaseSensor, rng: np.random.Generator) -> ParticleSet:
    """Dirac transition with survival scaling, plus births around the back-projected measurements"""
    survivors = particles.with_weights(particles.weights * cfg.p_s)
    if len(measurements) == 0 or cfg.birth_count == 0:
        return survivors

    points = sensor.inverse(measurements.values, q)
    mean = points.mean(axis=0)
    if points.shape[0] > 1:
        cov = np.cov(points, rowvar=False, bias=True)
    else:
        cov = np.zeros((3, 3))
    cov = cov + sensor.birth_regularization()
    births = rng.multivariate_normal(mean, cov, size=cfg.birth_count)
    frozen = ~sensor.active_axes
    births[:, frozen] = mean[frozen]

    birth_mass = cfg.birth_mass_per_measurement * len(measurements)
    weights = np.full(cfg.birth_count, birth_mass / cfg.birth_count)
    logger.debug(f"Birth: {cfg.birth_count} particles, mass {birth_mass:.3f} around {mean.round(2).tolist()}")
    return survivors.concatenate(ParticleSet(births, weights))


def update(particles: ParticleSet, measurements: MeasurementSet, q, sensor: BaseSensor) -> ParticleSet:
    """w_i <- [1 - pi(x_i) + sum_z psi_z(x_i) / C(z)] * w_i"""
    if len(particles) == 0:
        return particles
    pi = sensor.detection_prob(particles.positions, q)
    factor = 1.0 - pi
    if len(measurements) > 0:
        psi = pi[None, :] * sensor.likelihood(measurements.values, particles.positions, q)
        support = psi @ particles.weights
        supported = support > SUPPORT_FLOOR
        if not np.all(supported):
            logger.warning(f"{int(np.sum(~supported))} measurement(s) unsupported by any particle, skipped")
        if np.any(supported):
            factor = factor + np.sum(psi[supported] / support[supported, None], axis=0)
    return particles.with_weights(factor * particles.weights)


def resample(particles: ParticleSet, cfg: FilterConfig, rng: np.random.Generator) -> ParticleSet:
    """Multinomial resampling to round(l * N) particles (clamped), equal weights N / L+"""
    n_hat = expected_count(particles)
    if len(particles) == 0 or n_hat <= 0:
        return ParticleSet.empty()

    keep = particles.weights >= PRUNE_FRACTION * n_hat
    pool = particles.subset(keep)
    count = min(cfg.max_particles,
                max(cfg.particles_per_target, round_half_up(cfg.particles_per_target * n_hat)))
    probabilities = pool.weights / pool.weights.sum()
    picks = rng.choice(len(pool), size=count, replace=True, p=probabilities)
    return ParticleSet(pool.positions[picks], np.full(count, n_hat / count))

