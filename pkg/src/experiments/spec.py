"""Experiment documents: validated configuration for one reproducible study"""
import json
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from environment.geometry import Environment, Vector3
from errors import ConfigError
from filtering.phd_filter import FilterConfig
from planning.planner import PlannerConfig
from sensors.base_sensor import BaseSensor
from sensors.fov_sensor import FovCameraSensor, SensorConfig2D
from sensors.omni_sensor import OmniRangeSensor, SensorConfig3D
from targets.found_targets import Thresholds
from vehicle.controller import ObstacleSet
from vehicle.tracking import VehicleConfig

Algorithm = Literal['proposed', 'lawnmower', 'refinement-only']


class UniformTargets(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: Literal['uniform'] = 'uniform'
    count: int = Field(..., ge=0)
    margin: float = Field(20.0, ge=0.0, description="distance kept from the boundary, m")


class ClusteredTargets(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: Literal['clustered'] = 'clustered'
    clusters: int = Field(..., ge=1)
    per_cluster: int = Field(..., ge=1)
    spread: float = Field(10.0, gt=0.0, description="member std around the cluster centre, m")
    margin: float = Field(20.0, ge=0.0)


class ManualTargets(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: Literal['manual'] = 'manual'
    positions: List[Vector3]


class NoTargets(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: Literal['none'] = 'none'


TargetGenerator = Annotated[Union[UniformTargets, ClusteredTargets, ManualTargets, NoTargets],
                            Field(discriminator='kind')]


class LawnmowerConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    spacing_xy: float = Field(48.0, gt=0.0)
    layer_dz: float = Field(48.0, gt=0.0)


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: str = 'experiment'
    env: Environment
    targets: TargetGenerator = NoTargets()
    obstacles: ObstacleSet = ObstacleSet()
    algorithm: Algorithm = 'proposed'
    sensor: Union[SensorConfig3D, SensorConfig2D] = SensorConfig3D()
    filter: FilterConfig = FilterConfig()
    thresholds: Thresholds = Thresholds()
    planner: PlannerConfig = PlannerConfig()
    vehicle: VehicleConfig = VehicleConfig()
    lawnmower: LawnmowerConfig = LawnmowerConfig()
    grid_spacing: float = Field(10.0, gt=0.0, description="exploration bonus grid spacing, m")
    start: Optional[Vector3] = None
    seeds: List[int] = Field([0], min_length=1)
    max_steps: int = Field(300, gt=0)
    stop_when_all_found: bool = False
    penalty_radius: Optional[float] = Field(None, gt=0.0, description="RMSE penalty; None means 3 T_r")

    @model_validator(mode='after')
    def check_consistency(self):
        env = self.env
        planar_sensor = isinstance(self.sensor, SensorConfig2D)
        if planar_sensor != (env.dimensionality == 2):
            raise ValueError("the 2D camera sensor pairs with a planar environment and the 3D sensor with a volume")
        if isinstance(self.sensor, SensorConfig3D) and self.sensor.sigma <= 0:
            raise ValueError("sensor sigma must be positive; the filter likelihood needs measurement noise")
        if env.dimensionality == 2 and self.planner.moves != 'compass':
            raise ValueError("planar environments need the compass move set")
        if self.start is not None and not env.contains(self.start):
            raise ValueError(f"start {self.start} outside the environment")
        if self.obstacles.collision_radius >= self.vehicle.gains.d_l:
            raise ValueError("obstacle collision_radius must be below the avoidance limit d_l")
        if isinstance(self.targets, ManualTargets):
            outside = [p for p in self.targets.positions if not env.contains(p)]
            if outside:
                raise ValueError(f"manual targets outside the environment: {outside}")
        if isinstance(self.targets, (UniformTargets, ClusteredTargets)):
            extent = env.size[env.active_axes]
            if 2 * self.targets.margin >= extent.min():
                raise ValueError(f"target margin {self.targets.margin} leaves no room inside the environment")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        return self

    @property
    def start_position(self) -> Vector3:
        return self.start if self.start is not None else self.env.lower

    @property
    def rmse_penalty(self) -> float:
        return self.penalty_radius if self.penalty_radius is not None else 3.0 * self.thresholds.T_r


def build_sensor(spec: ExperimentSpec) -> BaseSensor:
    if isinstance(spec.sensor, SensorConfig2D):
        return FovCameraSensor(spec.sensor)
    return OmniRangeSensor(spec.sensor)


def resolved_planner(spec: ExperimentSpec, sensor: BaseSensor) -> PlannerConfig:
    """Planner with an explicit exploration weight; refinement-only drops exploration"""
    objective = spec.planner.objective
    if spec.algorithm == 'refinement-only':
        alpha = 0.0
    else:
        alpha = objective.resolved_alpha(spec.thresholds.T_m, sensor.peak_detection)
    return spec.planner.model_copy(update={'objective': objective.model_copy(update={'alpha': alpha})})


def _error_paths(error: ValidationError) -> str:
    return '; '.join(f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in error.errors())


def parse_spec(document: dict) -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment document: {_error_paths(e)}") from e


def load_spec(path: Path) -> ExperimentSpec:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    spec = parse_spec(document)
    logger.debug(f"Loaded experiment '{spec.name}' from {path}")
    return spec


def with_override(spec: ExperimentSpec, param: str, value: Any) -> ExperimentSpec:
    """Copy of spec with one dotted parameter replaced, e.g. planner.tau or thresholds.T_r"""
    document = spec.model_dump(mode='json')
    keys = param.split('.')
    node = document
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"unknown parameter '{param}'")
        node = node[key]
    if not isinstance(node, dict) or keys[-1] not in node:
        raise ConfigError(f"unknown parameter '{param}'")
    node[keys[-1]] = value
    return parse_spec(document)


def with_overrides(spec: ExperimentSpec, seeds: Optional[List[int]] = None,
                   algorithm: Optional[str] = None) -> ExperimentSpec:
    if seeds is not None:
        spec = with_override(spec, 'seeds', seeds)
    if algorithm is not None:
        spec = with_override(spec, 'algorithm', algorithm)
    return spec
