"""Experiment execution: one deterministic run per seed, fanned out over worker threads"""
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from loguru import logger

import config
from analytics.metrics import match_found, rmse_found, steps_to_all_found
from environment.randomness import RandomStreams
from experiments.baselines import densify, lawnmower_waypoints
from experiments.scenarios import generate_targets
from experiments.spec import ExperimentSpec, build_sensor, resolved_planner
from planning.search import SearchSetup, SearchState, StepMetrics, search_step
from vehicle.tracking import DynamicVehicle, KinematicVehicle

STEP_COLUMNS = ['step', 'seed', 'qx', 'qy', 'qz', 'n_hat', 'n_found', 'n_meas', 'n_gated',
                'score_expl', 'score_refine']
FOUND_COLUMNS = ['seed', 'found_step', 'x', 'y', 'z', 'matched_truth_index', 'match_dist']
FLOAT_FORMAT = '%.10g'


@dataclass
class RunRecord:
    experiment: str
    algorithm: str
    seed: int
    max_steps: int
    truth: np.ndarray
    rows: List[StepMetrics] = field(default_factory=list)
    found_positions: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    found_steps: List[int] = field(default_factory=list)
    penalty: float = 0.0
    min_clearance: float = float('inf')
    timeouts: int = 0
    singular_legs: int = 0
    avoidance_legs: int = 0
    flight_time: float = 0.0
    wall_seconds: float = 0.0

    @property
    def rmse(self) -> Optional[float]:
        return rmse_found(self.found_positions, self.truth, self.penalty)

    @property
    def steps_to_all_found(self) -> Optional[int]:
        return steps_to_all_found(self)

    @property
    def mean_planning_seconds(self) -> float:
        if not self.rows:
            return 0.0
        return float(np.mean([row.planning_seconds for row in self.rows]))

    @property
    def mean_step_seconds(self) -> float:
        if not self.rows:
            return 0.0
        return float(np.mean([row.wall_seconds for row in self.rows]))


def _make_vehicle(spec: ExperimentSpec, start: np.ndarray):
    if spec.vehicle.mode == 'kinematic':
        return KinematicVehicle(start.copy())
    return DynamicVehicle.start(start, spec.vehicle, spec.obstacles)


def run_single(spec: ExperimentSpec, seed: int) -> RunRecord:
    """Deterministic given (spec, seed)"""
    started = time.perf_counter()
    streams = RandomStreams.from_seed(seed)
    sensor = build_sensor(spec)
    truth = generate_targets(spec.targets, spec.env, streams.scenario)
    setup = SearchSetup(env=spec.env, sensor=sensor, filter_cfg=spec.filter,
                        thresholds=spec.thresholds, planner_cfg=resolved_planner(spec, sensor))

    sweep = None
    start = np.asarray(spec.start_position, dtype=float)
    if spec.algorithm == 'lawnmower':
        corners = lawnmower_waypoints(spec.env, spec.lawnmower.spacing_xy, spec.lawnmower.layer_dz)
        sweep = densify(corners, spec.planner.step_length)
        start = sweep[0]

    state = SearchState.initial(start, spec.env, spec.grid_spacing)
    vehicle = _make_vehicle(spec, start)
    logger.info(f"🚀 {spec.name} seed {seed}: {spec.algorithm}, {truth.count} targets, {spec.max_steps} steps")

    for k in range(spec.max_steps):
        waypoint = None if sweep is None else sweep[min(k + 1, len(sweep) - 1)]
        search_step(state, truth, setup, streams, vehicle, waypoint)
        if sweep is not None and k + 1 >= len(sweep):
            logger.info(f"Sweep finished after {k + 1} steps")
            break
        if spec.stop_when_all_found and truth.count > 0 and len(state.found) >= truth.count:
            logger.info(f"All {truth.count} targets found at step {k}")
            break

    record = RunRecord(
        experiment=spec.name,
        algorithm=spec.algorithm,
        seed=seed,
        max_steps=spec.max_steps,
        truth=truth.positions,
        rows=state.history,
        found_positions=state.found.as_array(),
        found_steps=list(state.found.steps),
        penalty=spec.rmse_penalty,
        min_clearance=getattr(vehicle, 'min_clearance', float('inf')),
        timeouts=getattr(vehicle, 'timeouts', 0),
        singular_legs=getattr(vehicle, 'singular_legs', 0),
        avoidance_legs=getattr(vehicle, 'avoidance_legs', 0),
        flight_time=getattr(vehicle, 'flight_time', 0.0),
        wall_seconds=time.perf_counter() - started,
    )
    logger.info(f"✅ {spec.name} seed {seed}: found {len(state.found)}/{truth.count} in {len(state.history)} steps")
    return record


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> List[RunRecord]:
    """One RunRecord per seed, in seed order"""
    workers = workers or config.SEARCH_WORKERS
    if workers <= 1 or len(spec.seeds) == 1:
        return [run_single(spec, seed) for seed in spec.seeds]
    with ThreadPoolExecutor(max_workers=min(workers, len(spec.seeds))) as pool:
        futures = [pool.submit(run_single, spec, seed) for seed in spec.seeds]
        return [f.result() for f in futures]


def step_frame(records: List[RunRecord]) -> pd.DataFrame:
    rows = [
        {'step': r.step, 'seed': rec.seed, 'qx': r.q[0], 'qy': r.q[1], 'qz': r.q[2],
         'n_hat': r.n_hat, 'n_found': r.n_found, 'n_meas': r.n_meas, 'n_gated': r.n_gated,
         'score_expl': r.score_expl, 'score_refine': r.score_refine}
        for rec in records for r in rec.rows
    ]
    frame = pd.DataFrame(rows, columns=STEP_COLUMNS)
    return frame.sort_values(['seed', 'step'], kind='stable').reset_index(drop=True)


def found_frame(records: List[RunRecord]) -> pd.DataFrame:
    rows = []
    for rec in records:
        index, charged = match_found(rec.found_positions, rec.truth, rec.penalty)
        for position, step, i, dist in zip(rec.found_positions, rec.found_steps, index, charged):
            rows.append({'seed': rec.seed, 'found_step': step, 'x': position[0], 'y': position[1],
                         'z': position[2], 'matched_truth_index': int(i),
                         'match_dist': dist if i >= 0 else float('nan')})
    frame = pd.DataFrame(rows, columns=FOUND_COLUMNS)
    return frame.sort_values(['seed', 'found_step'], kind='stable').reset_index(drop=True)


def summary_frame(records: List[RunRecord]) -> pd.DataFrame:
    return pd.DataFrame([{
        'experiment': r.experiment, 'algorithm': r.algorithm, 'seed': r.seed,
        'steps': len(r.rows), 'n_true': r.truth.shape[0], 'n_found': r.found_positions.shape[0],
        'rmse': r.rmse, 'steps_to_all_found': r.steps_to_all_found,
        'min_clearance': r.min_clearance, 'timeouts': r.timeouts, 'singular_legs': r.singular_legs,
        'avoidance_legs': r.avoidance_legs, 'mean_planning_seconds': r.mean_planning_seconds,
        'mean_step_seconds': r.mean_step_seconds,
    } for r in records])


def write_frame(frame: pd.DataFrame, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', encoding='utf-8')


def write_outputs(records: List[RunRecord], out_dir: Path):
    """steps.csv and found.csv are byte-deterministic; summary.csv carries timing"""
    out_dir = Path(out_dir)
    write_frame(step_frame(records), out_dir / 'steps.csv')
    write_frame(found_frame(records), out_dir / 'found.csv')
    write_frame(summary_frame(records), out_dir / 'summary.csv')
    logger.success(f"Wrote results for {len(records)} run(s) to {out_dir}")
