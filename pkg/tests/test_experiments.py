"""Tests for experiment documents, scenarios, sweep baselines and the runner"""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from environment.geometry import Environment
from errors import ConfigError
from experiments.baselines import densify, lawnmower_waypoints
from experiments.runner import run_experiment, run_single, step_frame, write_outputs
from experiments.scenarios import generate_targets
from experiments.spec import (ClusteredTargets, ManualTargets, NoTargets, UniformTargets, load_spec,
                              parse_spec, resolved_planner, build_sensor, with_override, with_overrides)

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'


def small_document(**changes):
    document = {
        'name': 'small',
        'env': {'lower': [0.0, 0.0, 0.0], 'upper': [48.0, 48.0, 24.0]},
        'targets': {'kind': 'manual', 'positions': [[20.0, 20.0, 10.0]]},
        'sensor': {'G': 0.98, 'F': [25.0, 25.0, 25.0], 'sigma': 0.05},
        'thresholds': {'T_r': 2.0, 'T_m': 0.5, 'T_z': 5.0},
        'vehicle': {'mode': 'kinematic'},
        'lawnmower': {'spacing_xy': 24.0, 'layer_dz': 24.0},
        'seeds': [1, 2],
        'max_steps': 12,
    }
    document.update(changes)
    return document


class TestExperimentSpec:
    @pytest.mark.parametrize('path', sorted(CONFIGS.glob('*.json')), ids=lambda p: p.stem)
    def test_shipped_configs_load(self, path):
        spec = load_spec(path)
        assert spec.name == path.stem

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match='colour'):
            parse_spec(small_document(colour='red'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_spec(tmp_path / 'absent.json')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"name": ', encoding='utf-8')
        with pytest.raises(ConfigError):
            load_spec(path)

    def test_planar_sensor_needs_planar_env(self):
        with pytest.raises(ConfigError):
            parse_spec(small_document(sensor={'half_extent': [0.2, 0.2]}))

    def test_noise_free_sensor_rejected(self):
        with pytest.raises(ConfigError, match='sigma'):
            parse_spec(small_document(sensor={'G': 0.98, 'sigma': 0.0}))

    def test_start_inside_env(self):
        with pytest.raises(ConfigError):
            parse_spec(small_document(start=[100.0, 0.0, 0.0]))

    def test_manual_targets_inside_env(self):
        with pytest.raises(ConfigError):
            parse_spec(small_document(targets={'kind': 'manual', 'positions': [[99.0, 0.0, 0.0]]}))

    def test_duplicate_seeds(self):
        with pytest.raises(ConfigError):
            parse_spec(small_document(seeds=[1, 1]))

    def test_defaults(self):
        spec = parse_spec(small_document())
        assert spec.start_position == (0.0, 0.0, 0.0)
        assert spec.rmse_penalty == pytest.approx(6.0)

    def test_override(self):
        spec = with_override(parse_spec(small_document()), 'planner.tau', 2)
        assert spec.planner.tau == 2

    def test_override_unknown_parameter(self):
        with pytest.raises(ConfigError):
            with_override(parse_spec(small_document()), 'planner.depth', 2)

    def test_override_is_revalidated(self):
        with pytest.raises(ConfigError):
            with_override(parse_spec(small_document()), 'thresholds.T_r', -1.0)

    def test_cli_overrides(self):
        spec = with_overrides(parse_spec(small_document()), seeds=[7], algorithm='lawnmower')
        assert spec.seeds == [7]
        assert spec.algorithm == 'lawnmower'

    def test_resolved_alpha(self):
        spec = parse_spec(small_document())
        sensor = build_sensor(spec)
        assert resolved_planner(spec, sensor).objective.alpha == pytest.approx(0.5 / 0.98)
        refinement = with_overrides(spec, algorithm='refinement-only')
        assert resolved_planner(refinement, sensor).objective.alpha == 0.0


class TestScenarios:
    env = Environment(lower=(0, 0, 0), upper=(100, 100, 100))

    def test_uniform_respects_margin(self, rng):
        targets = generate_targets(UniformTargets(count=50, margin=10.0), self.env, rng)
        assert targets.count == 50
        assert np.all(targets.positions >= 10.0) and np.all(targets.positions <= 90.0)

    def test_clustered(self, rng):
        targets = generate_targets(ClusteredTargets(clusters=2, per_cluster=3, spread=8.0, margin=15.0),
                                   self.env, rng)
        assert targets.count == 6
        assert np.all(targets.positions >= 15.0) and np.all(targets.positions <= 85.0)

    def test_manual_and_none(self, rng):
        manual = generate_targets(ManualTargets(positions=[(1.0, 2.0, 3.0)]), self.env, rng)
        np.testing.assert_array_equal(manual.positions, [[1.0, 2.0, 3.0]])
        assert generate_targets(NoTargets(), self.env, rng).count == 0

    def test_planar_targets_stay_in_plane(self, env2d, rng):
        targets = generate_targets(UniformTargets(count=5, margin=0.1), env2d, rng)
        np.testing.assert_array_equal(targets.positions[:, 2], 1.0)

    def test_same_seed_same_targets(self):
        gen = UniformTargets(count=6)
        a = generate_targets(gen, self.env, np.random.default_rng(4))
        b = generate_targets(gen, self.env, np.random.default_rng(4))
        np.testing.assert_array_equal(a.positions, b.positions)


class TestLawnmower:
    def test_minimal_sweep(self):
        env = Environment(lower=(0.0, 0.0, 1.0), upper=(10.0, 10.0, 1.0))
        waypoints = lawnmower_waypoints(env, 10.0, 1.0)
        np.testing.assert_allclose(waypoints, [[0, 0, 1], [10, 0, 1], [10, 10, 1], [0, 10, 1]])

    def test_count_matches_row_layer_oracle(self):
        env = Environment(lower=(-20, -20, -20), upper=(260, 260, 260))
        rows = math.ceil(280 / 48) + 1
        layers = math.ceil(280 / 48) + 1
        waypoints = lawnmower_waypoints(env, 48.0, 48.0)
        assert len(waypoints) == 2 * rows * layers == 98

    def test_consecutive_waypoints_differ_along_one_axis(self, env3d):
        waypoints = lawnmower_waypoints(env3d, 24.0, 24.0)
        changes = np.count_nonzero(np.abs(np.diff(waypoints, axis=0)) > 1e-9, axis=1)
        assert np.all(changes == 1)

    def test_densify(self):
        dense = densify(np.array([[0.0, 0.0, 0.0], [30.0, 0.0, 0.0], [30.0, 12.0, 0.0]]), 12.0)
        np.testing.assert_allclose(dense[:, 0], [0, 12, 24, 30, 30])
        np.testing.assert_allclose(dense[-1], [30.0, 12.0, 0.0])
        assert np.all(np.linalg.norm(np.diff(dense, axis=0), axis=1) <= 12.0 + 1e-9)


class TestRunner:
    def test_lawnmower_follows_sweep(self):
        spec = parse_spec(small_document(algorithm='lawnmower', targets={'kind': 'none'}, max_steps=500))
        record = run_single(spec, 1)
        sweep = densify(lawnmower_waypoints(spec.env, 24.0, 24.0), spec.planner.step_length)
        visited = np.array([row.q for row in record.rows])
        np.testing.assert_allclose(visited, sweep)

    def test_lawnmower_truncated(self):
        spec = parse_spec(small_document(algorithm='lawnmower', targets={'kind': 'none'}, max_steps=5))
        record = run_single(spec, 1)
        sweep = densify(lawnmower_waypoints(spec.env, 24.0, 24.0), spec.planner.step_length)
        np.testing.assert_allclose([row.q for row in record.rows], sweep[:5])

    def test_dynamic_vehicle_commands_the_same_waypoints(self):
        document = small_document(algorithm='proposed', max_steps=8)
        kinematic = run_single(parse_spec(document), 1)
        document['vehicle'] = {'mode': 'dynamic', 'on_singularity': 'reseed'}
        dynamic = run_single(parse_spec(document), 1)
        np.testing.assert_allclose([r.q for r in dynamic.rows], [r.q for r in kinematic.rows])
        assert [r.n_found for r in dynamic.rows] == [r.n_found for r in kinematic.rows]
        assert dynamic.flight_time > 0.0

    def test_same_seed_same_outputs(self, tmp_path):
        spec = parse_spec(small_document())
        write_outputs([run_single(spec, 3)], tmp_path / 'a')
        write_outputs([run_single(spec, 3)], tmp_path / 'b')
        for name in ('steps.csv', 'found.csv'):
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()

    def test_stop_when_all_found(self):
        spec = parse_spec(small_document(start=[20.0, 20.0, 12.0], stop_when_all_found=True, max_steps=30))
        record = run_single(spec, 2)
        assert record.found_positions.shape[0] == 1
        assert record.steps_to_all_found is not None
        assert len(record.rows) == record.steps_to_all_found
        assert len(record.rows) < 30

    def test_step_wall_time_covers_planning(self):
        record = run_single(parse_spec(small_document(max_steps=4)), 1)
        for row in record.rows:
            assert row.wall_seconds > 0.0
            assert row.wall_seconds >= row.planning_seconds
        assert record.mean_step_seconds > 0.0

    def test_threaded_runs_keep_seed_order(self):
        spec = parse_spec(small_document(seeds=[5, 3, 9], max_steps=4))
        records = run_experiment(spec, workers=3)
        assert [r.seed for r in records] == [5, 3, 9]
        serial = run_experiment(spec, workers=1)
        assert step_frame(records).equals(step_frame(serial))

    def test_output_files(self, tmp_path):
        spec = parse_spec(small_document(max_steps=3))
        write_outputs(run_experiment(spec, workers=1), tmp_path)
        header = (tmp_path / 'steps.csv').read_text(encoding='utf-8').splitlines()[0]
        assert header == 'step,seed,qx,qy,qz,n_hat,n_found,n_meas,n_gated,score_expl,score_refine'
        assert (tmp_path / 'found.csv').exists()
        assert (tmp_path / 'summary.csv').exists()
