"""Tests for UAV dynamics, the tracking controller and waypoint tracking"""
import math

import numpy as np
import pytest

from errors import SingularityError
from vehicle.controller import (ControlGains, ObstacleSet, apply_avoidance, backstep_control, detour_clearance,
                                detour_waypoints, linearized_error_response, obstacle_indicator)
from vehicle.dynamics import (UavParams, UavState, drift, dynamics_deriv, input_matrix, velocity,
                              velocity_jacobian)
from vehicle.tracking import DynamicVehicle, KinematicVehicle, VehicleConfig, kinematic_move, track_to

START = (15.0, math.pi / 4, 0.0, 0.0)


def level(q=(0.0, 0.0, 0.0), theta=(15.0, 0.0, 0.0, 0.0)):
    return UavState(np.asarray(q, dtype=float), np.asarray(theta, dtype=float))


class TestDynamics:
    def test_level_flight(self):
        deriv = dynamics_deriv(level(), np.zeros(3), UavParams())
        np.testing.assert_allclose(deriv[:3], [15.0, 0.0, 0.0], atol=1e-12)

    def test_wind_adds(self):
        deriv = dynamics_deriv(level(), np.zeros(3), UavParams(wind=(3.0, 0.0, 0.0)))
        np.testing.assert_allclose(deriv[:3], [18.0, 0.0, 0.0], atol=1e-12)

    def test_climb_is_negative_down(self):
        eps = 1e-3
        q_dot = velocity(np.array([15.0, 0.0, eps, 0.0]), UavParams())
        assert q_dot[2] == pytest.approx(-15 * eps, rel=1e-6)

    def test_east_velocity_forms(self):
        theta = np.array([15.0, math.pi / 2, 0.0, 0.0])
        assert velocity(theta, UavParams())[1] == pytest.approx(15.0)
        assert velocity(theta, UavParams(), as_printed=True)[1] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize('as_printed', [False, True])
    def test_jacobian_matches_finite_differences(self, as_printed, rng):
        p = UavParams()
        theta = np.array([14.0, 0.3, 0.2, 0.1])
        h = 1e-6
        numeric = np.column_stack([
            (velocity(theta + h * e, p, as_printed) - velocity(theta - h * e, p, as_printed)) / (2 * h)
            for e in np.eye(4)])
        np.testing.assert_allclose(velocity_jacobian(theta, as_printed), numeric, atol=1e-6)

    @pytest.mark.parametrize('gamma', [math.pi / 2, -math.pi / 2])
    def test_vertical_flight_flags_singular_lift_row(self, gamma):
        s = level(theta=(15.0, 0.0, gamma, 0.0))
        with pytest.raises(SingularityError):
            dynamics_deriv(s, np.zeros(3), UavParams())

    def test_state_vector(self):
        s = level(q=(1, 2, 3))
        restored = UavState.from_vector(s.as_vector())
        np.testing.assert_array_equal(restored.q, s.q)
        np.testing.assert_array_equal(restored.theta, s.theta)


class TestBackstepping:
    def test_hover_residual(self):
        p = UavParams(wind=(-15.0, 0.0, 0.0))
        s = level()
        u = backstep_control(s, s.q, ControlGains(), p)
        jac = velocity_jacobian(s.theta)
        np.testing.assert_allclose(jac @ input_matrix(s.theta, p) @ u, -jac @ drift(s.theta, p), atol=1e-9)

    def test_closed_loop_matches_linear_error_dynamics(self):
        p, gains = UavParams(), ControlGains()
        s = UavState(np.array([1.0, -2.0, 0.5]), np.array([12.0, 0.4, 0.1, 0.05]))
        q_d = np.array([12.0, 0.0, 0.0])
        u = backstep_control(s, q_d, gains, p)
        q_ddot = velocity_jacobian(s.theta) @ (drift(s.theta, p) + input_matrix(s.theta, p) @ u)
        expected = -gains.damping * velocity(s.theta, p) - gains.stiffness * (s.q - q_d)
        np.testing.assert_allclose(q_ddot, expected, rtol=1e-9, atol=1e-6)

    def test_vertical_flight_is_singular(self):
        s = level(theta=(15.0, 0.0, math.pi / 2, 0.0))
        with pytest.raises(SingularityError):
            backstep_control(s, np.ones(3), ControlGains(), UavParams())

    def test_stiffer_gains_decay_faster(self):
        gains = ControlGains()
        e0 = [12.0, -3.0, 1.0]
        assert linearized_error_response(gains.scaled(10), e0, 1.0) < linearized_error_response(gains, e0, 1.0)

    def test_default_gain_terms(self):
        gains = ControlGains()
        assert gains.damping == 27.0
        assert gains.stiffness == 730.0


class TestAvoidance:
    obstacles = ObstacleSet(centers=[(0.0, 0.0, 0.0)])

    @pytest.mark.parametrize('distance, expected', [(5.0, 1), (7.0, 0), (6.0, 0)])
    def test_indicator(self, distance, expected):
        assert obstacle_indicator((distance, 0.0, 0.0), self.obstacles, 6.0) == expected

    def test_no_obstacles(self):
        assert obstacle_indicator((0.0, 0.0, 0.0), ObstacleSet(), 6.0) == 0

    def test_indicator_monotone_in_limit(self, rng):
        for q in rng.uniform(-10, 10, size=(50, 3)):
            for small, large in [(2.0, 4.0), (4.0, 6.0), (6.0, 12.0)]:
                assert obstacle_indicator(q, self.obstacles, large) >= obstacle_indicator(q, self.obstacles, small)

    def test_bias(self):
        np.testing.assert_allclose(apply_avoidance(np.array([1.0, 2.0, 3.0]), 1, 5.0), [1.0, -3.0, 3.0])

    def test_inactive_bias(self):
        u = np.array([1.0, 2.0, 3.0])
        biased = apply_avoidance(u, 0, 5.0)
        np.testing.assert_array_equal(biased, u)
        assert biased is not u

    def test_segment_distance(self):
        assert self.obstacles.segment_distance((-5.0, 3.0, 0.0), (5.0, 3.0, 0.0)) == pytest.approx(3.0)
        assert self.obstacles.segment_distance((4.0, 0.0, 0.0), (9.0, 0.0, 0.0)) == pytest.approx(4.0)
        assert ObstacleSet().segment_distance((0, 0, 0), (1, 0, 0)) == float('inf')

    def test_path_distance(self):
        path = [(-8.0, 8.0, 0.0), (8.0, 8.0, 0.0), (8.0, -1.0, 0.0)]
        assert self.obstacles.path_distance(path) == pytest.approx(8.0)
        assert self.obstacles.path_distance([(3.0, 4.0, 0.0)]) == pytest.approx(5.0)


class TestDetour:
    obstacles = ObstacleSet(centers=[(6.0, 0.0, 0.0)], collision_radius=2.0)

    def test_clear_leg_goes_straight(self):
        route = detour_waypoints((0, 0, 0), (12, 0, 0), ObstacleSet(centers=[(6.0, 5.0, 0.0)]), 6.0)
        np.testing.assert_array_equal(route, [[12.0, 0.0, 0.0]])

    def test_obstacle_on_leg_is_passed_sideways(self):
        route = detour_waypoints((0, 0, 0), (12, 0, 0), self.obstacles, 6.0)
        np.testing.assert_allclose(route, [[0.0, 4.0, 0.0], [12.0, 4.0, 0.0], [12.0, 0.0, 0.0]])
        assert detour_clearance(self.obstacles, 6.0) == pytest.approx(4.0)

    def test_detour_keeps_far_side(self):
        route = detour_waypoints((0, 0, 0), (30, 0, 0), ObstacleSet(centers=[(15.0, 1.0, 0.0)]), 6.0)
        np.testing.assert_allclose(route[:2], [[9.0, -3.0, 0.0], [21.0, -3.0, 0.0]])

    def test_vertical_leg_sidesteps_along_x(self):
        route = detour_waypoints((0, 0, 0), (0, 0, 12), ObstacleSet(centers=[(0.0, 0.0, 6.0)]), 6.0)
        np.testing.assert_allclose(route[0], [4.0, 0.0, 0.0])

    def test_two_obstacles_in_leg_order(self):
        obs = ObstacleSet(centers=[(24.0, 1.0, 0.0), (12.0, 0.0, 0.0)])
        q = np.zeros(3)
        route = detour_waypoints(q, (36.0, 0.0, 0.0), obs, 6.0)
        np.testing.assert_allclose(route, [[6, 4, 0], [18, 4, 0], [18, -3, 0], [30, -3, 0], [36, 0, 0]])
        assert obs.path_distance(np.vstack([q, route])) == pytest.approx(detour_clearance(obs, 6.0))


class TestTracking:
    cfg = VehicleConfig(initial_attitude=START)

    def start(self, q=(0.0, 0.0, 0.0)):
        return UavState(np.asarray(q, dtype=float), np.asarray(START))

    def test_already_at_waypoint(self):
        s = self.start()
        result = track_to(s, s.q, self.cfg)
        assert result.reached
        assert result.trajectory.shape == (1, 3)
        assert result.times[-1] == 0.0

    def test_reaches_level_waypoint(self):
        result = track_to(self.start(), (12.0, 0.0, 0.0), self.cfg)
        assert result.reached
        assert not result.singular
        assert result.times[-1] <= 5.0
        assert np.linalg.norm(result.state.q - [12.0, 0.0, 0.0]) <= self.cfg.tolerance + 1e-6

    def test_fixed_step_integrator(self):
        cfg = VehicleConfig(initial_attitude=START, integrator='rk4')
        result = track_to(self.start(), (12.0, 0.0, 0.0), cfg)
        assert result.reached
        assert result.times[-1] <= 5.0

    def test_clears_obstacle_beside_leg(self):
        obstacles = ObstacleSet(centers=[(6.0, 3.0, 0.0)], collision_radius=2.0)
        guarded = track_to(self.start(), (12.0, 0.0, 0.0), self.cfg, obstacles)
        gains = self.cfg.gains
        engaged = any(obstacle_indicator(p, obstacles, gains.d_l) for p in guarded.trajectory)
        assert guarded.reached
        assert engaged
        assert obstacles.min_distance(guarded.trajectory) >= obstacles.collision_radius

        unguarded = track_to(self.start(), (12.0, 0.0, 0.0), self.cfg)
        assert obstacles.min_distance(guarded.trajectory) >= obstacles.min_distance(unguarded.trajectory) - 1e-6

    @pytest.mark.parametrize('integrator', ['rk45', 'rk4'])
    def test_clears_obstacle_midway_on_leg(self, integrator):
        obstacles = ObstacleSet(centers=[(6.0, 0.0, 0.0)], collision_radius=2.0)
        cfg = VehicleConfig(initial_attitude=START, integrator=integrator)
        result = track_to(self.start(), (12.0, 0.0, 0.0), cfg, obstacles)
        assert result.reached
        assert not result.singular
        assert np.linalg.norm(result.state.q - [12.0, 0.0, 0.0]) <= cfg.tolerance + 1e-6
        assert obstacles.min_distance(result.trajectory) >= obstacles.collision_radius
        assert np.all(np.diff(result.times) >= 0.0)
        assert result.times.shape[0] == result.trajectory.shape[0]

    def test_detour_shares_the_time_budget(self):
        obstacles = ObstacleSet(centers=[(6.0, 0.0, 0.0)])
        cfg = VehicleConfig(initial_attitude=START, t_max=0.1)
        result = track_to(self.start(), (12.0, 0.0, 0.0), cfg, obstacles)
        assert result.times[-1] <= cfg.t_max + 1e-9
        assert result.times.shape[0] == result.trajectory.shape[0]

    def test_stalled_start_is_singular(self):
        s = UavState(np.zeros(3), np.array([0.1, 0.0, 0.0, 0.0]))
        result = track_to(s, (12.0, 0.0, 0.0), self.cfg)
        assert result.singular
        assert not result.reached


class TestVehicles:
    def test_kinematic_move(self):
        np.testing.assert_array_equal(kinematic_move((0, 0, 0), (12, 0, 0)), [12.0, 0.0, 0.0])

    def test_kinematic_vehicle(self):
        vehicle = KinematicVehicle(np.zeros(3))
        vehicle.move_to((0.0, 12.0, 0.0))
        np.testing.assert_array_equal(vehicle.position, [0.0, 12.0, 0.0])
        assert vehicle.min_clearance == float('inf')

    def test_dynamic_vehicle_audits_legs(self):
        obstacles = ObstacleSet(centers=[(6.0, 3.0, 0.0)])
        vehicle = DynamicVehicle.start(np.zeros(3), VehicleConfig(initial_attitude=START), obstacles,
                                       keep_legs=True)
        vehicle.move_to((12.0, 0.0, 0.0))
        assert len(vehicle.legs) == 1
        assert vehicle.timeouts == 0
        assert 0.0 < vehicle.flight_time <= 5.0
        assert 2.0 <= vehicle.min_clearance < 6.0
        assert vehicle.avoidance_legs == 1

    def test_clear_legs_do_not_count_as_avoidance(self):
        obstacles = ObstacleSet(centers=[(6.0, 30.0, 0.0)])
        vehicle = DynamicVehicle.start(np.zeros(3), VehicleConfig(initial_attitude=START), obstacles)
        vehicle.move_to((12.0, 0.0, 0.0))
        assert vehicle.avoidance_legs == 0
        assert vehicle.min_clearance > 6.0

    def test_timeout_keeps_achieved_state(self):
        cfg = VehicleConfig(initial_attitude=START, t_max=0.02)
        vehicle = DynamicVehicle.start(np.zeros(3), cfg)
        position = vehicle.move_to((12.0, 0.0, 0.0))
        assert vehicle.timeouts == 1
        assert np.linalg.norm(position - [12.0, 0.0, 0.0]) > cfg.tolerance

    def test_singular_leg_aborts(self):
        vehicle = DynamicVehicle.start(np.zeros(3), VehicleConfig(initial_attitude=START))
        vehicle.state = UavState(np.zeros(3), np.array([0.1, 0.0, 0.0, 0.0]))
        with pytest.raises(SingularityError):
            vehicle.move_to((12.0, 0.0, 0.0))
        assert vehicle.singular_legs == 1

    def test_singular_leg_reseeds(self):
        cfg = VehicleConfig(initial_attitude=START, on_singularity='reseed')
        vehicle = DynamicVehicle.start(np.zeros(3), cfg)
        vehicle.state = UavState(np.zeros(3), np.array([0.1, 0.0, 0.0, 0.0]))
        position = vehicle.move_to((12.0, 0.0, 0.0))
        np.testing.assert_array_equal(position, [12.0, 0.0, 0.0])
        np.testing.assert_array_equal(vehicle.state.theta, START)
        assert vehicle.singular_legs == 1

    def test_reseed_jump_is_audited(self):
        cfg = VehicleConfig(initial_attitude=START, on_singularity='reseed')
        vehicle = DynamicVehicle.start(np.zeros(3), cfg, ObstacleSet(centers=[(6.0, 5.0, 0.0)]))
        vehicle.state = UavState(np.zeros(3), np.array([0.1, 0.0, 0.0, 0.0]))
        vehicle.move_to((12.0, 0.0, 0.0))
        assert vehicle.min_clearance == pytest.approx(5.0)

    def test_reseed_jump_follows_detour(self):
        cfg = VehicleConfig(initial_attitude=START, on_singularity='reseed')
        vehicle = DynamicVehicle.start(np.zeros(3), cfg, ObstacleSet(centers=[(6.0, 0.0, 0.0)]))
        vehicle.state = UavState(np.zeros(3), np.array([0.1, 0.0, 0.0, 0.0]))
        vehicle.move_to((12.0, 0.0, 0.0))
        assert vehicle.min_clearance == pytest.approx(4.0)
