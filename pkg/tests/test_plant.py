import math

import numpy as np
import pytest

from forcemotion.control import AxisForce
from forcemotion.plant import (
    Box,
    Environment,
    PlanarArm,
    Pose,
    RoughSurface,
    SensorModel,
    Unreachable,
    ik,
)

import oracles


def make_arm(q1=0.0, q2=0.0):
    return PlanarArm(l1=0.5, l2=0.5, q1=q1, q2=q2)


class TestForwardKinematics:
    def test_fully_stretched(self):
        assert make_arm(0.0, 0.0).fk() == pytest.approx((1.0, 0.0))

    def test_right_angle_elbow(self):
        assert make_arm(0.0, math.pi / 2).fk() == pytest.approx((0.5, 0.5))

    def test_vertical_stretch(self):
        assert make_arm(math.pi / 2, 0.0).fk() == pytest.approx((0.0, 1.0), abs=1e-15)


class TestInverseKinematics:
    def test_boundary_stretch(self):
        assert ik(0.5, 0.5, Pose(1.0, 0.0)) == pytest.approx((0.0, 0.0))

    def test_right_angle_case(self):
        q1, q2 = ik(0.5, 0.5, Pose(0.5, 0.5), elbow="down")
        assert (q1, q2) == pytest.approx((0.0, math.pi / 2))
        arm = make_arm(q1, q2)
        assert arm.fk() == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_unreachable(self):
        with pytest.raises(Unreachable):
            ik(0.5, 0.5, Pose(2.0, 0.0))
        with pytest.raises(Unreachable):
            ik(0.8, 0.2, Pose(0.1, 0.0))  # inside the inner annulus radius

    def test_elbow_branches_mirror(self):
        down = ik(0.5, 0.5, Pose(0.6, 0.3), elbow="down")
        up = ik(0.5, 0.5, Pose(0.6, 0.3), elbow="up")
        assert down[1] == pytest.approx(-up[1])
        for q1, q2 in (down, up):
            assert make_arm(q1, q2).fk() == pytest.approx((0.6, 0.3), abs=1e-12)

    def test_round_trip_on_random_reachable_targets(self):
        rng = np.random.default_rng(314)
        for _ in range(1000):
            radius = rng.uniform(0.05, 0.999)
            angle = rng.uniform(-math.pi, math.pi)
            target = Pose(radius * math.cos(angle), radius * math.sin(angle))
            elbow = "down" if rng.random() < 0.5 else "up"
            q1, q2 = ik(0.5, 0.5, target, elbow)
            pose = make_arm(q1, q2).fk()
            assert math.hypot(pose.x - target.x, pose.z - target.z) <= 1e-9


class TestJacobian:
    def test_stretched_configuration(self):
        jac = make_arm(0.0, 0.0).jacobian()
        fd = oracles.finite_difference_jacobian(
            lambda q1, q2: make_arm(q1, q2).fk(), 0.0, 0.0
        )
        assert np.abs(jac - fd).max() <= 1e-6
        assert jac == pytest.approx(np.array([[0.0, 0.0], [1.0, 0.5]]), abs=1e-12)

    def test_vertical_configuration(self):
        jac = make_arm(math.pi / 2, 0.0).jacobian()
        assert jac == pytest.approx(np.array([[-1.0, -0.5], [0.0, 0.0]]), abs=1e-12)

    def test_matches_finite_differences_on_random_configurations(self):
        rng = np.random.default_rng(1618)
        for _ in range(100):
            q1, q2 = rng.uniform(-math.pi, math.pi, size=2)
            jac = make_arm(q1, q2).jacobian()
            fd = oracles.finite_difference_jacobian(
                lambda a, b: make_arm(a, b).fk(), q1, q2
            )
            assert np.abs(jac - fd).max() <= 1e-6

    def test_second_column_is_link2_contribution(self):
        rng = np.random.default_rng(2718)
        for _ in range(20):
            q1, q2 = rng.uniform(-math.pi, math.pi, size=2)
            jac = make_arm(q1, q2).jacobian()
            q12 = q1 + q2
            assert jac[:, 1] == pytest.approx(
                [-0.5 * math.sin(q12), 0.5 * math.cos(q12)], abs=1e-12
            )


class TestJointTorques:
    def test_zero_force(self):
        assert make_arm().joint_torques(AxisForce(0.0, 0.0)) == (0.0, 0.0)

    def test_downward_force_at_stretch(self):
        # tau = J^T f with the finite-difference-verified Jacobian.
        tau = make_arm(0.0, 0.0).joint_torques(AxisForce(0.0, -10.0))
        assert tau == pytest.approx((-10.0, -5.0))

    def test_doubling_force_doubles_torque_exactly(self):
        arm = make_arm(0.7, -1.1)
        f = AxisForce(3.3, -7.7)
        tau = arm.joint_torques(f)
        doubled = arm.joint_torques(AxisForce(2 * f.x, 2 * f.z))
        assert doubled == (2 * tau[0], 2 * tau[1])

    def test_linearity_random_combination(self):
        arm = make_arm(0.3, 0.9)
        fa, fb = AxisForce(1.2, -0.4), AxisForce(-2.0, 5.5)
        combined = arm.joint_torques(AxisForce(fa.x + fb.x, fa.z + fb.z))
        parts = np.array(arm.joint_torques(fa)) + np.array(arm.joint_torques(fb))
        assert combined == pytest.approx(tuple(parts), abs=1e-12)


class TestServo:
    def test_fixed_point(self):
        arm = make_arm(0.3, -0.2)
        arm.servo_step((0.3, -0.2), dt=0.01)
        assert (arm.q1, arm.q2) == (0.3, -0.2)

    def test_small_time_constant_snaps_within_rate_limit(self):
        arm = PlanarArm(q1=0.0, q2=0.0, tau_servo=1e-9, qdot_max=1000.0)
        arm.servo_step((0.5, -0.4), dt=0.01)
        assert (arm.q1, arm.q2) == pytest.approx((0.5, -0.4), abs=1e-9)

    def test_first_order_response(self):
        # One step of length tau covers 1 - exp(-1) of the remaining distance.
        arm = PlanarArm(q1=0.0, q2=0.0, tau_servo=0.04, qdot_max=1000.0)
        arm.servo_step((1.0, 0.0), dt=0.04)
        assert arm.q1 == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)

    def test_rate_limit(self):
        arm = PlanarArm(q1=0.0, q2=0.0, tau_servo=1e-9, qdot_max=2.0)
        arm.servo_step((1.0, -1.0), dt=0.01)
        assert (arm.q1, arm.q2) == pytest.approx((0.02, -0.02))

    def test_distance_non_increasing(self):
        arm = PlanarArm(q1=-1.0, q2=1.2, tau_servo=0.04, qdot_max=2.0)
        target = (0.8, -0.5)
        previous = math.inf
        for _ in range(200):
            arm.servo_step(target, dt=0.01)
            distance = math.hypot(arm.q1 - target[0], arm.q2 - target[1])
            assert distance <= previous + 1e-15
            previous = distance
        assert previous < 1e-6


class TestContact:
    def flat_floor(self, friction=0.0):
        surface = RoughSurface(height_base=0.2, stiffness=10_000.0, friction_coeff=friction)
        return Environment((surface,), seed=5)

    def test_no_contact_above_obstacles(self):
        env = self.flat_floor()
        assert env.contact_force(Pose(0.5, 0.25), (0.1, 0.0)) == (0.0, 0.0)

    def test_hooke_normal_force(self):
        env = self.flat_floor()
        f = env.contact_force(Pose(0.5, 0.199), (0.0, 0.0))
        assert f.z == pytest.approx(10.0)
        assert f.x == 0.0

    def test_coulomb_friction_opposes_sliding(self):
        env = self.flat_floor(friction=0.2)
        f = env.contact_force(Pose(0.5, 0.199), (0.1, 0.0))
        assert f == pytest.approx((-2.0, 10.0))
        f_back = env.contact_force(Pose(0.5, 0.199), (-0.1, 0.0))
        assert f_back == pytest.approx((2.0, 10.0))

    def test_unilateral(self):
        env = self.flat_floor()
        for z in np.linspace(0.1, 0.4, 61):
            f = env.contact_force(Pose(0.5, float(z)), (0.0, 0.0))
            assert f.z >= 0.0
            if z >= 0.2:
                assert f.z == 0.0

    def test_linear_in_penetration(self):
        env = self.flat_floor()
        depths = np.linspace(1e-4, 5e-3, 20)
        forces = [env.contact_force(Pose(0.5, 0.2 - d), (0.0, 0.0)).z for d in depths]
        assert forces == pytest.approx(list(10_000.0 * depths))

    def test_box_top_face(self):
        env = Environment((Box(0.4, 0.6, 0.0, 0.3, stiffness=10_000.0),), seed=0)
        f = env.contact_force(Pose(0.5, 0.299), (0.0, 0.0))
        assert f == pytest.approx((0.0, 10.0))

    def test_box_side_face_dominates_when_shallower(self):
        env = Environment((Box(0.4, 0.6, 0.0, 0.3, stiffness=10_000.0),), seed=0)
        f = env.contact_force(Pose(0.401, 0.15), (0.0, 0.0))
        assert f == pytest.approx((-10.0, 0.0))

    def test_box_outside(self):
        env = Environment((Box(0.4, 0.6, 0.0, 0.3),), seed=0)
        assert env.contact_force(Pose(0.7, 0.2), (0.0, 0.0)) == (0.0, 0.0)

    def test_obstacle_contributions_sum(self):
        env = Environment(
            (
                RoughSurface(height_base=0.2, stiffness=10_000.0),
                RoughSurface(height_base=0.2005, stiffness=10_000.0),
            ),
            seed=0,
        )
        f = env.contact_force(Pose(0.5, 0.199), (0.0, 0.0))
        assert f.z == pytest.approx(10.0 + 15.0)

    def test_rough_profile_deterministic_per_seed(self):
        surface = RoughSurface(
            height_base=0.25,
            roughness_amplitude=1e-3,
            roughness_wavelength=0.05,
            noise_amplitude=2e-4,
        )
        env_a = Environment((surface,), seed=42)
        env_b = Environment((surface,), seed=42)
        env_c = Environment((surface,), seed=43)
        xs = np.linspace(0.4, 0.8, 100)
        heights_a = [env_a.surface_height(0, float(x)) for x in xs]
        heights_b = [env_b.surface_height(0, float(x)) for x in xs]
        heights_c = [env_c.surface_height(0, float(x)) for x in xs]
        assert heights_a == heights_b
        assert heights_a != heights_c

    def test_noise_bounded_by_amplitude(self):
        surface = RoughSurface(
            height_base=0.25, noise_amplitude=2e-4, roughness_wavelength=0.05
        )
        env = Environment((surface,), seed=7)
        for x in np.linspace(0.0, 1.0, 500):
            assert abs(env.surface_height(0, float(x)) - 0.25) <= 2e-4 + 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            RoughSurface(height_base=0.2, stiffness=0.0)
        with pytest.raises(ValueError):
            Box(0.5, 0.4, 0.0, 0.3)


class TestSensor:
    def test_identity_without_noise(self):
        sensor = SensorModel()
        assert sensor.sense(AxisForce(3.0, 7.0)) == (3.0, 7.0)

    def test_pure_bias(self):
        sensor = SensorModel(bias=AxisForce(1.0, 0.0))
        assert sensor.sense(AxisForce(0.0, 0.0)) == (1.0, 0.0)

    def test_deterministic_stream(self):
        a = SensorModel(noise_sigma=0.5, seed=9)
        b = SensorModel(noise_sigma=0.5, seed=9)
        seq_a = [a.sense(AxisForce(1.0, 2.0)) for _ in range(10)]
        seq_b = [b.sense(AxisForce(1.0, 2.0)) for _ in range(10)]
        assert seq_a == seq_b
        a.reset()
        assert [a.sense(AxisForce(1.0, 2.0)) for _ in range(10)] == seq_a
