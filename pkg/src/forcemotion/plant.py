"""Simulated world: 2-link planar arm with a first-order joint servo,
unilateral compliant obstacles, and a force sensor model.

The plane is x (horizontal) by z (vertical). Contact forces returned by the
environment act ON the tool; surfaces push the tool out along their outward
normal, friction opposes sliding. Everything is deterministic given the
configured seeds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple, Union

import numpy as np

from .control import AxisForce


class Unreachable(Exception):
    """Target pose lies outside the arm workspace annulus."""


class Pose(NamedTuple):
    x: float
    z: float


@dataclass
class PlanarArm:
    """Two revolute joints in the x-z plane; base at the origin.

    The internal motion loop is modeled as a first-order lag toward the
    commanded joint angles with a per-joint rate limit.
    """

    l1: float = 0.5
    l2: float = 0.5
    q1: float = 0.0
    q2: float = 0.0
    tau_servo: float = 0.04
    qdot_max: float = 2.0

    def __post_init__(self) -> None:
        if self.l1 <= 0.0 or self.l2 <= 0.0:
            raise ValueError("link lengths must be positive")
        if self.tau_servo <= 0.0:
            raise ValueError("tau_servo must be positive")
        if self.qdot_max <= 0.0:
            raise ValueError("qdot_max must be positive")

    def fk(self) -> Pose:
        """Tool position from the current joint angles."""
        q12 = self.q1 + self.q2
        return Pose(
            self.l1 * math.cos(self.q1) + self.l2 * math.cos(q12),
            self.l1 * math.sin(self.q1) + self.l2 * math.sin(q12),
        )

    def ik(self, target: Pose, elbow: str = "down") -> Tuple[float, float]:
        """Joint angles reaching `target`, on the requested elbow branch.

        Raises Unreachable when the target lies outside the annulus
        [|l1 - l2|, l1 + l2]. The "down" branch has q2 >= 0.
        """
        return ik(self.l1, self.l2, target, elbow)

    def jacobian(self) -> np.ndarray:
        """Analytic 2x2 Jacobian of fk, rows (dx/dq, dz/dq)."""
        s1 = math.sin(self.q1)
        c1 = math.cos(self.q1)
        s12 = math.sin(self.q1 + self.q2)
        c12 = math.cos(self.q1 + self.q2)
        return np.array(
            [
                [-self.l1 * s1 - self.l2 * s12, -self.l2 * s12],
                [self.l1 * c1 + self.l2 * c12, self.l2 * c12],
            ]
        )

    def joint_torques(self, f: AxisForce) -> Tuple[float, float]:
        """Joint torques equivalent to the Cartesian tool force: J^T f."""
        tau = self.jacobian().T @ np.array([f.x, f.z])
        return float(tau[0]), float(tau[1])

    def servo_step(self, q_des: Tuple[float, float], dt: float) -> None:
        """First-order step toward q_des, rate-limited per joint."""
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        alpha = 1.0 - math.exp(-dt / self.tau_servo)
        dq_max = self.qdot_max * dt
        dq1 = min(max(alpha * (q_des[0] - self.q1), -dq_max), dq_max)
        dq2 = min(max(alpha * (q_des[1] - self.q2), -dq_max), dq_max)
        self.q1 += dq1
        self.q2 += dq2


def fk(l1: float, l2: float, q1: float, q2: float) -> Pose:
    return Pose(
        l1 * math.cos(q1) + l2 * math.cos(q1 + q2),
        l1 * math.sin(q1) + l2 * math.sin(q1 + q2),
    )


def ik(l1: float, l2: float, target: Pose, elbow: str = "down") -> Tuple[float, float]:
    """Closed-form planar 2-link inverse kinematics."""
    if elbow not in ("down", "up"):
        raise ValueError(f"unknown elbow branch: {elbow!r}")
    r2 = target.x * target.x + target.z * target.z
    r = math.sqrt(r2)
    if r > l1 + l2 + 1e-12 or r < abs(l1 - l2) - 1e-12:
        raise Unreachable(
            f"target ({target.x:.4f}, {target.z:.4f}) outside workspace "
            f"[{abs(l1 - l2):.4f}, {l1 + l2:.4f}]"
        )
    cos_q2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    cos_q2 = min(max(cos_q2, -1.0), 1.0)
    q2 = math.acos(cos_q2)
    if elbow == "up":
        q2 = -q2
    q1 = math.atan2(target.z, target.x) - math.atan2(
        l2 * math.sin(q2), l1 + l2 * math.cos(q2)
    )
    return q1, q2


@dataclass(frozen=True)
class RoughSurface:
    """Horizontal compliant floor with a sinusoidal profile plus seeded noise.

    Height at x is height_base + roughness_amplitude*sin(2*pi*x/wavelength)
    + a band-limited noise term built from the environment seed. Penetration
    below the profile produces a Hookean normal force pushing the tool up and
    kinetic Coulomb friction opposing sliding along x.
    """

    height_base: float
    roughness_amplitude: float = 0.0
    roughness_wavelength: float = 0.05
    noise_amplitude: float = 0.0
    stiffness: float = 10_000.0
    friction_coeff: float = 0.0

    def __post_init__(self) -> None:
        if self.stiffness <= 0.0:
            raise ValueError("stiffness must be positive")
        if self.roughness_amplitude < 0.0 or self.noise_amplitude < 0.0:
            raise ValueError("amplitudes must be nonnegative")
        if self.roughness_wavelength <= 0.0:
            raise ValueError("roughness_wavelength must be positive")
        if self.friction_coeff < 0.0:
            raise ValueError("friction_coeff must be nonnegative")


@dataclass(frozen=True)
class Box:
    """Axis-aligned compliant block. A penetrating point is pushed out through
    the nearest face (shallowest penetration) with a Hookean force."""

    x_min: float
    x_max: float
    z_min: float
    z_max: float
    stiffness: float = 10_000.0

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.z_min >= self.z_max:
            raise ValueError("box extents must be ordered")
        if self.stiffness <= 0.0:
            raise ValueError("stiffness must be positive")


Obstacle = Union[RoughSurface, Box]

_NOISE_COMPONENTS = 8


class _NoiseProfile(NamedTuple):
    """Fixed sinusoid mixture; a pure, order-independent function of x."""

    freqs: Tuple[float, ...]
    phases: Tuple[float, ...]
    amplitude: float

    def height(self, x: float) -> float:
        if self.amplitude == 0.0:
            return 0.0
        total = 0.0
        for f, p in zip(self.freqs, self.phases):
            total += math.sin(2.0 * math.pi * f * x + p)
        return self.amplitude * total / _NOISE_COMPONENTS


@dataclass
class Environment:
    """Composable unilateral obstacles; deterministic given the seed."""

    obstacles: Tuple[Obstacle, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        self.obstacles = tuple(self.obstacles)
        profiles: List[_NoiseProfile] = []
        for index, obstacle in enumerate(self.obstacles):
            if isinstance(obstacle, RoughSurface) and obstacle.noise_amplitude > 0.0:
                rng = np.random.default_rng([self.seed, index])
                # Component frequencies sit at 1..4 cycles per roughness wavelength.
                wavelength = obstacle.roughness_wavelength
                profiles.append(
                    _NoiseProfile(
                        tuple(rng.uniform(1.0, 4.0, _NOISE_COMPONENTS) / wavelength),
                        tuple(rng.uniform(0.0, 2.0 * math.pi, _NOISE_COMPONENTS)),
                        obstacle.noise_amplitude,
                    )
                )
            else:
                profiles.append(_NoiseProfile((), (), 0.0))
        self._noise = tuple(profiles)

    def surface_height(self, surface_index: int, x: float) -> float:
        """Profile height of the RoughSurface at `surface_index` in obstacles."""
        surface = self.obstacles[surface_index]
        if not isinstance(surface, RoughSurface):
            raise TypeError("obstacle is not a RoughSurface")
        h = surface.height_base
        if surface.roughness_amplitude > 0.0:
            h += surface.roughness_amplitude * math.sin(
                2.0 * math.pi * x / surface.roughness_wavelength
            )
        return h + self._noise[surface_index].height(x)

    def contact_force(self, p: Pose, v: Tuple[float, float]) -> AxisForce:
        """Total contact force on the tool at pose p moving with velocity v."""
        fx = 0.0
        fz = 0.0
        for index, obstacle in enumerate(self.obstacles):
            if isinstance(obstacle, RoughSurface):
                depth = self.surface_height(index, p.x) - p.z
                if depth > 0.0:
                    fn = obstacle.stiffness * depth
                    fz += fn
                    if obstacle.friction_coeff > 0.0 and v[0] != 0.0:
                        fx -= obstacle.friction_coeff * fn * math.copysign(1.0, v[0])
            else:
                fx_box, fz_box = _box_force(obstacle, p)
                fx += fx_box
                fz += fz_box
        return AxisForce(fx, fz)


def _box_force(box: Box, p: Pose) -> Tuple[float, float]:
    """Push-out force for a point inside the box; zero outside."""
    if not (box.x_min < p.x < box.x_max and box.z_min < p.z < box.z_max):
        return 0.0, 0.0
    exits = (
        (p.x - box.x_min, (-1.0, 0.0)),
        (box.x_max - p.x, (1.0, 0.0)),
        (p.z - box.z_min, (0.0, -1.0)),
        (box.z_max - p.z, (0.0, 1.0)),
    )
    depth, normal = min(exits, key=lambda item: item[0])
    return box.stiffness * depth * normal[0], box.stiffness * depth * normal[1]


@dataclass
class SensorModel:
    """Force sensor: truth plus bias plus seeded Gaussian noise per axis."""

    noise_sigma: float = 0.0
    bias: AxisForce = AxisForce(0.0, 0.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be nonnegative")
        self.reset()

    def reset(self) -> None:
        """Rewind the noise stream to the start; runs become repeatable."""
        self._rng = np.random.default_rng(self.seed)

    def sense(self, f_true: AxisForce) -> AxisForce:
        fx = f_true.x + self.bias.x
        fz = f_true.z + self.bias.z
        if self.noise_sigma > 0.0:
            noise = self._rng.standard_normal(2)
            fx += self.noise_sigma * noise[0]
            fz += self.noise_sigma * noise[1]
        return AxisForce(fx, fz)
