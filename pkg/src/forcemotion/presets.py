"""Built-in experiment scenarios and the tuned gains shipped with them.

Geometry is desk scale, consistent with the 2 x 0.5 m arm:

* experiment 1 - a descent path that collides with an unexpected compliant
  block; hold 10 N down while tolerating the intrusion (0 N sideways).
* experiment 2 - slide along an irregular compliant floor holding 30 N down;
  only the vertical axis is force controlled.
* experiment 3 - experiment 2 with sliding friction enabled and the friction
  drag regulated to 6 N alongside the 30 N normal force.

The gains below were produced by the shipped grid-search tuner
(`forcemotion tune`); the full leaderboards live in tuning/.
"""
from __future__ import annotations

from typing import Dict, Optional

from .control import AXES, AxisForce, CorrectionLimits, FuzzyPIGains, PIGains, SelectionMatrix
from .plant import Box, Environment, Pose, RoughSurface, SensorModel
from .sim import AxisGains, NominalPath, PressDirection, Scenario

PRESET_NAMES = ("exp1", "exp2", "exp3")

DEFAULT_SEED = 2211

# Tuner-selected gains (see tuning/ for the leaderboards).
TUNED_PI: Dict[str, PIGains] = {
    "exp1": PIGains(kp=5e-4, ki=5e-5),
    "exp2": PIGains(kp=5e-4, ki=2e-4),
    "exp3": PIGains(kp=5e-4, ki=2e-4),
}
TUNED_FUZZY: Dict[str, FuzzyPIGains] = {
    "exp1": FuzzyPIGains(kp=0.1, ki=1 / 15, kx=2e-3),
    "exp2": FuzzyPIGains(kp=0.1, ki=1 / 30, kx=2e-3),
    "exp3": FuzzyPIGains(kp=0.1, ki=1 / 30, kx=2e-3),
}


def default_gains(controller_kind: str, preset: str = "exp2") -> AxisGains:
    if controller_kind == "pi":
        return TUNED_PI[preset]
    if controller_kind == "fuzzy":
        return TUNED_FUZZY[preset]
    raise ValueError(f"unknown controller kind: {controller_kind!r}")


def _gains_for(controller_kind: str, preset: str, gains: Optional[AxisGains]) -> Dict[str, AxisGains]:
    g = gains if gains is not None else default_gains(controller_kind, preset)
    return {axis: g for axis in AXES}


def experiment1_scenario(
    controller_kind: str = "fuzzy",
    gains: Optional[AxisGains] = None,
    seed: int = DEFAULT_SEED,
) -> Scenario:
    """Collision with a foreign block: regulate 10 N down, 0 N sideways.

    The nominal path dives 10 mm into the block top, so the uncontrolled
    baseline peaks at ~100 N. The vertical correction is retract-only
    (u_max = 0): the block intrudes into free space, so pressing deeper than
    nominal is never useful and pre-contact windup is structurally excluded.
    """
    block = Box(x_min=0.55, x_max=0.75, z_min=0.10, z_max=0.30, stiffness=10_000.0)
    path = NominalPath(
        (
            (0.0, Pose(0.65, 0.33)),
            (0.8, Pose(0.65, 0.29)),
        )
    )
    return Scenario(
        name="exp1",
        controller_kind=controller_kind,
        setpoint=AxisForce(0.0, 10.0),
        path=path,
        environment=Environment((block,), seed=seed),
        gains=_gains_for(controller_kind, "exp1", gains),
        selection=SelectionMatrix.identity(),
        press_direction=PressDirection(x=1, z=-1),
        limits={
            "x": CorrectionLimits(-0.02, 0.02, 5e-4),
            "z": CorrectionLimits(-0.02, 0.0, 5e-4),
        },
        sensor=SensorModel(seed=seed + 1),
        duration=3.0,
        seed=seed,
    )


def experiment2_scenario(
    controller_kind: str = "fuzzy",
    gains: Optional[AxisGains] = None,
    seed: int = DEFAULT_SEED,
    smooth: bool = False,
) -> Scenario:
    """Sliding pass over an irregular floor: regulate 30 N down, x in motion
    control only. `smooth=True` flattens the floor for convergence tests."""
    floor = RoughSurface(
        height_base=0.25,
        roughness_amplitude=0.0 if smooth else 0.001,
        roughness_wavelength=0.05,
        noise_amplitude=0.0 if smooth else 2e-4,
        stiffness=10_000.0,
        friction_coeff=0.0,
    )
    path = NominalPath(
        (
            (0.0, Pose(0.55, 0.2475)),
            (3.0, Pose(0.75, 0.2475)),
        )
    )
    return Scenario(
        name="exp2-smooth" if smooth else "exp2",
        controller_kind=controller_kind,
        setpoint=AxisForce(0.0, 30.0),
        path=path,
        environment=Environment((floor,), seed=seed),
        gains=_gains_for(controller_kind, "exp2", gains),
        selection=SelectionMatrix(x=False, z=True),
        press_direction=PressDirection(x=1, z=-1),
        sensor=SensorModel(seed=seed + 1),
        duration=3.0,
        seed=seed,
    )


def experiment3_scenario(
    controller_kind: str = "fuzzy",
    gains: Optional[AxisGains] = None,
    seed: int = DEFAULT_SEED,
) -> Scenario:
    """Experiment-2 geometry with sliding friction: regulate 6 N along x and
    30 N along z simultaneously. The friction coefficient (0.2) makes the
    free-sliding drag sit near the 6 N set point once the normal force holds."""
    floor = RoughSurface(
        height_base=0.25,
        roughness_amplitude=0.001,
        roughness_wavelength=0.05,
        noise_amplitude=2e-4,
        stiffness=10_000.0,
        friction_coeff=0.2,
    )
    path = NominalPath(
        (
            (0.0, Pose(0.55, 0.2475)),
            (3.0, Pose(0.75, 0.2475)),
        )
    )
    return Scenario(
        name="exp3",
        controller_kind=controller_kind,
        setpoint=AxisForce(6.0, 30.0),
        path=path,
        environment=Environment((floor,), seed=seed),
        gains=_gains_for(controller_kind, "exp3", gains),
        selection=SelectionMatrix.identity(),
        press_direction=PressDirection(x=1, z=-1),
        sensor=SensorModel(seed=seed + 1),
        duration=3.0,
        seed=seed,
    )


_BUILDERS = {
    "exp1": experiment1_scenario,
    "exp2": experiment2_scenario,
    "exp3": experiment3_scenario,
}


def preset_scenario(
    name: str,
    controller_kind: str = "fuzzy",
    gains: Optional[AxisGains] = None,
    seed: int = DEFAULT_SEED,
) -> Scenario:
    """Look up a built-in experiment by name (exp1, exp2, exp3)."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return builder(controller_kind, gains, seed)
