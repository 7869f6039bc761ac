"""External force-control loop: error formation, incremental PI and fuzzy-PI
laws, axis selection, and correction accumulation.

Axes are decoupled: each controlled axis owns one scalar controller and one
mutable state. Positive accumulated correction u moves the end-effector in
the direction that increases penetration into the contacted surface; the
scenario maps that onto world axes via its press-direction signs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Tuple

from .fuzzy import FuzzyInference

AXES = ("x", "z")


class AxisForce(NamedTuple):
    """Planar force (or force setpoint) along the controlled x and z axes [N]."""

    x: float
    z: float


@dataclass(frozen=True)
class PIGains:
    """Incremental PI coefficients: du = kp*de + ki*e, both in [m/N]."""

    kp: float
    ki: float

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.ki < 0.0:
            raise ValueError("PI gains must be nonnegative")


@dataclass(frozen=True)
class FuzzyPIGains:
    """Fuzzy-PI scaling factors.

    ki [1/N] scales the error and kp [1/N] the error change onto the
    normalized universe before fuzzification; kx [m] scales the defuzzified
    output to a displacement increment.
    """

    kp: float
    ki: float
    kx: float

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.ki < 0.0 or self.kx < 0.0:
            raise ValueError("fuzzy-PI gains must be nonnegative")


@dataclass(frozen=True)
class CorrectionLimits:
    """Clamp limits for the accumulated correction and the per-tick increment."""

    u_min: float = -0.02
    u_max: float = 0.02
    du_max: float = 5e-4

    def __post_init__(self) -> None:
        if self.u_min > self.u_max:
            raise ValueError("u_min must not exceed u_max")
        if self.du_max < 0.0:
            raise ValueError("du_max must be nonnegative")


@dataclass
class ControllerState:
    """Mutable per-axis loop state: accumulated correction and previous error."""

    u_accum: float = 0.0
    e_prev: float = 0.0
    initialized: bool = False


class SelectionMatrix(NamedTuple):
    """Diagonal boolean decision maker: which axes receive force corrections."""

    x: bool
    z: bool

    @classmethod
    def identity(cls) -> "SelectionMatrix":
        return cls(True, True)

    @classmethod
    def none(cls) -> "SelectionMatrix":
        return cls(False, False)


def error_step(f_d: float, f_e: float, state: ControllerState) -> Tuple[float, float]:
    """Force error and its change for one axis; de is 0 on the first call."""
    e = f_d - f_e
    de = 0.0 if not state.initialized else e - state.e_prev
    state.e_prev = e
    state.initialized = True
    return e, de


def pi_step(gains: PIGains, e: float, de: float, du_max: float = float("inf")) -> float:
    """Incremental PI increment, clamped to +-du_max."""
    du = gains.kp * de + gains.ki * e
    return min(max(du, -du_max), du_max)


def fuzzy_pi_step(gains: FuzzyPIGains, e: float, de: float, engine: FuzzyInference) -> float:
    """Fuzzy-PI increment: scale, fuzzify, infer, defuzzify, scale back.

    The defuzzified output lies in [-1, 1], so |du| <= kx for any input.
    """
    return gains.kx * engine.output(gains.ki * e, gains.kp * de)


def apply_selection(s: SelectionMatrix, du_x: float, du_z: float) -> Tuple[float, float]:
    """Zero the increments of axes not selected for force control."""
    return (du_x if s.x else 0.0, du_z if s.z else 0.0)


def accumulate(state: ControllerState, du: float, u_min: float, u_max: float) -> float:
    """Add du to the accumulated correction, clamped to [u_min, u_max].

    The clamp doubles as the anti-windup mechanism.
    """
    state.u_accum = min(max(state.u_accum + du, u_min), u_max)
    return state.u_accum


@dataclass
class AxisController:
    """One scalar force controller (PI or fuzzy-PI) with its state and limits."""

    kind: str  # "pi" | "fuzzy"
    pi_gains: PIGains | None = None
    fuzzy_gains: FuzzyPIGains | None = None
    limits: CorrectionLimits = CorrectionLimits()
    engine: FuzzyInference = field(default_factory=FuzzyInference)
    state: ControllerState = field(default_factory=ControllerState)

    def __post_init__(self) -> None:
        if self.kind == "pi":
            if self.pi_gains is None:
                raise ValueError("PI controller needs pi_gains")
        elif self.kind == "fuzzy":
            if self.fuzzy_gains is None:
                raise ValueError("fuzzy controller needs fuzzy_gains")
        else:
            raise ValueError(f"unknown controller kind: {self.kind!r}")

    def increment(self, f_d: float, f_e: float) -> Tuple[float, float]:
        """Error bookkeeping plus one control-law evaluation; no accumulation.

        Returns (du, e).
        """
        e, de = error_step(f_d, f_e, self.state)
        if self.kind == "pi":
            return pi_step(self.pi_gains, e, de, self.limits.du_max), e
        return fuzzy_pi_step(self.fuzzy_gains, e, de, self.engine), e


@dataclass
class HybridForceController:
    """Per-axis controllers composed with the selection matrix.

    step() produces the accumulated Cartesian correction vector that the
    simulation adds to the nominal path point; on deselected axes the
    correction never changes.
    """

    controllers: Dict[str, AxisController]
    selection: SelectionMatrix

    def __post_init__(self) -> None:
        missing = [a for a in AXES if a not in self.controllers]
        if missing:
            raise ValueError(f"missing axis controllers: {missing}")

    def step(self, setpoint: AxisForce, measured: AxisForce) -> Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]:
        """One external-loop tick.

        Returns ((u_x, u_z), (du_x, du_z), (e_x, e_z)) where u is the
        accumulated correction after this tick.
        """
        du = {}
        e = {}
        for axis in AXES:
            ctl = self.controllers[axis]
            du[axis], e[axis] = ctl.increment(getattr(setpoint, axis), getattr(measured, axis))
        du_x, du_z = apply_selection(self.selection, du["x"], du["z"])
        u = []
        for axis, du_axis in zip(AXES, (du_x, du_z)):
            ctl = self.controllers[axis]
            u.append(accumulate(ctl.state, du_axis, ctl.limits.u_min, ctl.limits.u_max))
        return (u[0], u[1]), (du_x, du_z), (e["x"], e["z"])
