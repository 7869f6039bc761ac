"""Closed-loop simulation: nominal paths, scenarios, the fixed-step hybrid
force/motion loop, performance metrics, controller comparison, and a
grid-search gain tuner.

Per tick the loop (1) interpolates the nominal pose, (2) offsets it by the
accumulated correction mapped through the press-direction signs, (3) solves
inverse kinematics, (4) steps the joint servo, (5) evaluates contact forces
at the actual pose, (6) senses them, and (7) runs the external force loop to
update the correction for the next tick.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .control import (
    AXES,
    AxisController,
    AxisForce,
    CorrectionLimits,
    FuzzyPIGains,
    HybridForceController,
    PIGains,
    SelectionMatrix,
)
from .fuzzy import FuzzyInference, RuleBase
from .plant import Environment, PlanarArm, Pose, SensorModel, Unreachable, ik

AxisGains = Union[PIGains, FuzzyPIGains]


class WorkspaceViolation(Exception):
    """The commanded pose left the arm workspace; the run was aborted."""

    def __init__(self, tick: int, t: float, cause: str):
        super().__init__(f"tick {tick} (t={t:.3f} s): {cause}")
        self.tick = tick
        self.t = t
        self.cause = cause


class NoContact(Exception):
    """The trace never registered contact on the requested axis."""


class AllRunsFailed(Exception):
    """Every tuner grid point aborted or never made contact."""


@dataclass(frozen=True)
class NominalPath:
    """Time-stamped waypoints with linear interpolation and end holding."""

    waypoints: Tuple[Tuple[float, Pose], ...]

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError("path needs at least one waypoint")
        times = [t for t, _ in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")

    def pose_at(self, t: float) -> Pose:
        points = self.waypoints
        if t <= points[0][0]:
            return points[0][1]
        for (t0, p0), (t1, p1) in zip(points, points[1:]):
            if t <= t1:
                s = (t - t0) / (t1 - t0)
                return Pose(p0.x + s * (p1.x - p0.x), p0.z + s * (p1.z - p0.z))
        return points[-1][1]


class PressDirection(NamedTuple):
    """World-frame direction (+1/-1 per axis) in which positive correction u
    presses further into the contacted surface."""

    x: int = 1
    z: int = -1


@dataclass(frozen=True)
class ArmParams:
    l1: float = 0.5
    l2: float = 0.5
    tau_servo: float = 0.04
    qdot_max: float = 2.0
    elbow: str = "down"


@dataclass
class Scenario:
    """Complete, self-contained experiment definition. Runs are a pure
    function of this object, seeds included."""

    name: str
    controller_kind: str  # "pi" | "fuzzy"
    setpoint: AxisForce
    path: NominalPath
    environment: Environment
    gains: Dict[str, AxisGains]
    selection: SelectionMatrix = SelectionMatrix.identity()
    press_direction: PressDirection = PressDirection()
    limits: Dict[str, CorrectionLimits] = field(
        default_factory=lambda: {a: CorrectionLimits() for a in AXES}
    )
    arm: ArmParams = ArmParams()
    sensor: SensorModel = field(default_factory=SensorModel)
    rules: RuleBase = field(default_factory=RuleBase.default)
    dt: float = 0.01
    duration: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.controller_kind not in ("pi", "fuzzy"):
            raise ValueError(f"unknown controller kind: {self.controller_kind!r}")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.duration < self.dt:
            raise ValueError("duration must be at least one tick")
        for axis in AXES:
            if axis not in self.gains:
                raise ValueError(f"missing gains for axis {axis}")
            if axis not in self.limits:
                raise ValueError(f"missing limits for axis {axis}")
        want = PIGains if self.controller_kind == "pi" else FuzzyPIGains
        for axis, g in self.gains.items():
            if not isinstance(g, want):
                raise ValueError(
                    f"axis {axis}: {type(g).__name__} does not match "
                    f"controller kind {self.controller_kind!r}"
                )
        reach_hi = self.arm.l1 + self.arm.l2
        reach_lo = abs(self.arm.l1 - self.arm.l2)
        for t, pose in self.path.waypoints:
            r = math.hypot(pose.x, pose.z)
            if r > reach_hi + 1e-12 or r < reach_lo - 1e-12:
                raise ValueError(f"waypoint at t={t} is unreachable: {pose}")


TRACE_COLUMNS = (
    "t",
    "f_x",
    "f_z",
    "e_x",
    "e_z",
    "du_x",
    "du_z",
    "u_x",
    "u_z",
    "nom_x",
    "nom_z",
    "act_x",
    "act_z",
    "q1",
    "q2",
    "tau1",
    "tau2",
)


@dataclass
class Trace:
    """Per-tick log. Row k holds the forces/errors seen at tick k, the
    increment computed there, and the correction u that shaped tick k's
    commanded pose (u updates take effect on the next tick)."""

    values: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.values[:, TRACE_COLUMNS.index(name)]

    def __len__(self) -> int:
        return self.values.shape[0]


def _build_controller(scenario: Scenario, axis: str, engine: FuzzyInference) -> AxisController:
    gains = scenario.gains[axis]
    if scenario.controller_kind == "pi":
        return AxisController("pi", pi_gains=gains, limits=scenario.limits[axis])
    return AxisController(
        "fuzzy", fuzzy_gains=gains, limits=scenario.limits[axis], engine=engine
    )


def run(scenario: Scenario) -> Trace:
    """Simulate the scenario tick by tick; returns the full trace.

    Raises WorkspaceViolation when a commanded pose cannot be reached.
    """
    arm_p = scenario.arm
    press = scenario.press_direction
    engine = FuzzyInference(rules=scenario.rules)
    hybrid = HybridForceController(
        {axis: _build_controller(scenario, axis, engine) for axis in AXES},
        scenario.selection,
    )
    scenario.sensor.reset()

    start = scenario.path.pose_at(0.0)
    q1, q2 = ik(arm_p.l1, arm_p.l2, start, arm_p.elbow)
    arm = PlanarArm(arm_p.l1, arm_p.l2, q1, q2, arm_p.tau_servo, arm_p.qdot_max)

    n_ticks = int(round(scenario.duration / scenario.dt)) + 1
    rows = np.empty((n_ticks, len(TRACE_COLUMNS)))
    u = (0.0, 0.0)
    prev_pose = arm.fk()

    for k in range(n_ticks):
        t = k * scenario.dt
        nominal = scenario.path.pose_at(t)
        commanded = Pose(nominal.x + press.x * u[0], nominal.z + press.z * u[1])
        try:
            q_des = ik(arm_p.l1, arm_p.l2, commanded, arm_p.elbow)
        except Unreachable as exc:
            raise WorkspaceViolation(k, t, str(exc)) from exc
        arm.servo_step(q_des, scenario.dt)
        pose = arm.fk()
        v = (
            ((pose.x - prev_pose.x) / scenario.dt, (pose.z - prev_pose.z) / scenario.dt)
            if k > 0
            else (0.0, 0.0)
        )
        f_tool = scenario.environment.contact_force(pose, v)
        sensed = scenario.sensor.sense(f_tool)
        # The controller regulates the force pressed onto the environment:
        # project the sensed tool force onto the press directions.
        measured = AxisForce(-press.x * sensed.x, -press.z * sensed.z)
        tau = arm.joint_torques(AxisForce(-f_tool.x, -f_tool.z))
        u_next, du, e = hybrid.step(scenario.setpoint, measured)
        rows[k] = (
            t,
            measured.x,
            measured.z,
            e[0],
            e[1],
            du[0],
            du[1],
            u[0],
            u[1],
            nominal.x,
            nominal.z,
            pose.x,
            pose.z,
            arm.q1,
            arm.q2,
            tau[0],
            tau[1],
        )
        u = u_next
        prev_pose = pose
    return Trace(rows)


@dataclass(frozen=True)
class Metrics:
    """Post-contact response summary for one axis."""

    overshoot_pct: float
    settling_time: Optional[float]
    settled: bool
    steady_state_rms: float
    max_force: float
    itae: float
    first_contact_time: float


def compute_metrics(
    trace: Trace,
    axis: str,
    setpoint: float,
    band_pct: float = 0.05,
    zero_band_abs: float = 1.0,
    contact_threshold: float = 0.1,
) -> Metrics:
    """Overshoot, settling, steady-state RMS, peak force, and ITAE.

    Overshoot and settling are measured from first contact (|f| above the
    contact threshold). For a zero setpoint the settling band is the absolute
    `zero_band_abs` and overshoot is the peak excess over that band,
    expressed as a percentage of it.
    """
    f = trace.column(f"f_{axis}")
    t = trace.column("t")
    in_contact = np.abs(f) > contact_threshold
    if not in_contact.any():
        raise NoContact(f"no contact on axis {axis} (threshold {contact_threshold} N)")
    first = int(np.argmax(in_contact))
    post = f[first:]

    if setpoint != 0.0:
        band = band_pct * abs(setpoint)
        overshoot = max(0.0, (float(post.max()) - setpoint) / abs(setpoint) * 100.0)
    else:
        band = zero_band_abs
        overshoot = max(0.0, (float(np.abs(post).max()) - band) / band * 100.0)

    outside = np.abs(post - setpoint) > band
    if outside.any():
        last_bad = int(np.where(outside)[0][-1])
        settle_idx = last_bad + 1
    else:
        settle_idx = 0
    settled = settle_idx < len(post)
    settling_time = float(t[first + settle_idx]) if settled else None

    tail = f[int(round(0.8 * (len(f) - 1))):]
    rms = float(np.sqrt(np.mean((tail - setpoint) ** 2)))
    dt = float(t[1] - t[0]) if len(t) > 1 else 0.0
    itae = float(np.sum(t * np.abs(setpoint - f)) * dt)
    return Metrics(
        overshoot_pct=overshoot,
        settling_time=settling_time,
        settled=settled,
        steady_state_rms=rms,
        max_force=float(np.abs(f).max()),
        itae=itae,
        first_contact_time=float(t[first]),
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side metrics for two runs of one scenario; deltas are b - a.

    Gains travel with the report so results stay auditable. No winner is
    declared: interpretation is left to the reader.
    """

    label_a: str
    label_b: str
    metrics_a: Metrics
    metrics_b: Metrics
    deltas: Dict[str, Optional[float]]
    gains_a: Dict[str, Dict[str, float]]
    gains_b: Dict[str, Dict[str, float]]


def _gains_as_dict(gains: Dict[str, AxisGains]) -> Dict[str, Dict[str, float]]:
    return {axis: dataclasses.asdict(g) for axis, g in gains.items()}


def compare(
    trace_a: Trace,
    trace_b: Trace,
    axis: str,
    setpoint: float,
    band_pct: float = 0.05,
    label_a: str = "a",
    label_b: str = "b",
    gains_a: Optional[Dict[str, AxisGains]] = None,
    gains_b: Optional[Dict[str, AxisGains]] = None,
) -> ComparisonReport:
    m_a = compute_metrics(trace_a, axis, setpoint, band_pct)
    m_b = compute_metrics(trace_b, axis, setpoint, band_pct)
    deltas: Dict[str, Optional[float]] = {}
    for name in ("overshoot_pct", "settling_time", "steady_state_rms", "max_force", "itae"):
        va = getattr(m_a, name)
        vb = getattr(m_b, name)
        deltas[name] = None if va is None or vb is None else vb - va
    return ComparisonReport(
        label_a,
        label_b,
        m_a,
        m_b,
        deltas,
        _gains_as_dict(gains_a) if gains_a else {},
        _gains_as_dict(gains_b) if gains_b else {},
    )


@dataclass(frozen=True)
class ObjectiveWeights:
    """Tuner objective J = itae + overshoot*overshoot_pct + not_settled penalty."""

    overshoot: float = 10.0
    not_settled: float = 1000.0


@dataclass(frozen=True)
class TuneEntry:
    gains: Dict[str, float]
    objective: float
    overshoot_pct: Optional[float]
    settling_time: Optional[float]
    itae: Optional[float]
    settled: bool
    failure: Optional[str]


# Fixed enumeration and tie-break order for gain names.
_GAIN_ORDER = ("kp", "ki", "kx")


def _with_gains(scenario: Scenario, names: Sequence[str], values: Sequence[float]) -> Scenario:
    kwargs = dict(zip(names, values))
    cls = PIGains if scenario.controller_kind == "pi" else FuzzyPIGains
    new_gains = {axis: cls(**kwargs) for axis in AXES}
    return dataclasses.replace(scenario, gains=new_gains)


def tune(
    scenario: Scenario,
    grid: Dict[str, Sequence[float]],
    weights: ObjectiveWeights = ObjectiveWeights(),
    axis: str = "z",
    band_pct: float = 0.05,
) -> Tuple[TuneEntry, List[TuneEntry]]:
    """Exhaustive grid search over gain combinations, smallest objective wins.

    Ties break on lower overshoot, then on the lexicographic order of the
    gain tuple, so the winner does not depend on enumeration order. Returns
    (best, leaderboard); the leaderboard carries every evaluated point.
    """
    if not grid:
        raise ValueError("empty tuner grid")
    names = [n for n in _GAIN_ORDER if n in grid]
    extra = set(grid) - set(names)
    if extra:
        raise ValueError(f"unknown gain names in grid: {sorted(extra)}")
    expected = ("kp", "ki") if scenario.controller_kind == "pi" else _GAIN_ORDER
    if tuple(names) != expected:
        raise ValueError(
            f"{scenario.controller_kind} tuner grid must define {expected}, got {names}"
        )
    setpoint = getattr(scenario.setpoint, axis)

    entries: List[TuneEntry] = []
    for combo in itertools.product(*(sorted(grid[n]) for n in names)):
        candidate = _with_gains(scenario, names, combo)
        gains_dict = dict(zip(names, (float(v) for v in combo)))
        try:
            trace = run(candidate)
            m = compute_metrics(trace, axis, setpoint, band_pct)
        except (WorkspaceViolation, NoContact) as exc:
            entries.append(
                TuneEntry(gains_dict, math.inf, None, None, None, False, str(exc))
            )
            continue
        objective = m.itae + weights.overshoot * m.overshoot_pct
        if not m.settled:
            objective += weights.not_settled
        entries.append(
            TuneEntry(
                gains_dict,
                objective,
                m.overshoot_pct,
                m.settling_time,
                m.itae,
                m.settled,
                None,
            )
        )

    def sort_key(entry: TuneEntry):
        overshoot = entry.overshoot_pct if entry.overshoot_pct is not None else math.inf
        gains_tuple = tuple(entry.gains[n] for n in names)
        return (entry.objective, overshoot, gains_tuple)

    leaderboard = sorted(entries, key=sort_key)
    best = leaderboard[0]
    if best.failure is not None:
        raise AllRunsFailed("every grid point failed to produce a scored run")
    return best, leaderboard
