"""Mamdani fuzzy inference on a normalized universe.

Seven-label linguistic variables on [-1, 1], a 7x7 PI-type rule table,
min/max (clip and pointwise-maximum) inference, and center-of-area
defuzzification. All types are immutable after construction and all
operations are pure functions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Tuple

UNIVERSE_MIN = -1.0
UNIVERSE_MAX = 1.0

# Aggregates with less total mass than this defuzzify to 0 (no rule fired).
_EMPTY_AGGREGATE_AREA = 1e-12


class Label(enum.IntEnum):
    """Linguistic labels, ordered NL < NM < NS < ZR < PS < PM < PL."""

    NL = -3
    NM = -2
    NS = -1
    ZR = 0
    PS = 1
    PM = 2
    PL = 3

    def negate(self) -> "Label":
        """Mirror the label about ZR (NL <-> PL, NM <-> PM, ...)."""
        return Label(-self.value)


LABELS: Tuple[Label, ...] = tuple(Label)


@dataclass(frozen=True)
class MembershipFamily:
    """Triangular membership functions with saturating outer shoulders.

    Seven centers on [-1, 1], symmetric about 0. With the default layout
    (evenly spaced centers, half_width equal to the spacing) adjacent
    triangles overlap at 50% and the degrees of any point sum to 1.
    """

    centers: Tuple[float, ...] = (-1.0, -2 / 3, -1 / 3, 0.0, 1 / 3, 2 / 3, 1.0)
    half_width: float = 1 / 3

    def __post_init__(self) -> None:
        if len(self.centers) != len(LABELS):
            raise ValueError(f"expected {len(LABELS)} centers, got {len(self.centers)}")
        if any(b <= a for a, b in zip(self.centers, self.centers[1:])):
            raise ValueError("centers must be strictly increasing")
        mid = self.centers[len(LABELS) // 2]
        if mid != 0.0:
            raise ValueError(f"center of ZR must be 0, got {mid}")
        for low, high in zip(self.centers, reversed(self.centers)):
            if abs(low + high) > 1e-12:
                raise ValueError("centers must be symmetric about 0")
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")
        # Partition of unity needs even spacing matched by the half width.
        spacing = self.centers[1] - self.centers[0]
        for a, b in zip(self.centers, self.centers[1:]):
            if abs((b - a) - spacing) > 1e-12:
                raise ValueError("centers must be evenly spaced")
        if abs(self.half_width - spacing) > 1e-12:
            raise ValueError("half_width must equal the center spacing")

    def center(self, label: Label) -> float:
        return self.centers[label.value + 3]

    def membership(self, label: Label, x: float) -> float:
        """Degree of `x` in `label`: triangle, saturated beyond the end centers."""
        if label is Label.NL and x <= self.centers[0]:
            return 1.0
        if label is Label.PL and x >= self.centers[-1]:
            return 1.0
        t = 1.0 - abs(x - self.center(label)) / self.half_width
        return t if t > 0.0 else 0.0


@dataclass(frozen=True)
class FuzzySet:
    """Membership degrees per label; zero-degree labels are omitted."""

    degrees: Dict[Label, float]

    def __post_init__(self) -> None:
        for label, degree in self.degrees.items():
            if not 0.0 <= degree <= 1.0:
                raise ValueError(f"degree of {label.name} out of [0, 1]: {degree}")

    def degree(self, label: Label) -> float:
        return self.degrees.get(label, 0.0)


def fuzzify(x: float, family: MembershipFamily) -> FuzzySet:
    """Map a crisp value to membership degrees, clamping x to the universe."""
    x = min(max(x, family.centers[0]), family.centers[-1])
    degrees = {}
    for label in LABELS:
        d = family.membership(label, x)
        if d > 0.0:
            degrees[label] = d
    return FuzzySet(degrees)


# 7x7 PI-type rule table. Rows are de from PL (top) to NL (bottom), columns
# are e from NL (left) to PL (right).
_DEFAULT_TABLE = """
nl nm ns zr pm pl pl
nl nl nm zr pm pl pl
nl nl ns zr ps pl pl
nl nm ns zr ps pm pl
nl nl ns zr ps pl pl
nl nl nm zr pm pl pl
nl nl nm zr ps pm pl
"""

_ROW_ORDER = (Label.PL, Label.PM, Label.PS, Label.ZR, Label.NS, Label.NM, Label.NL)
_COL_ORDER = (Label.NL, Label.NM, Label.NS, Label.ZR, Label.PS, Label.PM, Label.PL)


@dataclass(frozen=True)
class RuleBase:
    """Complete (e_label, de_label) -> output label map."""

    table: Dict[Tuple[Label, Label], Label]

    def __post_init__(self) -> None:
        missing = [
            (e.name, de.name)
            for e in LABELS
            for de in LABELS
            if (e, de) not in self.table
        ]
        if missing:
            raise ValueError(f"rule base incomplete, missing cells: {missing}")

    def lookup(self, e_label: Label, de_label: Label) -> Label:
        return self.table[(e_label, de_label)]

    @classmethod
    def parse(cls, text: str) -> "RuleBase":
        """Parse a 7x7 grid of label names (rows: de PL..NL, columns: e NL..PL).

        Blank lines and '#' comments are ignored.
        """
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            tokens = body.split()
            if len(tokens) != len(LABELS):
                raise ValueError(
                    f"line {lineno}: expected {len(LABELS)} labels, got {len(tokens)}"
                )
            try:
                rows.append([Label[t.upper()] for t in tokens])
            except KeyError as exc:
                raise ValueError(f"line {lineno}: unknown label {exc}") from exc
        if len(rows) != len(LABELS):
            raise ValueError(f"expected {len(LABELS)} rule rows, got {len(rows)}")
        table = {}
        for de_label, row in zip(_ROW_ORDER, rows):
            for e_label, out in zip(_COL_ORDER, row):
                table[(e_label, de_label)] = out
        return cls(table)

    @classmethod
    def from_file(cls, path) -> "RuleBase":
        return cls.parse(Path(path).read_text())

    @classmethod
    def default(cls) -> "RuleBase":
        return cls.parse(_DEFAULT_TABLE)


class RuleFiring(NamedTuple):
    """One fired rule: antecedent labels, consequent label, min-AND strength."""

    e_label: Label
    de_label: Label
    out_label: Label
    strength: float


def fire_rules(e_set: FuzzySet, de_set: FuzzySet, rules: RuleBase) -> List[RuleFiring]:
    """Evaluate every rule whose antecedents both have nonzero degree."""
    firings = []
    for e_label, mu_e in e_set.degrees.items():
        for de_label, mu_de in de_set.degrees.items():
            strength = min(mu_e, mu_de)
            if strength > 0.0:
                firings.append(
                    RuleFiring(e_label, de_label, rules.lookup(e_label, de_label), strength)
                )
    return firings


@dataclass(frozen=True)
class AggregatedOutput:
    """Clipped output shapes combined by pointwise maximum.

    `clips` maps each output label to the largest firing strength that
    clipped it; labels that never fired are omitted.
    """

    family: MembershipFamily
    clips: Dict[Label, float]

    def __post_init__(self) -> None:
        for label, clip in self.clips.items():
            if not 0.0 <= clip <= 1.0:
                raise ValueError(f"clip of {label.name} out of [0, 1]: {clip}")

    def evaluate(self, x: float) -> float:
        """Pointwise value of the aggregated membership function."""
        best = 0.0
        for label, clip in self.clips.items():
            v = min(clip, self.family.membership(label, x))
            if v > best:
                best = v
        return best


def infer(
    e_set: FuzzySet,
    de_set: FuzzySet,
    rules: RuleBase,
    out_family: MembershipFamily,
) -> AggregatedOutput:
    """Mamdani inference: min-AND firing, clip implication, max aggregation."""
    clips: Dict[Label, float] = {}
    for firing in fire_rules(e_set, de_set, rules):
        prev = clips.get(firing.out_label, 0.0)
        if firing.strength > prev:
            clips[firing.out_label] = firing.strength
    return AggregatedOutput(out_family, clips)


def _shape_kinks(family: MembershipFamily, label: Label, clip: float) -> List[float]:
    """Breakpoints of one clipped shape, restricted to the universe."""
    c = family.center(label)
    w = family.half_width
    flat = w * (1.0 - clip)
    if label is Label.NL:
        kinks = [family.centers[0], c + flat, c + w]
    elif label is Label.PL:
        kinks = [c - w, c - flat, family.centers[-1]]
    else:
        kinks = [c - w, c - flat, c + flat, c + w]
    lo, hi = family.centers[0], family.centers[-1]
    return [x for x in kinks if lo <= x <= hi]


def defuzzify_coa(agg: AggregatedOutput) -> float:
    """Center of area of the aggregated set, integrated in closed form.

    The aggregate is piecewise linear (a maximum of clipped triangles and
    shoulders), so the centroid is computed exactly by splitting [-1, 1] at
    every shape kink and pairwise crossing and integrating segment by
    segment. Returns 0 when no rule fired (zero total area).
    """
    if not agg.clips:
        return 0.0
    family = agg.family
    lo, hi = family.centers[0], family.centers[-1]
    breakpoints = {lo, hi}
    for label, clip in agg.clips.items():
        breakpoints.update(_shape_kinks(family, label, clip))
    xs = sorted(breakpoints)

    area = 0.0
    moment = 0.0
    for a, b in zip(xs, xs[1:]):
        if b - a <= 1e-15:
            continue
        # Each clipped shape is linear on [a, b]; reconstruct its line.
        lines = []
        for label, clip in agg.clips.items():
            fa = min(clip, family.membership(label, a))
            fb = min(clip, family.membership(label, b))
            m = (fb - fa) / (b - a)
            lines.append((m, fa - m * a))
        # The envelope may switch lines inside the interval: split at crossings.
        cuts = {a, b}
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                mi, qi = lines[i]
                mj, qj = lines[j]
                if mi == mj:
                    continue
                x = (qj - qi) / (mi - mj)
                if a + 1e-15 < x < b - 1e-15:
                    cuts.add(x)
        for p, r in zip(sorted(cuts), sorted(cuts)[1:]):
            if r - p <= 1e-15:
                continue
            mid = 0.5 * (p + r)
            m, q = max(lines, key=lambda ln: ln[0] * mid + ln[1])
            if m * mid + q <= 0.0:
                continue
            area += 0.5 * m * (r * r - p * p) + q * (r - p)
            moment += m * (r**3 - p**3) / 3.0 + 0.5 * q * (r * r - p * p)
    if area <= _EMPTY_AGGREGATE_AREA:
        return 0.0
    return moment / area


@dataclass(frozen=True)
class FuzzyInference:
    """Bundled engine: families plus rule base, from normalized inputs to output.

    `output` runs the full fuzzify -> infer -> defuzzify pipeline on
    already-scaled inputs and returns a crisp value in [-1, 1].
    """

    input_family: MembershipFamily = MembershipFamily()
    output_family: MembershipFamily = MembershipFamily()
    rules: RuleBase = field(default_factory=RuleBase.default)

    def aggregate(self, e_norm: float, de_norm: float) -> AggregatedOutput:
        e_set = fuzzify(e_norm, self.input_family)
        de_set = fuzzify(de_norm, self.input_family)
        return infer(e_set, de_set, self.rules, self.output_family)

    def firings(self, e_norm: float, de_norm: float) -> List[RuleFiring]:
        e_set = fuzzify(e_norm, self.input_family)
        de_set = fuzzify(de_norm, self.input_family)
        return fire_rules(e_set, de_set, self.rules)

    def output(self, e_norm: float, de_norm: float) -> float:
        return defuzzify_coa(self.aggregate(e_norm, de_norm))
