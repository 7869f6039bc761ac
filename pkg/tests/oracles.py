"""Independent reference implementations used to derive expected test values.

These deliberately avoid the production code paths: membership shapes are
rebuilt from np.interp, the defuzzifier is a brute-force midpoint Riemann
sum, and the incremental PI law is unrolled in closed form.
"""
from __future__ import annotations

import numpy as np

# Default family geometry, restated independently of the package.
CENTERS = np.array([-1.0, -2 / 3, -1 / 3, 0.0, 1 / 3, 2 / 3, 1.0])
HALF_WIDTH = 1 / 3
LABEL_NAMES = ("NL", "NM", "NS", "ZR", "PS", "PM", "PL")


def membership_grid(label_index: int, xs: np.ndarray) -> np.ndarray:
    """Triangle (or saturated shoulder) membership evaluated with np.interp."""
    c = CENTERS[label_index]
    if label_index == 0:
        xp = [c, c + HALF_WIDTH]
        fp = [1.0, 0.0]
        return np.interp(xs, xp, fp, left=1.0, right=0.0)
    if label_index == len(CENTERS) - 1:
        xp = [c - HALF_WIDTH, c]
        fp = [0.0, 1.0]
        return np.interp(xs, xp, fp, left=0.0, right=1.0)
    xp = [c - HALF_WIDTH, c, c + HALF_WIDTH]
    fp = [0.0, 1.0, 0.0]
    return np.interp(xs, xp, fp, left=0.0, right=0.0)


def fuzzify_reference(x: float) -> dict:
    """Degrees of a clamped crisp value in every label, via the interp shapes."""
    xc = min(max(x, -1.0), 1.0)
    point = np.array([xc])
    return {
        name: float(membership_grid(i, point)[0])
        for i, name in enumerate(LABEL_NAMES)
    }


def riemann_coa(clips: dict, n: int = 10**6) -> float:
    """Midpoint Riemann-sum center of area of max-aggregated clipped shapes.

    `clips` maps label index (0..6) to clip height.
    """
    h = 2.0 / n
    xs = -1.0 + (np.arange(n) + 0.5) * h
    mu = np.zeros_like(xs)
    for label_index, clip in clips.items():
        mu = np.maximum(mu, np.minimum(clip, membership_grid(label_index, xs)))
    total = mu.sum()
    if total == 0.0:
        return 0.0
    return float((mu * xs).sum() / total)


def pi_closed_form(kp: float, ki: float, errors: np.ndarray, u0: float = 0.0) -> np.ndarray:
    """Discretized PI position form: u_k = kp*e_k + ki*sum(e_1..e_k) + (u0 - kp*e_1).

    Matches the incremental law when the first error change is defined as 0
    (previous error initialized to the first error).
    """
    cumulative = np.cumsum(errors)
    return kp * errors + ki * cumulative + (u0 - kp * errors[0])


def finite_difference_jacobian(fk, q1: float, q2: float, step: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of a pose function fk(q1, q2) -> (x, z)."""
    jac = np.zeros((2, 2))
    for j, (d1, d2) in enumerate(((step, 0.0), (0.0, step))):
        plus = fk(q1 + d1, q2 + d2)
        minus = fk(q1 - d1, q2 - d2)
        jac[0, j] = (plus[0] - minus[0]) / (2 * step)
        jac[1, j] = (plus[1] - minus[1]) / (2 * step)
    return jac
