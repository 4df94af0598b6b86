"""Exact wet-bed dam-break (Stoker) solution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DamBreakProblem:
    h_l: float
    h_r: float
    g: float = 9.81
    x0: float = 0.0

    def __post_init__(self):
        if not (self.h_l >= self.h_r > 0):
            raise ValueError(f"need h_l >= h_r > 0, got h_l={self.h_l}, h_r={self.h_r}")
        if not self.g > 0:
            raise ValueError("g must be positive")


def rarefaction_velocity(prob, h_m):
    return 2.0 * (np.sqrt(prob.g * prob.h_l) - np.sqrt(prob.g * h_m))


def shock_velocity(prob, h_m):
    return (h_m - prob.h_r) * np.sqrt(prob.g * (h_m + prob.h_r) / (2.0 * h_m * prob.h_r))


def middle_state(prob: DamBreakProblem, tol=1e-12):
    """Depth and velocity between the rarefaction and the shock.

    Bisection on the difference of the two velocity relations, which is
    decreasing in ``h_m`` and changes sign on ``[h_r, h_l]``.
    """
    if prob.h_l == prob.h_r:
        return float(prob.h_l), 0.0

    def f(h):
        return rarefaction_velocity(prob, h) - shock_velocity(prob, h)

    lo, hi = prob.h_r, prob.h_l
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            lo = hi = mid
            break
        if fm > 0:
            lo = mid
        else:
            hi = mid
    h_m = 0.5 * (lo + hi)
    return float(h_m), float(rarefaction_velocity(prob, h_m))


def shock_speed(prob: DamBreakProblem):
    h_m, u_m = middle_state(prob)
    if h_m == prob.h_r:
        return float(np.sqrt(prob.g * prob.h_r))
    return h_m * u_m / (h_m - prob.h_r)


def sample(prob: DamBreakProblem, x, t):
    """(h, u) at positions ``x`` (scalar or array) and time ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    x = np.asarray(x, dtype=float)
    if t == 0:
        h = np.where(x < prob.x0, prob.h_l, prob.h_r)
        return h, np.zeros_like(h)
    h_m, u_m = middle_state(prob)
    s = shock_speed(prob)
    cl = np.sqrt(prob.g * prob.h_l)
    cm = np.sqrt(prob.g * h_m)
    xi = (x - prob.x0) / t
    with np.errstate(over="ignore", invalid="ignore"):
        fan_h = (2.0 * cl - xi) ** 2 / (9.0 * prob.g)
        fan_u = 2.0 / 3.0 * (xi + cl)
    tail = u_m - cm
    h = np.select([xi < -cl, xi < tail, xi < s], [prob.h_l, fan_h, h_m], prob.h_r)
    u = np.select([xi < -cl, xi < tail, xi < s], [0.0, fan_u, u_m], 0.0)
    return h, u
