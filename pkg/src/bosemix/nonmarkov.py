"""Information backflow of a dephasing qubit.

For pure dephasing the optimal state pair has trace distance D(t) = exp(-Gamma(t)),
so the measure is the total increase of D over the intervals where dGamma/dt < 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .dephasing import GammaTrajectory
from .errors import GridTooCoarse

CROSSING_TOL = 1e-8
MAX_REFINE = 20


@dataclass(frozen=True)
class BackflowReport:
    measure: float
    intervals: list = field(default_factory=list)
    trace_distance: np.ndarray = field(default_factory=lambda: np.zeros(0))
    raw_measure: float = 0.0  # integral of dGamma/dt over the same intervals (<= 0)


def _quadratic_crosses(ts, rs, a, b):
    """Does the parabola through three samples vanish strictly inside (a, b)?"""
    coef = np.polyfit(np.asarray(ts) - a, rs, 2)
    if coef[0] == 0.0 and coef[1] == 0.0:
        return False
    roots = np.roots(coef)
    roots = roots[np.abs(roots.imag) <= 1e-12 * (b - a)].real
    return bool(np.any((roots > 0) & (roots < b - a)))


def _refine(ts, rs, rate):
    """Insert midpoints wherever a step may hide a pair of sign changes."""
    ts, rs = list(ts), list(rs)
    level = [0] * (len(ts) - 1)
    i = 0
    while i < len(ts) - 1:
        a, b = ts[i], ts[i + 1]
        if np.sign(rs[i]) != np.sign(rs[i + 1]):
            i += 1
            continue
        suspicious = False
        if i > 0:
            suspicious |= _quadratic_crosses(ts[i - 1:i + 2], rs[i - 1:i + 2], a, b)
        if i + 2 < len(ts):
            suspicious |= _quadratic_crosses(ts[i:i + 3], rs[i:i + 3], a, b)
        if not suspicious:
            i += 1
            continue
        if level[i] >= MAX_REFINE:
            raise GridTooCoarse(f"rate sign structure unresolved in [{a:.6g}, {b:.6g}]")
        mid = 0.5 * (a + b)
        ts.insert(i + 1, mid)
        rs.insert(i + 1, rate(mid))
        lv = level[i] + 1
        level[i:i + 1] = [lv, lv]
    return np.array(ts), np.array(rs)


def blp_measure(traj: GammaTrajectory, evaluate=None) -> BackflowReport:
    """Backflow measure N = sum over rate < 0 intervals of D(t_end) - D(t_start).

    ``evaluate(t) -> (Gamma, rate)`` recomputes the trajectory off-grid; it
    defaults to ``traj.evaluate``. Crossing times are refined to 1e-8.
    """
    evaluate = evaluate or traj.evaluate
    ts = np.asarray(traj.time_grid, dtype=float)
    gs = np.asarray(traj.gamma, dtype=float)
    rs = np.asarray(traj.rate, dtype=float)
    trace_distance = np.exp(-gs)

    def rate(t):
        return evaluate(t)[1]

    ts, rs = _refine(ts, rs, rate)
    negative = rs < 0

    intervals = []
    start = ts[0] if negative[0] else None
    for i in range(len(ts) - 1):
        if negative[i] == negative[i + 1]:
            continue
        if rs[i + 1] == 0.0 and not negative[i]:
            continue
        root = ts[i + 1] if rs[i + 1] == 0.0 else brentq(rate, ts[i], ts[i + 1], xtol=CROSSING_TOL, rtol=4 * np.finfo(float).eps)
        if negative[i + 1]:
            start = root
        else:
            intervals.append((start, root))
            start = None
    if start is not None:
        intervals.append((start, ts[-1]))

    measure = raw = 0.0
    for a, b in intervals:
        ga, gb = evaluate(a)[0], evaluate(b)[0]
        measure += np.exp(-gb) - np.exp(-ga)
        raw += gb - ga
    return BackflowReport(float(measure), intervals, trace_distance, float(raw))
