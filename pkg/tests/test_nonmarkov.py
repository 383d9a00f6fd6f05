import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosemix.dephasing import GammaKind, gamma_trajectory
from bosemix.errors import GridTooCoarse
from bosemix import nonmarkov
from bosemix.nonmarkov import blp_measure
from bosemix.params import reference_config
from bosemix.reservoir import Branch


def synthetic(gamma, rate, t_max, n=64):
    """Trajectory-like object for closed-form Gamma(t)."""
    ts = np.linspace(0, t_max, n + 1)
    traj = SimpleNamespace(time_grid=ts, gamma=gamma(ts), rate=rate(ts))
    return traj, lambda t: (float(gamma(t)), float(rate(t)))


def test_one_minus_cos():
    traj, ev = synthetic(lambda t: 1 - np.cos(t), np.sin, 2 * math.pi)
    rep = blp_measure(traj, ev)
    assert rep.measure == pytest.approx(1 - math.exp(-2), abs=1e-12)
    assert len(rep.intervals) == 1
    a, b = rep.intervals[0]
    assert a == pytest.approx(math.pi, abs=1e-8) and b == pytest.approx(2 * math.pi, abs=1e-12)
    assert rep.raw_measure == pytest.approx(-2.0, abs=1e-12)
    np.testing.assert_allclose(rep.trace_distance, np.exp(-traj.gamma))


def test_monotone_gamma_is_markovian():
    traj, ev = synthetic(lambda t: t * t, lambda t: 2 * t, 5.0)
    rep = blp_measure(traj, ev)
    assert rep.measure == 0.0 and rep.intervals == []


def test_crossings_are_refined_to_1e8():
    # rate sin(3t) on a grid that never lands on a root
    traj, ev = synthetic(lambda t: (1 - np.cos(3 * t)) / 3, lambda t: np.sin(3 * t), 7.0, n=97)
    rep = blp_measure(traj, ev)
    expected = [(math.pi / 3, 2 * math.pi / 3), (math.pi, 4 * math.pi / 3), (5 * math.pi / 3, 2 * math.pi)]
    assert len(rep.intervals) == 3
    for (a, b), (ea, eb) in zip(rep.intervals, expected):
        assert abs(a - ea) < 1e-8 and abs(b - eb) < 1e-8


def test_hidden_negative_window_is_found():
    # the rate dips below zero between two grid points without changing sign on the grid
    t0, w = 2.0 + 0.03125, 0.035  # midway between samples, narrower than the spacing
    rate = lambda t: 0.5 - np.exp(-((t - t0) / w) ** 2)  # noqa: E731
    gam = lambda t: 0.5 * t - w * math.sqrt(math.pi) / 2 * (  # noqa: E731
        np.vectorize(math.erf)((t - t0) / w) + math.erf(t0 / w))
    traj, ev = synthetic(gam, rate, 4.0)
    assert np.all(traj.rate > 0)
    rep = blp_measure(traj, ev)
    assert len(rep.intervals) == 1
    half = w * math.sqrt(math.log(2))
    a, b = rep.intervals[0]
    assert a == pytest.approx(t0 - half, abs=1e-8) and b == pytest.approx(t0 + half, abs=1e-8)
    assert rep.measure > 0


def test_refinement_depth_is_bounded(monkeypatch):
    t0, w = 2.0 + 0.03125, 0.035
    rate = lambda t: 0.5 - np.exp(-((t - t0) / w) ** 2)  # noqa: E731
    traj, ev = synthetic(lambda t: 0 * t, rate, 4.0)
    monkeypatch.setattr(nonmarkov, "MAX_REFINE", 0)
    with pytest.raises(GridTooCoarse):
        blp_measure(traj, ev)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6))
def test_extra_decreasing_segment_increases_measure(amplitudes):
    # Gamma = sum of bumps; each bump decays back and adds one interval
    def build(amps):
        centres = np.arange(1, len(amps) + 1) * 2.0

        def gam(t):
            return sum(a * np.exp(-((t - c) / 0.4) ** 2) for a, c in zip(amps, centres)) + 0.01 * t

        def rate(t):
            return sum(-2 * a * (t - c) / 0.16 * np.exp(-((t - c) / 0.4) ** 2) for a, c in zip(amps, centres)) + 0.01

        return synthetic(gam, rate, 2.0 * len(amps) + 2.0, n=400)

    fewer = blp_measure(*build(amplitudes[:-1])).measure
    more = blp_measure(*build(amplitudes)).measure
    assert more > fewer > 0


def test_reference_parameters_refinement_invariance():
    cfg = reference_config()
    coarse = blp_measure(gamma_trajectory(cfg, Branch.UPPER, GammaKind.GAMMA0, 50.0, 512))
    fine = blp_measure(gamma_trajectory(cfg, Branch.UPPER, GammaKind.GAMMA0, 50.0, 1024))
    assert fine.measure == pytest.approx(coarse.measure, rel=1e-4)
    assert 0 < coarse.measure <= 1


def test_upper_exceeds_lower_beyond_miscibility_edge():
    for r12 in (1.0, 3.0):
        cfg = reference_config(r12=r12)
        n_up, n_lo = (blp_measure(gamma_trajectory(cfg, b, GammaKind.GAMMA0, 20.0, 128)).measure
                      for b in Branch)
        assert n_up > n_lo >= 0
