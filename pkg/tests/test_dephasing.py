import math

import numpy as np
import pytest

from bosemix.dephasing import GammaKind, GammaTrajectory, decay_rate, gamma, gamma_trajectory, plateau
from bosemix.numerics import fit_loglog
from bosemix.params import reference_config
from bosemix.reservoir import Branch


def trapezoid_gamma(cfg, branch, t, kind=GammaKind.GAMMA0, nodes=10**6):
    """Brute-force oracle written from the closed forms, independent of the library."""
    a = 0.5 * cfg.alpha * (1 + branch.sign * cfg.r12)
    k_max = 12.0 / cfg.p
    e_shift = None
    if a >= 0:
        k = np.linspace(1e-8, k_max, nodes)
        x, jac = k, 1.0
    else:  # u = sqrt(k - k_th) removes the threshold singularity
        k_th = math.sqrt(-4 * a)
        u = np.linspace(0.0, math.sqrt(k_max - k_th), nodes)
        u[0] = 1e-12  # the integrand is finite at the threshold
        k = k_th + u * u
        x, jac = u, 2 * u
        e_shift = 0.5 * u * u * (2 * k_th + u * u)  # E + 2a without cancellation
    e = 0.5 * k * k
    w = np.sqrt(e * (e + 2 * a)) if e_shift is None else np.sqrt(e * e_shift)
    g = cfg.coupling_prefactor * np.sqrt(e / w) * np.exp(-((k * cfg.p / 2) ** 2)) * np.sin(k * cfg.well_half_sep)
    if kind is GammaKind.GAMMA1:
        g = g * 2 * np.cos(k * cfg.trap_half_dist)
    f = jac * 2 * g * g / (w * w) * np.sin(w * t / 2) ** 2
    return np.trapezoid(f, x) / math.pi


@pytest.mark.parametrize("t", [0.5, 2.0, 4.0, 10.0, 20.0])
def test_gamma_matches_trapezoid_oracle(t):
    cfg = reference_config()
    for b in Branch:
        assert gamma(cfg, b, GammaKind.GAMMA0, t) == pytest.approx(trapezoid_gamma(cfg, b, t), rel=1e-6)
    hi = reference_config(r12=3.0)
    assert gamma(hi, Branch.LOWER, GammaKind.GAMMA0, t) == pytest.approx(trapezoid_gamma(hi, Branch.LOWER, t), rel=1e-6)
    assert gamma(cfg, Branch.UPPER, GammaKind.GAMMA1, t) == pytest.approx(
        trapezoid_gamma(cfg, Branch.UPPER, t, GammaKind.GAMMA1), rel=1e-6)


def test_zero_time():
    cfg = reference_config()
    for kind in GammaKind:
        assert gamma(cfg, Branch.UPPER, kind, 0.0) == 0.0
        assert decay_rate(cfg, Branch.LOWER, kind, 0.0) == 0.0
    with pytest.raises(ValueError):
        gamma(cfg, Branch.UPPER, GammaKind.GAMMA0, -1.0)


@pytest.mark.parametrize("t", [1.0, 5.0, 10.0])
@pytest.mark.parametrize("branch", list(Branch))
def test_rate_matches_finite_difference(t, branch):
    cfg = reference_config()
    h = 1e-4
    fd = (gamma(cfg, branch, GammaKind.GAMMA0, t + h) - gamma(cfg, branch, GammaKind.GAMMA0, t - h)) / (2 * h)
    assert decay_rate(cfg, branch, GammaKind.GAMMA0, t) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("convention,factor", [("coherent_sum", 4.0), ("as_printed", 1.0)])
@pytest.mark.parametrize("r12", [0.0, 0.6, 3.0])
def test_pair_sum_rule(convention, factor, r12):
    cfg = reference_config(r12=r12, convention=convention)
    for b in Branch:
        for t in (0.3, 3.0, 17.0):
            g0, g1, g2 = (gamma(cfg, b, k, t) for k in GammaKind)
            assert g1 + g2 == pytest.approx(factor * g0, rel=1e-8)


def test_branch_degeneracy_at_r12_zero():
    cfg = reference_config(r12=0.0)
    for kind in GammaKind:
        for t in (0.7, 6.0):
            assert gamma(cfg, Branch.UPPER, kind, t) == gamma(cfg, Branch.LOWER, kind, t)


def test_temperature_increases_decoherence():
    cfg = reference_config()
    for b in Branch:
        values = [gamma(cfg, b, GammaKind.GAMMA0, 8.0, temperature=T) for T in (0.0, 0.1, 0.5, 2.0)]
        assert all(x < y for x, y in zip(values, values[1:]))


def test_temperature_from_config_and_override():
    hot = reference_config(temperature=0.5)
    assert gamma(hot, Branch.UPPER, GammaKind.GAMMA0, 8.0) == gamma(
        reference_config(), Branch.UPPER, GammaKind.GAMMA0, 8.0, temperature=0.5)
    with pytest.raises(ValueError):
        gamma(hot, Branch.UPPER, GammaKind.GAMMA0, 1.0, temperature=-0.1)


def test_short_time_quadratic():
    cfg = reference_config()
    t = np.geomspace(1e-3, 1e-2, 12)
    for b in Branch:
        g = [gamma(cfg, b, GammaKind.GAMMA0, x) for x in t]
        assert fit_loglog(t, g).slope == pytest.approx(2.0, abs=0.02)


def test_large_separation_limit():
    cfg = reference_config(trap_half_dist=100 * 0.75)
    ts = np.linspace(10, 20, 21)
    for b in Branch:
        g0 = np.array([gamma(cfg, b, GammaKind.GAMMA0, t) for t in ts])
        for kind in (GammaKind.GAMMA1, GammaKind.GAMMA2):
            ratio = np.mean([gamma(cfg, b, kind, t) for t in ts] / g0)
            assert 1.8 <= ratio <= 2.2


def test_saturation():
    cfg = reference_config()
    for b in Branch:
        assert plateau(cfg, b) == pytest.approx(gamma(cfg, b, GammaKind.GAMMA0, 100.0), rel=0.02)


def test_threshold_branch_grows_without_bound():
    cfg = reference_config(r12=3.0)
    g = [gamma(cfg, Branch.LOWER, GammaKind.GAMMA0, t) for t in (10.0, 20.0, 40.0)]
    assert g[0] < g[1] < g[2]
    assert decay_rate(cfg, Branch.LOWER, GammaKind.GAMMA0, 40.0) > 0


def test_pair_rates_go_negative_at_short_separation():
    # at r12 >= 1 only the upper branch keeps its negative windows
    cases = [(r12, b) for r12 in (0.2, 0.9) for b in Branch] + [(1.0, Branch.UPPER), (3.0, Branch.UPPER)]
    for r12, b in cases:
        cfg = reference_config(r12=r12)
        for kind in (GammaKind.GAMMA1, GammaKind.GAMMA2):
            rates = [decay_rate(cfg, b, kind, t) for t in np.linspace(0.05, 20, 400)]
            assert min(rates) < 0, (r12, b, kind)


def test_trajectory_shape_and_refinement():
    cfg = reference_config()
    coarse = gamma_trajectory(cfg, Branch.UPPER, GammaKind.GAMMA0, 20.0, n_steps=64)
    assert coarse.time_grid.size == 65 and coarse.gamma[0] == 0 and coarse.rate[0] == 0
    fine = gamma_trajectory(cfg, Branch.UPPER, GammaKind.GAMMA0, 20.0, n_steps=128)
    np.testing.assert_array_equal(fine.gamma[::2], coarse.gamma)
    np.testing.assert_array_equal(fine.rate[::2], coarse.rate)
    with pytest.raises(ValueError):
        gamma_trajectory(cfg, Branch.UPPER, GammaKind.GAMMA0, 20.0, n_steps=32)


def test_trajectory_invariants():
    cfg = reference_config()
    t = np.linspace(0, 1, 5)
    with pytest.raises(ValueError):
        GammaTrajectory(t, np.ones(5), np.zeros(5), Branch.UPPER, GammaKind.GAMMA0, cfg)
    with pytest.raises(ValueError):
        GammaTrajectory(t[::-1], np.zeros(5), np.zeros(5), Branch.UPPER, GammaKind.GAMMA0, cfg)
