"""Reservoir-mediated coupling between two qubits and the resulting entanglement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dephasing import GammaKind, dispersion_model, gamma, mode_integral
from .errors import EigenFailure, PositivityViolation
from .numerics import eig4
from .params import ReservoirConfig
from .reservoir import Branch, CouplingKind, coupling

_SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
_SERIES_SWITCH = 1e-2


def _f_over_w2(w, t):
    """(w t - sin w t) / w^2, with a Taylor series where w t is small."""
    x = w * t
    small = np.abs(x) < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    series = t * t * xs * (1.0 / 6 - xs * xs / 120 + xs**4 / 5040)
    ws = np.where(small, 1.0, w)
    return np.where(small, series, (x - np.sin(x)) / (ws * ws))


def induced_coupling(config: ReservoirConfig, branch: Branch, t: float) -> float:
    """J(t) = (2/pi) int dk (w t - sin w t) g^2 cos(2 k d) / w^2 with the single-qubit g."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if not config.trap_half_dist > 0:
        raise ValueError("trap_half_dist must be > 0")
    if t == 0:
        return 0.0
    model = dispersion_model(config)
    d = config.trap_half_dist

    def integrand(k, w):
        g = coupling(model, branch, CouplingKind.SINGLE, k, w)
        return 2.0 * _f_over_w2(w, t) * g * g * np.cos(2.0 * k * d)

    return mode_integral(config, branch, integrand, t, pair=True)


@dataclass(frozen=True)
class InducedCoupling:
    time_grid: np.ndarray
    values: np.ndarray
    branch: Branch

    def __post_init__(self):
        if self.values[0] != 0:
            raise ValueError("induced coupling must vanish at t = 0")


def induced_coupling_trajectory(config: ReservoirConfig, branch: Branch, t_max: float,
                                n_steps: int = 512) -> InducedCoupling:
    ts = np.linspace(0.0, t_max, n_steps + 1)
    return InducedCoupling(ts, np.array([induced_coupling(config, branch, t) for t in ts]), branch)


@dataclass(frozen=True)
class TwoQubitState:
    """Two-qubit density matrix in the basis |00>, |01>, |10>, |11>."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("two-qubit state must be 4x4")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValueError(f"trace {np.trace(m)} != 1")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -1e-8:
            raise PositivityViolation(f"minimum eigenvalue {lowest:.3e} < -1e-8")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def assemble_density_matrix(g0: float, g1: float, g2: float, j: float) -> TwoQubitState:
    """rho(t) for the initial state |++>, from the three exponents and J.

    Infinite exponents are allowed and give the fully dephased state.
    """
    r = np.exp(2j * j) * math.exp(-g0)
    rc = np.conj(r)
    e1, e2 = math.exp(-g1), math.exp(-g2)
    m = 0.25 * np.array([
        [1.0, r, r, e1],
        [rc, 1.0, e2, rc],
        [rc, e2, 1.0, rc],
        [e1, r, r, 1.0],
    ], dtype=complex)
    return TwoQubitState(m)


def density_matrix(config: ReservoirConfig, branch: Branch, t: float,
                   temperature: float | None = None) -> TwoQubitState:
    if t < 0:
        raise ValueError("t must be >= 0")
    g0, g1, g2 = (gamma(config, branch, kind, t, temperature) for kind in GammaKind)
    return assemble_density_matrix(g0, g1, g2, induced_coupling(config, branch, t))


@dataclass(frozen=True)
class ConcurrenceResult:
    value: float
    eigenvalues: np.ndarray  # of rho * rho_tilde, nonnegative and decreasing


def concurrence(state: TwoQubitState) -> ConcurrenceResult:
    """Wootters concurrence from the eigenvalues of rho * (sy sy) rho* (sy sy)."""
    rho = state.matrix
    flipped = _SIGMA_YY @ rho.conj() @ _SIGMA_YY
    # sqrt(rho) rho_tilde sqrt(rho) shares the spectrum of rho rho_tilde but is
    # Hermitian, so near-zero eigenvalues stay at roundoff instead of its square root
    w, v = np.linalg.eigh(rho)
    w = np.where(w <= 16 * np.finfo(float).eps * w.max(), 0.0, w)
    root = (v * np.sqrt(w)) @ v.conj().T
    lam = eig4(root @ flipped @ root)
    if np.max(np.abs(lam.imag)) > 1e-9:
        raise EigenFailure(f"complex eigenvalue of rho*rho_tilde: {lam}")
    lam = lam.real
    if lam.min() < -1e-9:
        raise EigenFailure(f"negative eigenvalue of rho*rho_tilde: {lam.min():.3e}")
    # below this floor an eigenvalue cannot be told apart from zero
    floor = 4 * np.finfo(float).eps * max(lam.max(), 0.0)
    lam = np.sort(np.where(lam <= floor, 0.0, lam))[::-1]
    roots = np.sqrt(lam)
    value = max(0.0, roots[0] - roots[1:].sum())
    return ConcurrenceResult(float(min(value, 1.0)), lam)


def concurrence_trajectory(config: ReservoirConfig, branch: Branch, t_max: float,
                           n_steps: int = 256, temperature: float | None = None) -> list:
    """[(t, C(t))] on ``linspace(0, t_max, n_steps + 1)``."""
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    ts = np.linspace(0.0, t_max, n_steps + 1)
    return [(float(t), concurrence(density_matrix(config, branch, t, temperature)).value) for t in ts]
