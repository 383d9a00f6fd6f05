"""Decoherence exponents of one and two qubits and their time derivatives.

In the continuum limit every mode sum becomes (1/pi) * integral dk over
[0, k_max]; the condensate length cancels against |g|^2 ~ 1/ell.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .numerics import QuadratureSpec, integrate
from .params import ReservoirConfig
from .reservoir import Branch, CouplingKind, DispersionModel, coupling

K_MIN = 1e-8
PLATEAU_TIME = 50.0


class GammaKind(enum.Enum):
    GAMMA0 = CouplingKind.SINGLE      # one qubit, or one flipped qubit of a pair
    GAMMA1 = CouplingKind.PAIR_SUM    # <00|rho|11>
    GAMMA2 = CouplingKind.PAIR_DIFF   # <01|rho|10>

    @property
    def coupling_kind(self) -> CouplingKind:
        return self.value

    @property
    def label(self) -> str:
        return self.name.lower()


@functools.lru_cache(maxsize=128)
def dispersion_model(config: ReservoirConfig) -> DispersionModel:
    return DispersionModel(config)


def thermal_factor(omega, temperature: float):
    """coth(omega / 2T), identically 1 at T = 0."""
    if temperature == 0:
        return 1.0
    return 1.0 / np.tanh(omega / (2.0 * temperature))


def mode_integral(config: ReservoirConfig, branch: Branch, integrand, t: float,
                  pair: bool, rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> float:
    """(1/pi) * integral of ``integrand(k, eps)`` over the real modes of ``branch``.

    Panels follow the fastest of the time, well-separation and trap-separation
    oscillations. Lower branches with a threshold (r12 > 1) are integrated in
    u = sqrt(k - k_th), which removes the 1/sqrt singularity at the threshold.
    """
    model = dispersion_model(config)
    # upper-branch speed for both branches keeps r12 = 0 panelling identical
    c_eff = math.sqrt(0.5 * config.alpha * (1.0 + abs(config.r12)))
    lengths = [c_eff * t, config.well_half_sep, 1.0]
    if pair:
        lengths.append(2.0 * config.trap_half_dist)
    scale = math.pi / max(lengths)
    k_th = model.threshold(branch)
    if k_th == 0.0:
        spec = QuadratureSpec(k_max=model.k_max, oscillation_scale=scale, k_min=K_MIN,
                              rel_tol=rel_tol, abs_tol=abs_tol)
        value = integrate(lambda k: integrand(k, model.energy(branch, k)), spec).value
    else:
        u_max = math.sqrt(model.k_max - k_th)

        def in_u(u):
            k, w = model.energy_above_threshold(branch, u)
            return 2.0 * u * integrand(k, w)

        spec = QuadratureSpec(k_max=u_max, oscillation_scale=scale / (2.0 * u_max), k_min=0.0,
                              rel_tol=rel_tol, abs_tol=abs_tol)
        value = integrate(in_u, spec).value
    return value / math.pi


def _resolve(config, kind, temperature):
    kind = GammaKind(kind) if not isinstance(kind, GammaKind) else kind
    temperature = config.temperature if temperature is None else float(temperature)
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    return kind, temperature


def gamma(config: ReservoirConfig, branch: Branch, kind: GammaKind, t: float,
          temperature: float | None = None) -> float:
    """Decoherence exponent Gamma(t) for one branch.

    Gamma = (1/pi) int dk 2 g^2 / w^2 sin^2(w t / 2) coth(w / 2T).
    ``temperature`` overrides ``config.temperature`` when given.
    """
    kind, temperature = _resolve(config, kind, temperature)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    model = dispersion_model(config)
    ckind = kind.coupling_kind

    def integrand(k, w):
        g = coupling(model, branch, ckind, k, w)
        return 2.0 * g * g / (w * w) * np.sin(0.5 * w * t) ** 2 * thermal_factor(w, temperature)

    return mode_integral(config, branch, integrand, t, pair=ckind is not CouplingKind.SINGLE)


def decay_rate(config: ReservoirConfig, branch: Branch, kind: GammaKind, t: float,
               temperature: float | None = None) -> float:
    """Analytic dGamma/dt = (1/pi) int dk g^2 / w sin(w t) coth(w / 2T)."""
    kind, temperature = _resolve(config, kind, temperature)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    model = dispersion_model(config)
    ckind = kind.coupling_kind

    def integrand(k, w):
        g = coupling(model, branch, ckind, k, w)
        return g * g / w * np.sin(w * t) * thermal_factor(w, temperature)

    return mode_integral(config, branch, integrand, t, pair=ckind is not CouplingKind.SINGLE)


@dataclass(frozen=True)
class GammaTrajectory:
    time_grid: np.ndarray
    gamma: np.ndarray
    rate: np.ndarray
    branch: Branch
    kind: GammaKind
    config: ReservoirConfig
    temperature: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.time_grid, dtype=float)
        if t[0] != 0 or np.any(np.diff(t) <= 0):
            raise ValueError("time grid must start at 0 and increase strictly")
        if self.gamma[0] != 0 or self.rate[0] != 0:
            raise ValueError("trajectory must start from Gamma = dGamma/dt = 0")
        if np.any(np.asarray(self.gamma) < 0):
            raise ValueError("negative decoherence exponent")

    def evaluate(self, t: float) -> tuple[float, float]:
        """Recompute (Gamma, rate) at an arbitrary time for the same scenario."""
        return (gamma(self.config, self.branch, self.kind, t, self.temperature),
                decay_rate(self.config, self.branch, self.kind, t, self.temperature))


def gamma_trajectory(config: ReservoirConfig, branch: Branch, kind: GammaKind, t_max: float,
                     n_steps: int = 512, temperature: float | None = None) -> GammaTrajectory:
    """Gamma and its rate on the uniform grid ``linspace(0, t_max, n_steps + 1)``."""
    kind, temperature = _resolve(config, kind, temperature)
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if n_steps < 64:
        raise ValueError("n_steps must be >= 64")
    ts = np.linspace(0.0, t_max, n_steps + 1)
    g = np.array([gamma(config, branch, kind, t, temperature) for t in ts])
    r = np.array([decay_rate(config, branch, kind, t, temperature) for t in ts])
    return GammaTrajectory(ts, g, r, branch, kind, config, temperature)


def plateau(config: ReservoirConfig, branch: Branch, kind: GammaKind = GammaKind.GAMMA0,
            t_max: float = PLATEAU_TIME, temperature: float | None = None) -> float:
    """Long-time value of Gamma, reported as Gamma(t_max)."""
    return gamma(config, branch, kind, t_max, temperature)
