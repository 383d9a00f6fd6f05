"""Bogoliubov branches of the symmetric mixture, impurity couplings and
spectral densities.

The symmetric mixture has eps_pm(k)^2 = E^2 + alpha (1 +- r12) E with
E = k^2 / 2 in oscillator units. The impurity coupling carries a Gaussian
envelope exp(-(k p / 2)^2); tabulations stop at ``k_max = 12 / p`` where the
squared envelope has fallen below exp(-36).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit, OutOfRange
from .numerics import bisect_increasing, fit_loglog
from .params import ReservoirConfig

OHMIC_TAU = 0.1
_TABLE_KNOTS = 256


class Branch(enum.Enum):
    UPPER = 1   # density branch
    LOWER = -1  # spin branch

    @property
    def sign(self) -> int:
        return self.value

    @property
    def symbol(self) -> str:
        return "+" if self is Branch.UPPER else "-"

    @property
    def label(self) -> str:
        return self.name.lower()


class CouplingKind(enum.Enum):
    SINGLE = "single"
    PAIR_SUM = "pair_sum"    # |00> vs |11> coherence of two qubits
    PAIR_DIFF = "pair_diff"  # |01> vs |10> coherence of two qubits


def k_cutoff(p: float) -> float:
    return 12.0 / p


def bogoliubov_two_component(k, mass_ratio=(1.0, 1.0), gn=(0.38, 0.38), g12n=0.0):
    """Upper and lower branches of a general two-component mixture.

    Parameters are in oscillator units of a reference mass m: ``mass_ratio``
    holds m_nu / m, ``gn`` the mean-field energies g_nu n_nu and ``g12n`` the
    product g12 sqrt(n1 n2). Returns ``(eps_plus, eps_minus)``; the lower
    branch is NaN where its square is negative.
    """
    k = np.asarray(k, dtype=float)
    e1 = k * k / (2.0 * mass_ratio[0])
    e2 = k * k / (2.0 * mass_ratio[1])
    eps1_sq = e1 * e1 + 2.0 * e1 * gn[0]
    eps2_sq = e2 * e2 + 2.0 * e2 * gn[1]
    mean = 0.5 * (eps1_sq + eps2_sq)
    root = np.sqrt((0.5 * (eps1_sq - eps2_sq)) ** 2 + 4.0 * g12n**2 * e1 * e2)
    with np.errstate(invalid="ignore"):
        lower = np.sqrt(mean - root)
    return np.sqrt(mean + root), lower


def two_component_sound_speeds(mass_ratio=(1.0, 1.0), gn=(0.38, 0.38), g12n=0.0):
    """Phonon velocities (c_plus, c_minus) of the general mixture.

    ``4 c12^2`` is taken as 4 g12^2 n1 n2 / (m1 m2) so that every term is a
    velocity to the fourth power.
    """
    c1_sq = gn[0] / mass_ratio[0]
    c2_sq = gn[1] / mass_ratio[1]
    root = math.sqrt((c1_sq - c2_sq) ** 2 + 4.0 * g12n**2 / (mass_ratio[0] * mass_ratio[1]))
    lower_sq = 0.5 * (c1_sq + c2_sq - root)
    return math.sqrt(0.5 * (c1_sq + c2_sq + root)), math.sqrt(lower_sq) if lower_sq >= 0 else math.nan


class DispersionModel:
    """Dispersion of both branches for one scenario, plus an inversion table.

    For ``r12 > 1`` the lower branch is real only above the threshold
    ``k_th = sqrt(2 alpha (r12 - 1))``; energies below it are NaN and every
    integral over that branch starts at ``k_th``.
    """

    def __init__(self, config: ReservoirConfig):
        self.config = config
        self.k_max = k_cutoff(config.p)
        self._tables = {}
        for branch in Branch:
            k_lo = self.threshold(branch)
            if k_lo >= self.k_max:
                raise OutOfRange(f"{branch.label} branch has no real modes below k_max={self.k_max:g}")
            knots = np.concatenate(
                [[k_lo], k_lo + np.geomspace(1e-6, self.k_max - k_lo, _TABLE_KNOTS - 1)]
            )
            energies = self.energy(branch, knots)
            if not np.all(np.diff(energies) > 0):
                raise ValueError(f"{branch.label} dispersion is not monotone for {config}")
            knots.setflags(write=False)
            energies.setflags(write=False)
            self._tables[branch] = (knots, energies)

    def strength(self, branch: Branch) -> float:
        """Coefficient a in eps^2 = E^2 + a E."""
        return self.config.alpha * (1.0 + branch.sign * self.config.r12)

    def threshold(self, branch: Branch) -> float:
        a = self.strength(branch)
        return math.sqrt(-2.0 * a) if a < 0 else 0.0

    def energy(self, branch: Branch, k):
        k = np.asarray(k, dtype=float)
        a = self.strength(branch)
        e = 0.5 * k * k
        shifted = e + a
        # rounding at the threshold must give 0, not NaN
        below = shifted < -4.0 * np.finfo(float).eps * abs(a)
        return np.where(below, np.nan, np.sqrt(e * np.maximum(shifted, 0.0)))

    def energy_above_threshold(self, branch: Branch, u):
        """``(k, eps)`` at ``k = k_th + u^2`` without cancellation near the threshold."""
        u = np.asarray(u, dtype=float)
        k_th = self.threshold(branch)
        k = k_th + u * u
        if k_th == 0.0:
            return k, self.energy(branch, k)
        # E + a = (k^2 - k_th^2) / 2 = u^2 (2 k_th + u^2) / 2
        shifted = 0.5 * u * u * (2.0 * k_th + u * u)
        return k, np.sqrt(0.5 * k * k * shifted)

    def group_velocity(self, branch: Branch, k):
        k = np.asarray(k, dtype=float)
        a = self.strength(branch)
        e = 0.5 * k * k
        eps = self.energy(branch, k)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (2.0 * e + a) * k / (2.0 * eps)
        if a > 0:
            v = np.where(k == 0, math.sqrt(0.5 * a), v)
        return v

    def sound_speed(self, branch: Branch) -> float:
        """Phonon velocity; 0 at r12 = 1 and NaN beyond (no phonon regime)."""
        a = self.strength(branch)
        return math.sqrt(0.5 * a) if a >= 0 else math.nan

    def invert(self, branch: Branch, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0) or not np.all(np.isfinite(omega)):
            raise ValueError("omega must be finite and >= 0")
        knots, energies = self._tables[branch]
        if np.any(omega > energies[-1]):
            raise OutOfRange(
                f"omega={float(np.max(omega)):.6g} above {branch.label} range {energies[-1]:.6g} (k_max={knots[-1]:.6g})"
            )
        idx = np.clip(np.searchsorted(energies, omega, side="right"), 1, knots.size - 1)
        lo, hi = knots[idx - 1], knots[idx]
        k = bisect_increasing(lambda x: self.energy(branch, x), omega, lo, hi, rtol=1e-13)
        return np.where(omega == 0, knots[0], k)


def dispersion(model: DispersionModel, branch: Branch, k):
    """Branch energy eps(k) in units of hbar w_perp."""
    return model.energy(branch, k)


def sound_speed(model: DispersionModel, branch: Branch) -> float:
    return model.sound_speed(branch)


def invert_dispersion(model: DispersionModel, branch: Branch, omega):
    """Wavenumber with eps(k) = omega (bisection inside the cached bracket table)."""
    return model.invert(branch, omega)


def kind_multiplier(config: ReservoirConfig, kind: CouplingKind, k):
    if kind is CouplingKind.SINGLE:
        return 1.0
    factor = 2.0 if config.convention == "coherent_sum" else 1.0
    kd = np.asarray(k, dtype=float) * config.trap_half_dist
    return factor * (np.cos(kd) if kind is CouplingKind.PAIR_SUM else np.sin(kd))


def coupling(model: DispersionModel, branch: Branch, kind: CouplingKind, k, eps=None):
    """Length-scaled coupling amplitude sqrt(ell) * g_k (real).

    ``kappa sqrt(E/eps) exp(-(k p / 2)^2) sin(k L)`` times the pair factor
    ``2 cos(k d)`` / ``2 sin(k d)`` (``coherent_sum``) or ``cos`` / ``sin``
    (``as_printed``). ``eps`` may be supplied when already known.
    """
    cfg = model.config
    k = np.asarray(k, dtype=float)
    e = 0.5 * k * k
    if eps is None:
        eps = model.energy(branch, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(e == 0, 0.0, e / eps)
    amp = (cfg.coupling_prefactor * np.sqrt(ratio) * np.exp(-((k * cfg.p / 2.0) ** 2))
           * np.sin(k * cfg.well_half_sep))
    return amp * kind_multiplier(cfg, kind, k)


def spectral_density_numeric(model: DispersionModel, branch: Branch, kind: CouplingKind, omega):
    """J(omega) = |g(k)|^2 / (pi d eps/dk) at k = k(omega), continuum limit."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("spectral density is defined for omega > 0")
    k = model.invert(branch, omega)
    g = coupling(model, branch, kind, k)
    return g * g / (math.pi * model.group_velocity(branch, k))


@dataclass(frozen=True)
class AnalyticSDF:
    """Phonon-regime spectral density J = eta w S(sqrt2 gamma L w / w_c) exp(-w^2/w_c^2).

    With ``form="derived"`` S is sin^2 and eta carries the branch factor
    kappa^2 / (2 pi c^3); this is what the exact density reduces to for
    linear dispersion. ``form="printed"`` uses sin and the single-species
    eta = kappa^2 / (2 pi (alpha/2)^(3/2)).
    """

    eta: float
    cutoff: float
    geometry_gamma: float
    well_half_sep: float
    form: str = "derived"

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError("cutoff frequency must be positive")
        if self.form not in ("derived", "printed"):
            raise ValueError(f"unknown form {self.form!r}")

    @classmethod
    def from_config(cls, config: ReservoirConfig, branch: Branch, form: str = "derived") -> "AnalyticSDF":
        c_sq = 0.5 * config.alpha * (1.0 + branch.sign * config.r12)
        if c_sq <= 0:
            raise ValueError(f"{branch.label} branch has no phonon regime at r12={config.r12}")
        c = math.sqrt(c_sq)
        kappa_sq = config.coupling_prefactor**2
        if form == "derived":
            eta = kappa_sq / (2.0 * math.pi * c**3)
        else:
            eta = kappa_sq / (2.0 * math.pi * (0.5 * config.alpha) ** 1.5)
        return cls(eta=eta, cutoff=math.sqrt(2.0) * c / config.p, geometry_gamma=1.0 / config.p,
                   well_half_sep=config.well_half_sep, form=form)


def analytic_sdf(sdf: AnalyticSDF, omega):
    omega = np.asarray(omega, dtype=float)
    arg = math.sqrt(2.0) * sdf.geometry_gamma * sdf.well_half_sep * omega / sdf.cutoff
    shape = np.sin(arg) ** 2 if sdf.form == "derived" else np.sin(arg)
    return sdf.eta * omega * shape * np.exp(-((omega / sdf.cutoff) ** 2))


def classify_ohmicity(s: float, tau: float = OHMIC_TAU) -> str:
    if s < 1.0 - tau:
        return "sub-Ohmic"
    if s > 1.0 + tau:
        return "super-Ohmic"
    return "Ohmic"


@dataclass(frozen=True)
class OhmicityFit:
    s: float
    residual: float
    label: str


@dataclass(frozen=True)
class SpectralSample:
    omega_grid: np.ndarray
    values: np.ndarray
    fit_window: tuple = (0.01, 0.1)
    ohmicity_s: float = math.nan
    fit_residual: float = math.nan
    branch: Branch | None = field(default=None, compare=False)
    kind: CouplingKind | None = field(default=None, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if grid.shape != vals.shape or grid.ndim != 1:
            raise ValueError("omega_grid and values must be matching 1-D arrays")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("omega_grid must be strictly increasing")
        if np.any(vals < -1e-12):
            raise ValueError("spectral density has negative samples")
        object.__setattr__(self, "omega_grid", grid)
        object.__setattr__(self, "values", vals)


def ohmicity_fit(sample: SpectralSample, tau: float = OHMIC_TAU) -> OhmicityFit:
    """Power-law exponent s of J ~ w^s inside ``sample.fit_window``."""
    lo, hi = sample.fit_window
    if not (0 < lo < hi) or math.log10(hi / lo) < 0.5:
        raise DegenerateFit(f"fit window {sample.fit_window} spans less than half a decade")
    inside = (sample.omega_grid >= lo) & (sample.omega_grid <= hi)
    w, j = sample.omega_grid[inside], sample.values[inside]
    if np.any(j <= 0):
        raise DegenerateFit("non-positive spectral density inside the fit window")
    fit = fit_loglog(w, j)
    return OhmicityFit(fit.slope, fit.residual, classify_ohmicity(fit.slope, tau))


def sample_spectral_density(model: DispersionModel, branch: Branch, kind: CouplingKind,
                            omega_grid, fit_window=(0.01, 0.1), fit_points: int = 64) -> SpectralSample:
    """Evaluate J on ``omega_grid`` and fit its exponent on a log grid over ``fit_window``.

    The fit uses its own ``fit_points`` log-spaced samples so that the exponent
    does not depend on how finely the display grid resolves the window.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    values = spectral_density_numeric(model, branch, kind, omega_grid)
    fit_grid = np.geomspace(fit_window[0], fit_window[1], fit_points)
    probe = SpectralSample(fit_grid, spectral_density_numeric(model, branch, kind, fit_grid), fit_window)
    try:
        fit = ohmicity_fit(probe)
        s, resid = fit.s, fit.residual
    except DegenerateFit:
        s = resid = math.nan
    return SpectralSample(omega_grid, values, fit_window, s, resid, branch, kind)
