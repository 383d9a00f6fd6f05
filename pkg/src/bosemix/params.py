"""Physical inputs, the dimensionless scenario and the conversion between them.

Units of the dimensionless scenario: energies in hbar*w_perp, lengths in the
transverse oscillator length l0 = sqrt(hbar / (m w_perp)), times in 1/w_perp,
temperatures in hbar*w_perp / k_B.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy import constants

from .errors import ConfigError, NonSymmetricMixture, StabilityViolation

HBAR = constants.hbar
K_B = constants.k
AMU = constants.atomic_mass

CONVENTIONS = ("coherent_sum", "as_printed")


def _common(name, value):
    """Collapse a per-species pair to one value, refusing asymmetric mixtures."""
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise ValueError(f"{name}: expected one value or a pair, got {value!r}")
        v1, v2 = float(value[0]), float(value[1])
        if not math.isclose(v1, v2, rel_tol=1e-12):
            raise NonSymmetricMixture(f"{name} differs between species: {v1!r} vs {v2!r}")
        return v1
    return float(value)


@dataclass(frozen=True)
class PhysicalParams:
    """SI description of the mixture, impurity traps and temperature.

    The species-dependent fields (``reservoir_mass``, ``density``,
    ``intra_scattering``, ``transverse_freq``) take a single number or a pair;
    a pair with unequal entries raises :class:`NonSymmetricMixture`.
    ``trap_half_distance`` defaults to twice ``well_half_separation``.
    """

    reservoir_mass: float
    impurity_mass: float
    density: float
    intra_scattering: float
    inter_scattering: float
    impurity_scattering: float
    transverse_freq: float
    impurity_trap_freq: float
    well_half_separation: float
    trap_half_distance: float | None = None
    temperature: float = 0.0

    def __post_init__(self):
        for name in ("reservoir_mass", "density", "intra_scattering", "transverse_freq"):
            object.__setattr__(self, name, _common(name, getattr(self, name)))
        if self.trap_half_distance is None:
            object.__setattr__(self, "trap_half_distance", 2.0 * self.well_half_separation)
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "temperature":
                if v < 0:
                    raise ValueError("temperature must be >= 0")
            elif f.name == "inter_scattering":
                if not math.isfinite(v):
                    raise ValueError("inter_scattering must be finite")
            elif not v > 0:
                raise ValueError(f"{f.name} must be strictly positive, got {v!r}")

    @property
    def l0(self) -> float:
        return math.sqrt(HBAR / (self.reservoir_mass * self.transverse_freq))

    @property
    def l_impurity(self) -> float:
        return math.sqrt(HBAR / (self.impurity_mass * self.impurity_trap_freq))

    @classmethod
    def from_ini(cls, path, section: str = "physical") -> "PhysicalParams":
        """Read keys named after the fields (SI units) from an INI file."""
        return cls.from_ini_string(Path(path).read_text(), section)

    @classmethod
    def from_ini_string(cls, text: str, section: str = "physical") -> "PhysicalParams":
        parser = configparser.ConfigParser()
        if not text.lstrip().startswith("["):
            text = f"[{section}]\n" + text
        parser.read_string(text)
        if not parser.has_section(section):
            raise ConfigError(f"missing [{section}] section")
        known = {f.name for f in dataclasses.fields(cls)}
        values, errors = {}, []
        for key, raw in parser.items(section):
            if key not in known:
                errors.append(f"unknown key {key!r} in [{section}]")
                continue
            try:
                parts = [float(x) for x in raw.replace(",", " ").split()]
            except ValueError:
                errors.append(f"{key}: cannot parse {raw!r} as a number")
                continue
            values[key] = parts[0] if len(parts) == 1 else tuple(parts)
        missing = [f.name for f in dataclasses.fields(cls)
                   if f.default is dataclasses.MISSING and f.name not in values]
        errors += [f"missing key {name!r} in [{section}]" for name in missing]
        if errors:
            raise ConfigError(errors)
        return cls(**values)


@dataclass(frozen=True)
class ReservoirConfig:
    """Dimensionless scenario shared by every computation.

    ``alpha`` is 4 n a, ``p`` the impurity width l_I / l0, ``r12`` the ratio
    a12 / a and ``coupling_prefactor`` the scaled impurity coupling kappa.
    ``trap_half_dist`` defaults to ``2 * well_half_sep`` (inter-qubit distance 2d = 4L).
    Ratios ``r12 >= 1`` are outside the miscible region and need
    ``allow_immiscible=True``.
    """

    alpha: float
    p: float
    r12: float
    coupling_prefactor: float = 1.0
    well_half_sep: float = 0.75
    trap_half_dist: float | None = None
    temperature: float = 0.0
    convention: str = "coherent_sum"
    allow_immiscible: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.trap_half_dist is None:
            object.__setattr__(self, "trap_half_dist", 2.0 * self.well_half_sep)
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha!r}")
        if not self.p > 0:
            raise ValueError(f"p must be > 0, got {self.p!r}")
        if not self.coupling_prefactor > 0:
            raise ValueError("coupling_prefactor must be > 0")
        if self.well_half_sep < 0 or self.trap_half_dist < 0:
            raise ValueError("well_half_sep and trap_half_dist must be >= 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if not self.r12 > -1.0:
            raise StabilityViolation(f"r12={self.r12} <= -1: upper branch collapses")
        if self.r12 >= 1.0 and not self.allow_immiscible:
            raise StabilityViolation(
                f"r12={self.r12} >= 1 violates g1*g2 > g12^2; pass allow_immiscible=True to override"
            )

    @property
    def miscible(self) -> bool:
        return -1.0 < self.r12 < 1.0

    def replace(self, **changes) -> "ReservoirConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def to_dimensionless(phys: PhysicalParams, allow_immiscible: bool = False,
                     convention: str = "coherent_sum") -> ReservoirConfig:
    """Scale SI inputs to the oscillator unit system."""
    m, m_i = phys.reservoir_mass, phys.impurity_mass
    l0 = phys.l0
    l_i = phys.l_impurity
    r12 = phys.inter_scattering / phys.intra_scattering
    # symmetric mixture: g12 / g = a12 / a, so g1 g2 > g12^2 is |r12| < 1
    if r12 * r12 >= 1.0 and not allow_immiscible:
        raise StabilityViolation(f"g12^2 >= g1 g2 (a12/a = {r12:.6g})")
    p = l_i / l0
    # kappa = g_I sqrt(n) / (hbar w_perp sqrt(l0)) with g_I = 2 hbar^2 a_I / (m_red (l_I^2 + l0^2))
    kappa = (2.0 * (phys.impurity_scattering / l0) * math.sqrt(phys.density * l0)
             * (1.0 + m / m_i) / (1.0 + p * p))
    return ReservoirConfig(
        alpha=4.0 * phys.density * phys.intra_scattering,
        p=p,
        r12=r12,
        coupling_prefactor=kappa,
        well_half_sep=phys.well_half_separation / l0,
        trap_half_dist=phys.trap_half_distance / l0,
        temperature=K_B * phys.temperature / (HBAR * phys.transverse_freq),
        convention=convention,
        allow_immiscible=allow_immiscible,
    )


def _reference_physical() -> PhysicalParams:
    m = 87 * AMU
    m_i = 41 * AMU
    w_perp = 2 * math.pi * 1e3
    l0 = math.sqrt(HBAR / (m * w_perp))
    l_i = 0.5 * l0  # p = 0.5; the impurity trap frequency is not quoted, so it is set from p
    return PhysicalParams(
        reservoir_mass=m,
        impurity_mass=m_i,
        density=3.6e7,
        intra_scattering=5.3e-9,
        inter_scattering=0.2 * 5.3e-9,
        impurity_scattering=3.4e-9,
        transverse_freq=w_perp,
        impurity_trap_freq=HBAR / (m_i * l_i * l_i),
        well_half_separation=0.75 * l0,
    )


#: 87Rb hyperfine mixture with 41K impurities (a12/a = 0.2, L = 0.75 l0).
REFERENCE_PHYSICAL = _reference_physical()
REFERENCE_KAPPA = to_dimensionless(REFERENCE_PHYSICAL).coupling_prefactor


def reference_config(**overrides) -> ReservoirConfig:
    """Canonical figure parameters: alpha = 0.76, p = 0.5, L = 0.75, r12 = 0.2.

    The figure sweeps reach r12 = 3, so ``r12 >= 1`` switches on
    ``allow_immiscible`` unless the caller sets it explicitly.
    """
    base = dict(alpha=0.76, p=0.5, r12=0.2, coupling_prefactor=REFERENCE_KAPPA, well_half_sep=0.75)
    base.update(overrides)
    if base["r12"] >= 1.0 and "allow_immiscible" not in overrides:
        base["allow_immiscible"] = True
    return ReservoirConfig(**base)
