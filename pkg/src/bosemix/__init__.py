"""Impurity qubits in a quasi-one-dimensional binary Bose mixture."""

__version__ = "0.1.0"

from .dephasing import GammaKind, decay_rate, gamma, gamma_trajectory, plateau
from .entanglement import (
    TwoQubitState, assemble_density_matrix, concurrence, concurrence_trajectory, density_matrix,
    induced_coupling, induced_coupling_trajectory,
)
from .errors import BosemixError
from .nonmarkov import blp_measure
from .params import REFERENCE_PHYSICAL, PhysicalParams, ReservoirConfig, reference_config, to_dimensionless
from .reservoir import AnalyticSDF, Branch, CouplingKind, DispersionModel, sample_spectral_density

__all__ = [
    "AnalyticSDF", "BosemixError", "Branch", "CouplingKind", "DispersionModel", "GammaKind",
    "REFERENCE_PHYSICAL", "PhysicalParams", "ReservoirConfig", "TwoQubitState", "assemble_density_matrix",
    "blp_measure", "concurrence", "concurrence_trajectory", "decay_rate", "density_matrix", "gamma",
    "gamma_trajectory", "induced_coupling", "induced_coupling_trajectory", "reference_config", "plateau",
    "sample_spectral_density", "to_dimensionless",
]
