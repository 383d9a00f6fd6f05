"""
Spectral densities and their low-frequency exponent
===================================================

J(omega) follows from the coupling, the group velocity and the inverse
dispersion. Modes with sin(k L) = 0 decouple entirely, so J has exact
zeros that crowd together when the wells are far apart. At small omega
J behaves like omega^s, and s sets the Ohmic class of the bath.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bosemix import AnalyticSDF, Branch, CouplingKind, DispersionModel, reference_config, sample_spectral_density
from bosemix.reservoir import analytic_sdf

omega = np.linspace(1e-3, 4.0, 800)
fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)

for row, L in enumerate((0.75, 7.5)):
    for col, branch in enumerate(Branch):
        ax = axes[row, col]
        for r12 in (0.2, 0.9):
            cfg = reference_config(r12=r12, well_half_sep=L)
            sample = sample_spectral_density(DispersionModel(cfg), branch, CouplingKind.SINGLE, omega)
            ax.plot(omega, sample.values, label=f"r12={r12}, s={sample.ohmicity_s:.2f}")
        ax.set_title(f"{branch.label}, L={L}")
        ax.legend(fontsize=8)
for ax in axes[1]:
    ax.set_xlabel("omega")

# The phonon-regime closed form agrees only while the dispersion is linear
cfg = reference_config()
sdf = AnalyticSDF.from_config(cfg, Branch.UPPER)
for frac in (0.001, 0.01, 0.1):
    w = frac * sdf.cutoff
    exact = sample_spectral_density(DispersionModel(cfg), Branch.UPPER, CouplingKind.SINGLE, [w]).values[0]
    print(f"omega = {frac} omega_c: exact / phonon = {exact / analytic_sdf(sdf, w):.4f}")

fig.tight_layout()
out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=120)
print("saved", out)
