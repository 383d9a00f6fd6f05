"""
Dephasing of one impurity qubit in each Bogoliubov branch
=========================================================

The decoherence exponent Gamma(t) grows as t^2 at first and then levels
off, because soft modes barely couple to the double well. Stronger
inter-species repulsion stiffens the upper branch and softens the lower
one, so the two branches respond in opposite directions.

Run with ``python3 demos/single_qubit_dephasing.py``; the figure is saved
next to this script.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bosemix import Branch, GammaKind, blp_measure, gamma, gamma_trajectory, reference_config

sweep = (0.2, 0.5, 0.9)
fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)

for ax, branch in zip(axes, Branch):
    for r12 in sweep:
        traj = gamma_trajectory(reference_config(r12=r12), branch, GammaKind.GAMMA0, 20.0, n_steps=128)
        n = blp_measure(traj).measure
        ax.plot(traj.time_grid, traj.gamma, label=f"r12={r12}  N={n:.1e}")
    ax.set_title(f"{branch.label} branch")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
axes[0].set_ylabel("Gamma(t)")

# Short times: the slope on a log-log plot is 2
t = np.geomspace(1e-3, 1e-1, 20)
g = [gamma(reference_config(), Branch.UPPER, GammaKind.GAMMA0, x) for x in t]
print("short-time log-log slope:", np.polyfit(np.log(t), np.log(g), 1)[0])

fig.tight_layout()
out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=120)
print("saved", out)
