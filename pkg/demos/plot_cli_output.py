"""
Plotting the command-line output
================================

Reads the tree written by ``birdflock compare`` and plots the average
distance of every law together with the bound lines.

    birdflock compare --scenario leaderless3 --out flock_output
    python demos/plot_cli_output.py flock_output
"""

# %%
import sys
from pathlib import Path

import numpy as np

from birdflock.io import read_diagnostics_csv, read_trajectory_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "flock_output")
table = np.genfromtxt(out / "avg_distance.csv", delimiter=",", names=True)
laws = [name for name in table.dtype.names if name not in ("t", "sqrt_d0", "sqrt_d1")]
print("laws:", laws)

# %%
times, positions, velocities, _ = read_trajectory_csv(out / "proposed" / "trajectory.csv")
diag = read_diagnostics_csv(out / "proposed" / "diagnostics.csv")
print(f"{len(times)} states, final energy {diag[-1, 1]:.6f}")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is not installed; nothing to plot")

fig, ax = plt.subplots()
for law in laws:
    ax.plot(table["t"], table[law], label=law)
ax.plot(table["t"], table["sqrt_d0"], "k--")
ax.plot(table["t"], table["sqrt_d1"], "k--")
ax.set_xlabel("t (s)")
ax.set_ylabel("average distance (m)")
ax.legend()
fig.savefig(out / "avg_distance.png", dpi=120)
print("wrote", out / "avg_distance.png")
