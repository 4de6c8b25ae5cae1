"""
Three birds, no leader
======================

Three agents start near an equilateral triangle with mismatched headings
and speeds. Under the bounded-distance law they settle on a common
velocity while every pairwise squared distance stays inside (d0, d1).
"""

# %%
import numpy as np

import birdflock as bf

spec = bf.leaderless3()
print(spec.params)
trajectory = bf.run(spec)
diag = trajectory.diagnostics

# %%
# Squared distances never leave the band, and the velocity dispersion
# collapses within the first few seconds.
print("squared distance range: %.4f .. %.4f" % (diag.min_sq_dist.min(), diag.max_sq_dist.max()))
for t in (0, 1, 2, 5, 10, 50, 250):
    n = int(round(t / spec.integrator.dt))
    print("t = %5.1f s  dispersion %.3e  avg distance %.4f m" % (t, diag.dispersion[n], diag.avg_distance[n]))

# %%
# Final headings, in degrees.
v = trajectory.velocities[-1]
print(np.degrees(np.arctan2(v[:, 1], v[:, 0])))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    for i in range(spec.k):
        ax0.plot(trajectory.positions[:, i, 0], trajectory.positions[:, i, 1], label=f"agent {i}")
    ax0.set_aspect("equal")
    ax0.legend()
    ax1.semilogy(diag.time, np.maximum(diag.dispersion, 1e-17))
    ax1.set_xlabel("t (s)")
    ax1.set_ylabel("velocity dispersion")
    fig.savefig("leaderless_flock.png", dpi=120)
