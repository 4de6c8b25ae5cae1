"""
Tracking a scripted leader
==========================

Agent 0 ignores the flock and follows a sinusoidal acceleration whose sign
flips at t = 125 s. Agent 1 runs the control law and has to keep its
squared distance to the leader inside (d0, d1), once with the simulation
gains and once with the wider band used on the two-UAV platform.
"""

# %%
import numpy as np

import birdflock as bf

for preset in ("simulation", "realistic"):
    trajectory = bf.run(bf.leader_follower2(preset=preset))
    p = trajectory.spec.params
    s = trajectory.diagnostics.min_sq_dist
    print(f"{preset:9s} d0={p.d0} d1={p.d1}  squared distance {s.min():.3f} .. {s.max():.3f}"
          f"  completed={trajectory.completed}")

# %%
# The baselines have no cohesion barrier, so the follower drifts out of range.
for law in ("model1", "model2", "model3"):
    trajectory = bf.run(bf.leader_follower2(law))
    v = trajectory.violation
    print(f"{law}: {v.bound} bound breached at t = {v.time:.2f} s")

# %%
# Saturating the follower at the platform's actuation limits. The leader's
# own speed is not capped and soon exceeds v_max, so the follower falls
# behind and the run halts at the upper bound.
limits = bf.SaturationLimits(a_max=2.5, v_max=0.5, enabled=True)
capped = bf.run(bf.leader_follower2(preset="realistic", limits=limits))
print("capped follower speed:", np.linalg.norm(capped.velocities[:, 1], axis=1).max())
print("completed:", capped.completed, "violation:", capped.violation)

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    trajectory = bf.run(bf.leader_follower2(preset="realistic"))
    fig, ax = plt.subplots()
    ax.plot(trajectory.times, trajectory.diagnostics.avg_distance)
    ax.axhline(1.0, ls="--", c="k")
    ax.axhline(np.sqrt(8.0), ls="--", c="k")
    ax.axvline(125, c="0.7")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("leader-follower distance (m)")
    fig.savefig("leader_follower.png", dpi=120)
