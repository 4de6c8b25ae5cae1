"""
Energy, mean velocity and the compact form
==========================================

The flock energy is the residual speed norm plus a barrier potential for
each pair. It never increases along a leaderless run, the mean velocity
never moves, and the control inputs can be written with two graph
Laplacians.
"""

# %%
import numpy as np

import birdflock as bf

trajectory = bf.run(bf.leaderless3())
e = trajectory.diagnostics.energy
print("energy at t=0: %.6f" % e[0])
print("total decrease: %.6e" % (e[0] - e[-1]))
print("largest single-step increase: %.3e" % np.diff(e).max())

# %%
mean = trajectory.diagnostics.mean_velocity
print("mean velocity drift:", np.abs(mean - mean[0]).max())

# %%
# Runtime monitors bundle these checks.
for verdict in bf.monitor(trajectory):
    print(f"{verdict.check:14s} passed={verdict.passed}  {verdict.detail}")

# %%
# The stacked inputs agree with -L_x v + dispersion * L_f x.
flock = trajectory.state(0)
p = trajectory.spec.params
lap = bf.build_laplacians(flock, p)
print(lap.L_x)
print(np.abs(bf.laplacian_form_inputs(flock, p) - bf.control_inputs(flock, p)).max())

# %%
# Energy is only defined inside the band.
outside = bf.FlockState(0.0, [(0, 0), (2, 0)], [(0, 0), (0, 0)])
try:
    bf.energy(outside, p)
except bf.DistanceBoundViolation as exc:
    print("out of band:", exc)
