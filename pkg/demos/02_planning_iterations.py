# %% [markdown]
# # Mixing angle, qubit fixing and the ancilla
#
# With r solutions among N states the mixing angle is arcsin(sqrt(r/N)).
# The search pays off once the angle is near pi/6. Above that, one qubit is
# fixed, which halves r by mirror symmetry. If the angle is still too large,
# an ancilla doubles N.

# %%
import math

import numpy as np

from causalgrover.grover import plan

p = plan(46, 6)
print(f"raw angle  {p.theta_raw:.4f} rad = pi/{math.pi / p.theta_raw:.2f}")
print(f"fixed      {p.theta:.4f} rad = pi/{math.pi / p.theta:.2f}")
print(p.summary())

# %% [markdown]
# Success probability after t rounds is sin^2((2t+1) theta). The planner
# takes the best t up to ceil(pi / 4 theta).

# %%
for t in range(0, 4):
    print(t, round(math.sin((2 * t + 1) * p.theta) ** 2, 4))

# %%
for r, n in [(1, 4), (6, 3), (2, 2), (254, 8)]:
    print(f"r={r:3d} n={n}:", plan(r, n).summary())

# %% [markdown]
# Sweep of the planned success probability over all mirror-closed counts
# at n = 10.

# %%
rs = np.arange(2, 1024, 2)
best = [plan(int(r), 10).success_probability for r in rs]
print(f"min {min(best):.3f}  mean {np.mean(best):.3f}")
