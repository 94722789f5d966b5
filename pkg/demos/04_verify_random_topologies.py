# %% [markdown]
# # Cross-checking on random multigraphs
#
# `verify` runs brute-force enumeration and the full circuit side by side.
# Here it runs on a batch of random connected multigraphs with up to 7 edges.

# %%
import random

from causalgrover.grover import verify
from causalgrover.topology import MultiloopTopology, enumerate_cycles

rng = random.Random(7)


def random_topology(n_edges, n_vertices):
    tree = [(k, rng.randrange(k)) for k in range(1, n_vertices)]
    extra = [tuple(rng.sample(range(n_vertices), 2)) for _ in range(n_edges - len(tree))]
    return MultiloopTopology(n_vertices, tuple(tree + extra))


# %%
rows = []
while len(rows) < 25:
    n = rng.randint(3, 7)
    t = random_topology(n, rng.randint(2, min(n, 4)))
    if not enumerate_cycles(t):
        continue
    r = verify(t, max_qubits=20)
    if r.plan is None or r.qubits == 0:
        continue
    rows.append((t.n_edges, len(enumerate_cycles(t)), r.classical.count, r.qubits, r.plan.iterations, r.ok))

print("edges cycles causal qubits t ok")
for row in rows:
    print(*row)
print("all ok:", all(row[-1] for row in rows))
