# %% [markdown]
# # Topologies, eloops and causality clauses
#
# The two-eloop, six-edge topology is a theta graph: three two-edge paths
# between vertices 0 and 1. Each edge gets one qubit, and bit i = 1 keeps
# edge i in its reference direction.

# %%
from causalgrover import bundled
from causalgrover.topology import build_clauses, enumerate_causal, enumerate_cycles, is_causal

topo = bundled.load("two-eloop-six-edge")
print(topo.edges)

# %% [markdown]
# Every simple cycle becomes one loop clause, not just an independent set of
# two. A cycle's consecutive edges are compared: equal bits when both point
# the same way along the traversal, unequal otherwise.

# %%
for cyc in enumerate_cycles(topo):
    print("cycle", cyc.edges, "parities", [p for _, p in cyc.edge_sequence])

clauses = build_clauses(topo)
print([str(c) for c in clauses.binary_clauses])
for lc in clauses.loop_clauses:
    print("loop clause", lc.cycle, "= not(", " and ".join(str(clauses.binary_clauses[k]) for k in lc.clauses), ")")

# %% [markdown]
# A configuration is causal when no loop clause is violated. Brute force
# gives 46 of 64, and 23 once edge 0 is pinned to its reference direction.

# %%
print(is_causal("111111", clauses), is_causal("110100", clauses))
causal = enumerate_causal(topo)
print(causal.count, "causal;", enumerate_causal(topo, (0, 1)).count, "with q0 = 1")
print("mirror closed:", causal.is_mirror_closed())
