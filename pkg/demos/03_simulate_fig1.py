# %% [markdown]
# # Simulating the 16-qubit circuit
#
# Registers: 6 edge qubits, 6 binary clauses, 3 loop clauses and the phase
# marker. One Grover round is enough after fixing q0.

# %%
from causalgrover import bundled
from causalgrover.cli import render_ascii_chart
from causalgrover.grover import classify, extract_causal, plan, program_to_text, run, synthesize
from causalgrover.topology import build_clauses, enumerate_causal

topo = bundled.load("two-eloop-six-edge")
p = plan(enumerate_causal(topo).count, topo.n_edges)
program = synthesize(build_clauses(topo), p)
print(program.layout.describe())
print(program_to_text(program).splitlines()[:12])

# %% [markdown]
# The exact edge-register marginal has two levels. The 23 high strings are
# the causal configurations with q0 = 1.

# %%
hist = run(program)
hist.causal = classify(hist, p)
print(render_ascii_chart(hist, width=40))
print("high level", p.plateaus()[0], "low level", p.plateaus()[1])

# %% [markdown]
# Adding the mirror of every high string recovers all 46 configurations.
# A shot-based run with 100 N shots gives the same answer.

# %%
found = extract_causal(hist, p)
print(found.count, found == enumerate_causal(topo))
sampled = run(program, shots=6400, seed=2022)
print(extract_causal(sampled, p) == enumerate_causal(topo))
