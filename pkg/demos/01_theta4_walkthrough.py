"""
Theta4 from configurations to an Ising model
============================================

Two vertices joined by four parallel edges. We count the weighted
orientations by brute force, then redo the count by splitting the graph into
circuits, fixing parities and reading off a ferromagnetic Ising model.
"""
from pathlib import Path

from fourvertex import (
    brute_force_partition,
    circuit_partition,
    classify,
    decompose,
    exact_partition_from_even,
    read_instance,
    reduce_instance,
)

inst = read_instance(Path(__file__).parent / "data" / "theta4.txt")
print("darts:", inst.num_darts, "beta:", inst.beta)

# The oracle: enumerate every orientation with two arrows in and two out.
print("Z by enumeration:", brute_force_partition(inst))

# Pair slots 1<->4 and 2<->3 at each vertex; the edges then fall into circuits.
dec = decompose(inst)
graph = classify(inst, dec)
print("circuits:", graph.m, "agree/disagree counts per pair:", graph.pairs)
print("Z summed over circuit orientations:", circuit_partition(inst, dec))

# Orient the circuits so each pair is ferromagnetic; the even-subgraph sum
# of the resulting Ising model reproduces Z.
red = reduce_instance(inst)
print("flips:", red.flips)
for e in red.ferro.edges:
    print(f"  edge {e.u}-{e.v}: beta_e = {e.beta}, x_e = {e.x}")
print("Z via even subgraphs:", exact_partition_from_even(red.ferro))
