"""
The planar pipeline
===================

Trace the faces of an embedded instance, two-color them with the outer face
white, relabel so circuits run around black faces, and compute Z as an Ising
model on the black faces.
"""
from pathlib import Path

from fourvertex import brute_force_partition, canonical_label, planar_partition, read_instance, trace_faces
from fourvertex.instances import double_loop
from fourvertex.planar import build_black_face_graph, is_canonical, planar_mixing_bound, two_color_faces

inst = read_instance(Path(__file__).parent / "data" / "octahedron.txt")
faces = trace_faces(inst)
coloring = two_color_faces(inst, faces)
print("faces:", len(faces), "outer face:", faces.outer, "colors:", coloring.colors)
print("already canonical?", is_canonical(inst))

canon = canonical_label(inst, coloring)
graph = build_black_face_graph(canon)
print("black-face graph: k =", graph.k, "edge multiplicities =", graph.multiplicity)

result = planar_partition(inst)
print("planar Z:", result.value, "| enumeration on the relabeled instance:", brute_force_partition(canon))
print("planar chain bound at eps=0.1:", round(planar_mixing_bound(canon, 0.1), 3))

# One vertex with two loops. Which face is outer changes the black-face graph:
# a loop interior outside leaves one black face with a self-loop, while the big
# face outside gives a tree on two black faces, one more than the vertex count.
for outer in [(0, 2), (0, 1)]:
    loop = double_loop(2, planar_outer=outer)
    g = build_black_face_graph(canonical_label(loop))
    print(f"double loop, outer {outer}: k = {g.k}, edges = {g.num_edges}, self-loops = {g.self_loops},",
          "Z =", planar_partition(loop).value)
