"""Counting and sampling for the four-vertex model on 4-regular multigraphs.

The pipeline: circuit decomposition -> agree/disagree circuit graph -> GF(2)
flip system -> ferromagnetic Ising / even-subgraph form -> worm process.
Plane instances additionally reduce to an Ising model on the black faces.
"""
from .circuits import CircuitGraph, CircuitDecomposition, apply_flips, circuit_partition, classify, decompose
from .errors import FourVertexError, NoFerroReduction, TooLarge
from .estimator import Estimate, Schedule, estimate_partition, estimate_Z0, sample_configuration, sample_configurations
from .even import FerroIsingInstance, exact_even_sum, exact_partition_from_even, reduce, reduce_instance, spins_from_even
from .model import (
    Dart,
    FourVertexInstance,
    brute_force_partition,
    config_weight,
    enumerate_configurations,
    format_instance,
    parse_instance,
    read_instance,
    vertex_weight,
)
from .parity import build_system, solve
from .planar import build_black_face_graph, canonical_label, planar_mixing_bound, planar_partition, trace_faces, two_color_faces
from .windability import ConstraintFunction, check_windable, fstar, matchings
from .worm import WormKernel, mixing_bound, sample_even

__version__ = "0.1.0"
