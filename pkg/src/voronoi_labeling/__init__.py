"""Hamming-density labelling of self-similar Voronoi lattice constellations."""

__version__ = "0.1.0"

from .labeling import (
    HammingDensity,
    NeighborOffsetSet,
    gray_decode,
    gray_encode,
    hamming_density,
    hd_brute_force_oracle,
    neighbor_offsets_sheared,
    neighbor_offsets_standard,
    theoretical_hd_bound,
)
from .lattice_core import (
    LatticeId,
    MarkedLattice,
    label_of_point,
    minimal_vectors,
    quantize_nearest,
    standard_lattice,
    voronoi_reduce,
)
from .modem import ChannelStats, CodecConfig, awgn, decode, encode, run_trials
from .unimodular_group import (
    DescentResult,
    UnimodularElement,
    canonicalize,
    enumerate_group,
    group_order,
    hamming_ascent,
    hamming_descent,
    hd_of,
    preset_best_unimodular,
    random_seed_unimodulars,
    shear_generators,
)

__all__ = [
    "ChannelStats",
    "CodecConfig",
    "DescentResult",
    "HammingDensity",
    "LatticeId",
    "MarkedLattice",
    "NeighborOffsetSet",
    "UnimodularElement",
    "awgn",
    "canonicalize",
    "decode",
    "encode",
    "enumerate_group",
    "gray_decode",
    "gray_encode",
    "group_order",
    "hamming_ascent",
    "hamming_density",
    "hamming_descent",
    "hd_brute_force_oracle",
    "hd_of",
    "label_of_point",
    "minimal_vectors",
    "neighbor_offsets_sheared",
    "neighbor_offsets_standard",
    "preset_best_unimodular",
    "quantize_nearest",
    "random_seed_unimodulars",
    "run_trials",
    "shear_generators",
    "standard_lattice",
    "theoretical_hd_bound",
    "voronoi_reduce",
]
