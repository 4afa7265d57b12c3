"""Exact tools for 3D domino tilings of cylinders ``D x [0, N]``.

Quadriculated disks, plugs and floors, twist, exact counting and twist
censuses, flips and trits with replayable certificates, the thin-rectangle
group homomorphism, hamiltonian-path generators with the regularity check,
and the max-plus growth constant.
"""

from .counting import TwistPolynomial, count_cork, count_tilings, twist_census
from .disk import DiskError, QuadDisk, load_disk, parse_disk, rectangle
from .floors import BudgetExceeded, build_transfer_graph, enumerate_floors, enumerate_plugs
from .groups import (
    G2Element, HamPath, RegularityReport, cell_boundary_check, flux, flux_classes, generator_tiling,
    hamiltonian_path, phi, regularity_check,
)
from .moves import Move, apply_move, enumerate_flips, enumerate_tilings, enumerate_trits, flip_components
from .search import FlipTrace, flip_connect, sim_connect, verify_certificate
from .tiling import (
    CylinderTiling, Floor, TilingError, concatenate, invert, load_tiling, pad_vertical, parse_tiling,
    serialize_tiling, vertical_tiling,
)
from .tropical import build_tropical_matrix, max_cycle_mean, upper_bound_certificate
from .twist import twist

__all__ = [
    "BudgetExceeded", "CylinderTiling", "DiskError", "FlipTrace", "Floor", "G2Element", "HamPath", "Move",
    "QuadDisk", "RegularityReport", "TilingError", "TwistPolynomial", "apply_move", "build_transfer_graph",
    "build_tropical_matrix", "cell_boundary_check", "concatenate", "count_cork", "count_tilings",
    "enumerate_flips", "enumerate_floors", "enumerate_plugs", "enumerate_tilings", "enumerate_trits",
    "flip_components", "flip_connect", "flux", "flux_classes", "generator_tiling", "hamiltonian_path",
    "invert", "load_disk", "load_tiling", "max_cycle_mean", "pad_vertical", "parse_disk", "parse_tiling",
    "phi", "rectangle", "regularity_check", "serialize_tiling", "sim_connect", "twist", "twist_census",
    "upper_bound_certificate", "verify_certificate", "vertical_tiling",
]
