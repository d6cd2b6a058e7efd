"""Exact invariant laminations of the disk, primitive majors and core entropy."""

from .angle import AngleError, format_angle, make_angle, orbit, parse_angle, tuple_map
from .entropy import build_matrix, core_entropy, hausdorff_dimension, pair_basis, spectral_radius, sweep
from .lamination import FiniteLamination, RectangleSet, backward_lift, clean, good_region, leaves_cross
from .major import PrimitiveMajor, from_starting_points, normalize_starts, random_generic_major, validate

__version__ = "0.1.0"
