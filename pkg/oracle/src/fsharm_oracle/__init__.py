"""Exact SDP reference solutions at desk scale, for cross-validating the
fast solvers through their file interfaces."""

__version__ = "0.1.0"

from .selectors import (
    band_coefficients,
    band_selector,
    build_band_shifted,
    build_toeplitz_from_selectors,
    offset_grid,
    reduced_selector,
    selector,
)
from .sdp import Instance, solve_dual, solve_primal
