"""Bound entangled states from product bases, and tools to certify them."""

__version__ = "0.1.0"

from .catalog import (  # noqa: E402
    DensityMatrix,
    Family,
    ProductBasis,
    ProductVector,
    edge_state,
    extended_tiles_4x3_upb,
    gentiles2_4x3_upb,
    mix,
    tiles_upb,
)
from .maps import choi_u_detect, is_ppt, partial_transpose  # noqa: E402
