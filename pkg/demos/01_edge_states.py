"""
Edge states from unextendible product bases
===========================================

Build the two product bases, form the normalized projector onto their
orthogonal complement and look at the properties that make it a bound
entangled "edge" state.
"""

import numpy as np

from belab import edge_state, gentiles2_4x3_upb, is_ppt, partial_transpose, tiles_upb
from belab.linalg import rank

###############################################################################
# The Tiles basis in 3x3: four "domino" states plus the uniform stopper.
tiles = tiles_upb()
for v in tiles:
    print(v.label, np.round(v.alpha, 3), "x", np.round(v.beta, 3))
print("Gram matrix is the identity:", np.allclose(tiles.gram(), np.eye(5)))

###############################################################################
# The edge state is (I - P) / (D - n). Its range is the complement, so every
# basis vector is in its kernel.
rho = edge_state(tiles)
print("trace", np.trace(rho.mat), "rank", rank(rho.mat))
print("max |rho psi_i|:", max(np.abs(rho.mat @ v.vector).max() for v in tiles))

###############################################################################
# All basis vectors are real, so the state equals its own partial transpose
# and is trivially PPT.
print("PT-invariant:", np.abs(partial_transpose(rho) - rho.mat).max() < 1e-12)
print("PPT:", is_ppt(rho))

###############################################################################
# Same construction in 4x3 with the seven-member basis; the complement has
# dimension 12 - 7 = 5.
gen = gentiles2_4x3_upb()
rho2 = edge_state(gen)
print("gentiles2 edge: dims", rho2.dims, "rank", rank(rho2.mat), "PPT", is_ppt(rho2))
