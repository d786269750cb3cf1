"""
UPB witnesses and the rank ladder
=================================

W = P - gamma I, with P the projector onto the basis span and gamma the
smallest overlap of P with a product state, is non-negative on separable
states. gamma is found by a multistart seesaw, which only gives an upper
bound, so a rigorous verdict needs a supplied gamma.
"""

import numpy as np

from belab import edge_state, gentiles2_4x3_upb, tiles_upb
from belab.catalog import sigma2_family
from belab.certify import estimate_gamma, grid_overlap, witness_from_basis, witness_value
from belab.linalg import rank

###############################################################################
# Estimate gamma for Tiles and compare with a brute-force angle grid.
tiles = tiles_upb()
gamma = estimate_gamma(tiles.projector(), tiles.dims)
grid = grid_overlap(tiles.projector(), tiles.dims, coarse_step=0.05, fine_step=0.005)
print(f"Tiles gamma: seesaw {gamma:.10f}, grid {grid.value:.10f}")
print("seeds 0..4:", [round(estimate_gamma(tiles.projector(), tiles.dims, seed=s), 12) for s in range(5)])

###############################################################################
# On the edge state the witness gives exactly -gamma.
w = witness_from_basis(tiles, gamma)
print("Tr[W rho_edge] =", witness_value(w, edge_state(tiles)))

###############################################################################
# Mixing the GenTiles2 edge state with a uniform mixture of a stopper-containing
# subset of basis states: the witness value is lambda - gamma, so detection
# holds for lambda < gamma, and the rank climbs one step per added member.
gen = gentiles2_4x3_upb()
g2 = estimate_gamma(gen.projector(), gen.dims)
w2 = witness_from_basis(gen, g2)
print(f"GenTiles2 gamma {g2:.6f}")
for size in range(1, 8):
    subset = list(range(size - 1)) + [6]
    rho = sigma2_family(gen, subset, 0.1)
    print(f"subset size {size}: rank {rank(rho.mat):2d}, witness at lambda=0.01 "
          f"{witness_value(w2, sigma2_family(gen, subset, 0.01)):+.5f}")
