"""
Detecting PPT entanglement with the Choi map
============================================

The Choi map is positive but not completely positive. Lifted onto party B
(after a fixed local rotation) it gives a minimum eigenvalue that is
non-negative on every separable state, so a negative value certifies
entanglement even though the partial transpose test is blind.
"""

import numpy as np

from belab import choi_u_detect, edge_state, gentiles2_4x3_upb, tiles_upb
from belab.catalog import family_from_selector
from belab.certify import make_detector, sweep

###############################################################################
# Both edge states are detected.
for upb in (tiles_upb(), gentiles2_4x3_upb()):
    print(f"{upb.label:10s} choi-u value {choi_u_detect(edge_state(upb)):+.6f}")

###############################################################################
# Mixing in noise, lambda * noise + (1 - lambda) * edge, the detection
# survives only up to some threshold. Sweep three families on a 0.005 grid
# and refine the crossing by bisection.
grid = np.linspace(0.0, 1.0, 201)
detector = make_detector("choi-u")
for selector, noise in [("rho1:1", "Tiles member |psi_1>"), ("rho2", "maximally mixed state"),
                        ("sigma1", "GenTiles2 stopper")]:
    result = sweep(family_from_selector(selector), grid, detector)
    print(f"{selector:7s} noise = {noise:22s} sign changes {result.sign_changes}, {result.summary()}")

###############################################################################
# A text rendering of the rho2 curve near its crossing.
result = sweep(family_from_selector("rho2"), np.linspace(0, 0.12, 13), detector)
for lam, value in zip(result.lambdas, result.values):
    bar = "#" * int(round(abs(value) * 4000))
    print(f"{lam:5.2f} {value:+.5f} {'-' if value < 0 else '+'}{bar}")
