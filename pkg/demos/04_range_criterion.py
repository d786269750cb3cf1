"""
Range criterion and uncompletable product bases
===============================================

A separable state's range is spanned by product vectors. For real states
equal to their own partial transpose it is enough to look for real product
vectors in the range. Edge states have none at all; other states can have
too few.
"""

from belab import edge_state, gentiles2_4x3_upb, tiles_upb
from belab.catalog import rho3_family, sigma1_family, tiles_plus_partners
from belab.range_criterion import check_range_criterion, product_search, range_projector, ucpb_evidence

###############################################################################
# sigma1 has rank 6, and six explicit product states span its range.
report = check_range_criterion(sigma1_family()(0.1), tiles_plus_partners())
print("sigma1(0.1):", report.verdict, "rank", report.state_rank)

###############################################################################
# A product search inside the range of the Tiles edge state: the best overlap
# stays well below 1.
rho = edge_state(tiles_upb())
search = product_search(range_projector(rho), rho.dims)
print(f"Tiles edge: found {len(search.found)} product vectors, best overlap {search.best_overlap:.5f}")

###############################################################################
# Tiles embedded in 4x3 and mixed with a product state outside the 3x3 block:
# the search finds that one vector and nothing else, far short of rank 5.
for lam in (0.1, 0.5, 0.9):
    rho3 = rho3_family(41)(lam)
    search = product_search(range_projector(rho3), rho3.dims)
    report = check_range_criterion(rho3, search.vectors, from_search=True)
    print(f"rho3 at {lam}: {len(search.found)} found, span {report.span_rank_of_candidates}"
          f"/{report.state_rank}: {report.verdict}")

###############################################################################
# Dropping one member of GenTiles2. Without phi1 the complement is still
# entangled (the Choi detector fires), so the remaining six states cannot be
# completed. Without the stopper a completion exists and is found.
gen = gentiles2_4x3_upb()
for k in (0, 6):
    ev = ucpb_evidence(gen.without(k))
    print(f"{ev.label}: choi-u {ev.choi_u:+.5f}, {ev.orthogonal_count} orthogonal product "
          f"vectors of {ev.complement_dim} needed, completable {ev.completable}")
