"""Tests for the range criterion, the product search and completions."""

import numpy as np
import pytest

from belab.catalog import (
    DensityMatrix,
    ProductVector,
    edge_state,
    maximally_mixed,
    product,
    rho3_family,
    sigma1_family,
    tiles_completion,
    tiles_plus_partners,
)
from belab.linalg import rank
from belab.range_criterion import (
    check_range_criterion,
    product_search,
    range_projector,
    ucpb_evidence,
    verify_completion,
)
from conftest import bell_state


def _computational(dims):
    d1, d2 = dims
    return [ProductVector(np.eye(d1)[i], np.eye(d2)[j]) for i in range(d1) for j in range(d2)]


def test_range_projector_rank(tiles_edge):
    p = range_projector(tiles_edge)
    assert np.trace(p) == pytest.approx(4.0, abs=1e-10)
    np.testing.assert_allclose(p @ tiles_edge.mat, tiles_edge.mat, atol=1e-12)


def test_maximally_mixed_satisfied():
    rho = maximally_mixed((3, 3))
    report = check_range_criterion(rho, _computational((3, 3)))
    assert report.verdict == "satisfied-by-candidates"
    assert report.state_rank == 9 and report.span_rank_of_candidates == 9


def test_sigma1_partners_satisfy():
    rho = sigma1_family()(0.1)
    report = check_range_criterion(rho, tiles_plus_partners())
    assert report.verdict == "satisfied-by-candidates"
    assert report.state_rank == 6


def test_edge_states_insufficient(tiles_edge, gentiles2_edge):
    for rho in (tiles_edge, gentiles2_edge):
        assert check_range_criterion(rho, _computational(rho.dims)).verdict == "candidates-insufficient"
        assert check_range_criterion(rho, []).verdict == "candidates-insufficient"


def test_tiles_edge_search_finds_nothing(tiles, tiles_edge):
    res = product_search(range_projector(tiles_edge), tiles_edge.dims, restarts=50)
    assert res.found == []
    assert res.best_overlap < 0.99
    report = check_range_criterion(tiles_edge, res.vectors, from_search=True)
    assert report.verdict == "candidates-insufficient"


def test_rho3_search_deficit():
    rho = rho3_family(41)(0.5)
    res = product_search(range_projector(rho), rho.dims, restarts=100)
    assert 1 <= len(res.found) < 5
    report = check_range_criterion(rho, res.vectors, from_search=True)
    assert report.verdict == "product-deficit-evidence"
    assert report.span_rank_of_candidates < report.state_rank == 5


def test_product_search_deterministic_and_canonical():
    rho = rho3_family(41)(0.3)
    p = range_projector(rho)
    a = product_search(p, rho.dims, restarts=30, seed=5)
    b = product_search(p, rho.dims, restarts=30, seed=5)
    assert len(a.found) == len(b.found)
    for (u, ou), (v, ov) in zip(a.found, b.found):
        np.testing.assert_array_equal(u.vector, v.vector)
        assert ou == ov


def test_product_search_full_space_finds_many():
    res = product_search(np.eye(4), (2, 2), restarts=10)
    assert len(res.found) >= 1
    assert all(o > 1 - 1e-8 for _, o in res.found)


def test_product_search_rejects_non_projector():
    with pytest.raises(ValueError):
        product_search(0.5 * np.eye(4), (2, 2))


def test_non_pt_invariant_rejected():
    with pytest.raises(ValueError, match="two-sided"):
        check_range_criterion(bell_state(), _computational((2, 2)))


def test_candidate_dims_checked(tiles_edge):
    with pytest.raises(ValueError):
        check_range_criterion(tiles_edge, [product((4, 3), 1, 1)])


def test_tiles_completion(tiles):
    assert verify_completion(tiles.without(4), tiles_completion())
    assert not verify_completion(tiles, tiles_completion())
    assert not verify_completion(tiles.without(4), tiles_completion()[:4])


def test_gentiles2_completion(gentiles2):
    assert verify_completion(gentiles2.without(6), tiles_plus_partners())
    assert not verify_completion(gentiles2, tiles_plus_partners()[:5])


def test_full_upb_not_completable(tiles, gentiles2):
    # nothing orthogonal can be added to a UPB by a product vector
    for basis in (tiles, gentiles2):
        extra = [product(basis.dims, 1, 1)] * (basis.total_dim - len(basis))
        assert not verify_completion(basis, extra)
        assert rank(edge_state(basis).mat) == basis.total_dim - len(basis)


def test_ucpb_minus_first_is_uncompletable(gentiles2):
    ev = ucpb_evidence(gentiles2.without(0), restarts=100)
    assert ev.entangled
    assert ev.choi_u < -1e-8
    assert not ev.completable
    assert ev.complement_dim == 6
    assert ev.deficit


def test_ucpb_minus_stopper_is_completable(gentiles2):
    ev = ucpb_evidence(gentiles2.without(6), restarts=100)
    assert ev.completable
    assert not ev.entangled
    assert ev.orthogonal_count == 6


def test_ucpb_to_dict(tiles):
    ev = ucpb_evidence(tiles.without(4), restarts=60)
    d = ev.to_dict()
    assert d["completable"] is True
    assert d["complement_dim"] == 5
    assert isinstance(ev.complement_state, DensityMatrix)
