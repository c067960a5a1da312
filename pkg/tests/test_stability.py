import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reskit.basis import harmonic_basis, poly_basis_1d
from reskit.errors import InvalidArgument
from reskit.geometry import Tag, UnitDisk, boundary_points, chebyshev_nodes
from reskit.stability import (
    greedy_norming_set, lab_csv, lebesgue_constant, stability_l2, stability_lab, stability_sup,
)

FINE = np.linspace(-1, 1, 2001)


def lagrange_lebesgue(nodes, fine):
    """Direct product-form Lagrange basis; independent of the barycentric code."""
    x = np.asarray(nodes, float)
    total = np.zeros_like(fine)
    for i in range(len(x)):
        li = np.ones_like(fine)
        for j in range(len(x)):
            if j != i:
                li *= (fine - x[j]) / (x[i] - x[j])
        total += np.abs(li)
    return float(total.max())


def test_linears_endpoint_samples():
    r = stability_sup(poly_basis_1d(2), np.array([-1.0, 1.0]), FINE)
    assert r.C == pytest.approx(1.0, abs=1e-9) and r.method == "lp_exact"


def test_linears_inner_samples():
    assert stability_sup(poly_basis_1d(2), np.array([-0.5, 0.5]), FINE).C == pytest.approx(2.0, abs=1e-9)
    over = stability_sup(poly_basis_1d(2), np.array([-0.5, 0.0, 0.5]), FINE)
    assert over.C == pytest.approx(2.0, abs=1e-9)


def test_lebesgue_examples():
    assert lebesgue_constant(np.array([-1.0, 1.0]), FINE) == pytest.approx(1.0, abs=1e-12)
    assert lebesgue_constant(np.array([-1.0, 0.0, 1.0]), FINE) == pytest.approx(1.25, abs=1e-9)
    assert lebesgue_constant(chebyshev_nodes(20), FINE) <= 2 / math.pi * math.log(20) + 1.1
    with pytest.raises(InvalidArgument):
        lebesgue_constant(np.array([0.0, 0.0]), FINE)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31 - 1))
def test_lebesgue_barycentric_matches_lagrange(M, seed):
    x = np.sort(np.random.default_rng(seed).uniform(-1, 1, M))
    if np.diff(x).min() < 0.05:
        return
    ref = lagrange_lebesgue(x, FINE)
    assert lebesgue_constant(x, FINE) == pytest.approx(ref, rel=1e-9)


def test_square_case_equals_lebesgue(rng):
    for M in (3, 7, 12):
        x = np.sort(rng.uniform(-1, 1, M))
        fine = np.union1d(FINE, x)
        assert stability_sup(poly_basis_1d(M), x, fine).C == pytest.approx(
            lebesgue_constant(x, fine), rel=1e-8)


def test_c_at_least_one_and_identity():
    x = chebyshev_nodes(9)
    assert stability_sup(poly_basis_1d(5), x, FINE).C >= 1.0
    assert stability_sup(poly_basis_1d(5), x, x).C == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_adding_samples_never_increases_c(seed):
    rng = np.random.default_rng(seed)
    x = np.unique(np.round(rng.uniform(-1, 1, 8), 4))
    extra = np.unique(np.append(x, np.round(rng.uniform(-1, 1, 3), 4)))
    fine = np.union1d(np.round(np.linspace(-1, 1, 401), 4), extra)
    b = poly_basis_1d(4)
    assert stability_sup(b, extra, fine).C <= stability_sup(b, x, fine).C * (1 + 1e-9)


def test_fine_grid_refinement_converges():
    x = chebyshev_nodes(24)
    b = poly_basis_1d(8)
    c1 = stability_sup(b, x, np.linspace(-1, 1, 16 * 24)).C
    c2 = stability_sup(b, x, np.linspace(-1, 1, 32 * 24)).C
    assert abs(c2 - c1) / c1 < 0.01


def test_stability_l2():
    x = np.linspace(-1, 1, 40)
    assert stability_l2(poly_basis_1d(6), x, None, x, None).C == pytest.approx(1.0, abs=1e-10)
    r = stability_l2(poly_basis_1d(1), chebyshev_nodes(7), None, FINE, None)
    assert r.C == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidArgument):
        stability_l2(poly_basis_1d(2), x, -np.ones(40), FINE, None)


def test_stability_l2_nested_sets_monotone(rng):
    b = poly_basis_1d(5)
    pts = rng.uniform(-1, 1, 40)
    fine = np.linspace(-1, 1, 500)
    # unnormalized unit weights: sigma_min grows as rows are added
    cs = [stability_l2(b, pts[:n], np.ones(n), fine, None).C for n in range(6, 41, 5)]
    assert all(b2 <= a2 * (1 + 1e-12) for a2, b2 in zip(cs, cs[1:]))


def test_greedy_linears():
    cand = np.linspace(-1, 1, 33)
    r = greedy_norming_set(poly_basis_1d(2), cand, 2.0)
    assert r.report.C == pytest.approx(1.0, abs=1e-9)
    assert len(r.indices) == 2 and sorted(r.indices) == [0, 32]
    assert r.flags == []


def test_greedy_target_missed():
    cand = np.linspace(-0.9, 0.9, 60)
    r = greedy_norming_set(poly_basis_1d(3), cand, 1.0, budget=4)
    assert "target-missed" in r.flags and len(r.indices) <= 4


def test_greedy_harmonic_disk():
    cand = boundary_points(UnitDisk(), 512)
    r = greedy_norming_set(harmonic_basis(6), cand, 2.0, 8 * 13)
    assert r.report.C <= 2 and not r.flags
    assert r.points.tag is Tag.BOUNDARY


def test_greedy_needs_dense_candidates():
    with pytest.raises(InvalidArgument):
        greedy_norming_set(poly_basis_1d(4), np.linspace(-1, 1, 20))


def test_lab_small_and_csv():
    reps = stability_lab("chebyshev", [3, 5], "pi")
    assert [r.N for r in reps] == [10, 16]
    text = lab_csv(reps)
    assert text.splitlines()[0] == "family,M,N,oversampling,C,method,fine_grid_size"
    assert len(text.splitlines()) == 3


@pytest.mark.parametrize("bad", [dict(orders=[]), dict(orders=[5, 3]), dict(oversampling="cube"),
                                 dict(family="legendre")])
def test_lab_rejects_bad_arguments(bad):
    kw = dict(family="chebyshev", orders=[3, 4], oversampling="none") | bad
    with pytest.raises(InvalidArgument):
        stability_lab(**kw)
