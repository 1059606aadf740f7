import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from lieflow.errors import GroupMismatch, OutOfChart
from lieflow.groups import (
    SU2_BASIS,
    Chart,
    GroupElement,
    GroupId,
    as_matrix,
    canonical_coords,
    exp_map,
    haar_quadrature,
    identity,
    inverse,
    multiply,
    random_elements,
    random_in_chart,
    resolution_rule,
)
from lieflow.reps import irrep, rep_matrices


def test_torus_product_adds_angles(torus1):
    g = exp_map(torus1, [np.pi / 2])
    assert_allclose(multiply(g, g).params, [np.pi])


def test_product_with_inverse_is_identity(su2, rng):
    for p in random_elements(su2, 20, rng):
        g = GroupElement(su2, p)
        assert_allclose(as_matrix(multiply(g, inverse(g))), np.eye(2), atol=1e-12)


def test_su2_half_turns_give_minus_identity(su2):
    g = exp_map(su2, [0, 0, np.pi])
    oracle = scipy.linalg.expm(np.pi * SU2_BASIS[2])
    assert_allclose(as_matrix(g), oracle, atol=1e-14)
    assert_allclose(as_matrix(multiply(g, g)), -np.eye(2), atol=1e-14)


def test_group_mismatch(torus1, su2):
    with pytest.raises(GroupMismatch):
        multiply(identity(torus1), identity(su2))


def test_exp_of_zero_and_torus_angle(torus1, su2):
    assert_allclose(exp_map(su2, [0, 0, 0]).params, [1, 0, 0, 0])
    assert_allclose(exp_map(torus1, [7.0]).params, [7.0 - 2 * np.pi])


@pytest.mark.parametrize("t", [0.3, 1.7, 3.0])
def test_exp_x3_matches_matrix_exponential(su2, t):
    expected = np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    assert_allclose(as_matrix(exp_map(su2, [0, 0, t])), expected, atol=1e-14)


def test_exp_matches_expm_on_random_vectors(su2, rng):
    for v in rng.normal(size=(20, 3)) * 2:
        oracle = scipy.linalg.expm(np.einsum("i,iab->ab", v, SU2_BASIS))
        assert_allclose(as_matrix(exp_map(su2, v)), oracle, atol=1e-13)


def test_basis_brackets():
    x1, x2, x3 = SU2_BASIS
    assert_allclose(x1 @ x2 - x2 @ x1, x3, atol=1e-15)
    assert_allclose(x2 @ x3 - x3 @ x2, x1, atol=1e-15)


def test_one_parameter_subgroup(su2, rng):
    v = rng.normal(size=3)
    s, t = 0.4, 1.1
    lhs = exp_map(su2, (s + t) * v)
    rhs = multiply(exp_map(su2, s * v), exp_map(su2, t * v))
    assert_allclose(as_matrix(lhs), as_matrix(rhs), atol=1e-13)


def test_canonical_coords_round_trip_and_antisymmetry(su2, torus2, rng):
    chart = Chart()
    for group in (su2, torus2):
        assert_allclose(canonical_coords(identity(group)), 0.0, atol=1e-15)
        for v in random_in_chart(group, 50, chart.radius * 0.999, rng):
            g = exp_map(group, v)
            assert_allclose(canonical_coords(g, chart), v, atol=1e-12)
            assert_allclose(canonical_coords(inverse(g), chart), -v, atol=1e-12)


def test_out_of_chart(su2, torus1):
    with pytest.raises(OutOfChart):
        canonical_coords(exp_map(torus1, [3.0]))
    with pytest.raises(OutOfChart):
        canonical_coords(exp_map(su2, [0, 0, 2 * np.pi]))


def test_chart_radius_bounds():
    with pytest.raises(ValueError):
        Chart(np.pi)
    assert Chart().radius == pytest.approx(0.9 * np.pi)


@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9))
@settings(max_examples=40, deadline=None)
def test_su2_group_axioms(vals):
    su2 = GroupId.su2()
    g, h, k = (exp_map(su2, vals[i:i + 3]) for i in (0, 3, 6))
    assert_allclose(as_matrix(multiply(multiply(g, h), k)), as_matrix(multiply(g, multiply(h, k))), atol=1e-12)
    assert_allclose(as_matrix(multiply(g, identity(su2))), as_matrix(g), atol=1e-15)
    assert abs(np.linalg.norm(multiply(g, h).params) - 1) < 1e-12


@pytest.mark.parametrize("group", [GroupId.torus(1), GroupId.torus(2), GroupId.su2()], ids=str)
@pytest.mark.parametrize("resolution", [1, 4, 9])
def test_quadrature_weights_normalised(group, resolution):
    q = haar_quadrature(group, resolution)
    assert abs(q.weights.sum() - 1) < 1e-14
    assert sum(1 for _ in q) == len(q)


def test_quadrature_odd_harmonic_vanishes(torus1):
    q = haar_quadrature(torus1, 16)
    assert abs(q.integrate(np.cos(q.points[:, 0]))) < 1e-15


def test_schur_orthogonality_against_dense_quadrature(su2):
    ir = irrep(su2, (2,))
    q = haar_quadrature(su2, resolution_rule(su2, 2))
    dense = haar_quadrature(su2, 2 * resolution_rule(su2, 2))
    for quad in (q, dense):
        pi = rep_matrices(ir, quad.points)
        gram = np.einsum("n,nij->ij", quad.weights, np.abs(pi) ** 2)
        assert_allclose(gram, np.full((3, 3), 1 / 3), atol=1e-13)


def test_coordinate_functions_integrate_to_zero(su2):
    q = haar_quadrature(su2, 12)
    for k in range(1, 9):
        pi = rep_matrices(irrep(su2, (k,)), q.points)
        assert np.abs(np.einsum("n,nij->ij", q.weights, pi)).max() < 1e-10


def test_haar_samples_are_left_invariant_in_mean(su2, rng):
    # E[pi(g)] = 0 for nontrivial irreps under Haar sampling
    pts = random_elements(su2, 200_000, rng)
    mean = rep_matrices(irrep(su2, (1,)), pts).mean(axis=0)
    assert np.abs(mean).max() < 5 / np.sqrt(200_000)
