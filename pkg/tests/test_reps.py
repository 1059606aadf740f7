import numpy as np
import pytest
from numpy.testing import assert_allclose

from lieflow.groups import SU2_BASIS, GroupElement, exp_map, identity, mul_params, random_elements
from lieflow.reps import (
    casimir,
    conjugation_matrix,
    derived_rep,
    enumerate_weights,
    irrep,
    rep_matrices,
    rep_matrix,
)


def test_enumerate_examples(torus1, torus2, su2):
    assert [w.label for w in enumerate_weights(torus1, 2)] == [(0,), (-1,), (1,), (-2,), (2,)]
    assert [w.label for w in enumerate_weights(su2, 3)] == [(0,), (1,), (2,), (3,)]
    assert len(enumerate_weights(torus2, 1)) == 5
    assert enumerate_weights(torus1, -1) == []


def test_weights_sorted_by_norm(torus2):
    ws = enumerate_weights(torus2, 3)
    assert ws == sorted(ws)
    assert all(0 <= w.norm <= 3 for w in ws)
    assert ws[0].norm == 0


def test_label_validation(torus2, su2):
    with pytest.raises(ValueError):
        irrep(torus2, (1,))
    with pytest.raises(ValueError):
        irrep(su2, (-1,))


def test_dimensions_and_est1(su2, torus1):
    for w in enumerate_weights(su2, 16)[1:]:
        ir = irrep(su2, w.label)
        assert ir.dim == w.label[0] + 1
        assert ir.dim / w.norm <= 2
    for w in enumerate_weights(torus1, 10)[1:]:
        assert irrep(torus1, w.label).dim == 1


def test_torus_characters(torus1):
    theta = np.linspace(0, 2 * np.pi, 9)[:, None]
    assert_allclose(rep_matrices(irrep(torus1, (3,)), theta)[:, 0, 0], np.exp(3j * theta[:, 0]))
    assert_allclose(derived_rep(irrep(torus1, (3,))), [[[3j]]])


def test_identity_maps_to_identity(su2):
    for k in range(6):
        assert_allclose(rep_matrix(irrep(su2, (k,)), identity(su2)), np.eye(k + 1), atol=1e-14)


def test_defining_representation(su2, rng):
    ir = irrep(su2, (1,))
    assert_allclose(derived_rep(ir), SU2_BASIS, atol=1e-15)
    from lieflow.groups import su2_matrix_params

    pts = random_elements(su2, 10, rng)
    assert_allclose(rep_matrices(ir, pts), su2_matrix_params(pts), atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 4, 7, 12, 16])
def test_unitary_and_homomorphism(su2, rng, k):
    ir = irrep(su2, (k,))
    g = random_elements(su2, 20, rng)
    h = random_elements(su2, 20, rng)
    pg, ph = rep_matrices(ir, g), rep_matrices(ir, h)
    pgh = rep_matrices(ir, mul_params(su2, g, h))
    eye = np.eye(k + 1)
    assert np.abs(np.einsum("nji,njk->nik", pg.conj(), pg) - eye).max() < 1e-11
    assert np.abs(pgh - pg @ ph).max() < 1e-10


@pytest.mark.parametrize("k", [1, 2, 5, 10])
def test_derived_skew_hermitian_and_brackets(su2, k):
    d1, d2, d3 = derived_rep(irrep(su2, (k,)))
    for d in (d1, d2, d3):
        assert np.abs(d + d.conj().T).max() < 1e-12
    assert np.abs(d1 @ d2 - d2 @ d1 - d3).max() < 1e-12
    assert np.abs(d2 @ d3 - d3 @ d2 - d1).max() < 1e-12
    assert np.abs(d3 @ d1 - d1 @ d3 - d2).max() < 1e-12


def test_derived_rep_central_difference(su2):
    ir = irrep(su2, (4,))
    h = 1e-5
    for i, d in enumerate(derived_rep(ir)):
        v = np.zeros(3)
        v[i] = h
        fd = (rep_matrix(ir, exp_map(su2, v)) - rep_matrix(ir, exp_map(su2, -v))) / (2 * h)
        assert np.abs(fd - d).max() < 1e-8


@pytest.mark.parametrize("k", [0, 1, 2, 3, 8, 16])
def test_casimir_scalar(su2, k):
    ell = k / 2
    assert_allclose(casimir(irrep(su2, (k,))), -ell * (ell + 1) * np.eye(k + 1), atol=1e-10)


def test_torus_casimir(torus1, torus2):
    assert_allclose(casimir(irrep(torus1, (3,))), [[-9]])
    assert_allclose(casimir(irrep(torus2, (1, -2))), [[-5]])
    assert_allclose(casimir(irrep(torus1, (0,))), [[0]])


def test_est2_ratio_bounded(su2):
    ratios = []
    for k in range(1, 33):
        ell = k / 2
        hs2 = np.sum(np.abs(derived_rep(irrep(su2, (k,)))[2]) ** 2)
        assert hs2 == pytest.approx(ell * (ell + 1) * (2 * ell + 1) / 3)
        ratios.append(np.sqrt(hs2) / k ** 1.5)
    assert max(ratios) < 1
    assert abs(ratios[-1] - ratios[-2]) < 0.01


def test_conjugation_intertwiner(su2, rng):
    g = random_elements(su2, 5, rng)
    for k in (1, 2, 5):
        ir = irrep(su2, (k,))
        c = conjugation_matrix(ir)
        pi = rep_matrices(ir, g)
        assert np.abs(pi.conj() - c @ pi @ np.linalg.inv(c)).max() < 1e-12
