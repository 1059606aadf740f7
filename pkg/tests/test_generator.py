import numpy as np
import pytest
import scipy.integrate
from numpy.testing import assert_allclose

from lieflow.errors import AtomAtIdentity, NonConstantCharacteristics
from lieflow.fourier import constant, evaluate, left_translate
from lieflow.generator import (
    Characteristics,
    LevyMeasure,
    ModulatedKernel,
    PowerDensity,
    apply_generator,
    compensator_H,
    hunt_apply,
    levy_integrability_check,
    satisfies_continuity,
    validate_characteristics,
    vanishes_at_infinity,
)
from lieflow.groups import Chart, GroupElement, exp_map, identity, mul_params, random_elements
from lieflow.library import cos_theta
from lieflow.pmp import random_test_functions


def test_integrability_single_atom(torus1):
    rep = levy_integrability_check(LevyMeasure.atoms(torus1, [(2.0, [1.0])]), Chart())
    assert rep.small_jump_integral == pytest.approx(2.0)
    assert rep.tail_mass == 0.0
    assert rep.ok


def test_atom_outside_chart_counts_as_tail(torus1):
    rep = levy_integrability_check(LevyMeasure.atoms(torus1, [(0.5, [3.0])]))
    assert rep.small_jump_integral == 0.0
    assert rep.tail_mass == pytest.approx(0.5)


def test_atom_at_identity(torus1, su2):
    with pytest.raises(AtomAtIdentity):
        levy_integrability_check(LevyMeasure.atoms(torus1, [(1.0, [0.0])]))
    char = Characteristics(su2, mu=LevyMeasure.atoms(su2, [(1.0, [0, 0, 0])]))
    with pytest.raises(AtomAtIdentity):
        apply_generator(char, cos_theta(su2), identity(su2))


def test_power_density_second_moment(torus1):
    dens = PowerDensity(alpha=1.5, eps=1e-3)
    rep = levy_integrability_check(LevyMeasure(torus1, density=dens))
    r = Chart().radius
    oracle = 2 * scipy.integrate.quad(lambda x: x**2 * x**-2.5, 1e-3, r, points=[0.01, 0.1, 1])[0]
    assert rep.small_jump_integral == pytest.approx(oracle, rel=1e-10)
    assert rep.ok
    assert rep.truncated_second_moment == pytest.approx(2 * (1e-3) ** 0.5 / 0.5)


def test_power_density_su2_mass(su2):
    dens = PowerDensity(alpha=1.0, eps=0.05, outer=1.0)
    jumps = LevyMeasure(su2, density=dens).discretize(Chart())
    # mass = 4 pi int_eps^1 r^2 r^-4 dr
    assert jumps.total_mass == pytest.approx(4 * np.pi * (1 / 0.05 - 1), rel=1e-10)
    assert_allclose(jumps.first_moment, 0.0, atol=1e-9)


def test_compensator_examples(torus1, su2, rng):
    f = cos_theta(torus1)
    g0 = identity(torus1)
    for t in (0.3, 1.0, 2.5):
        assert compensator_H(f, g0, exp_map(torus1, [t])) == pytest.approx(np.cos(t) - 1)
    one = constant(su2, 1.0)
    g = GroupElement(su2, random_elements(su2, 1, rng)[0])
    assert compensator_H(one, g, exp_map(su2, [0.3, 0.1, 0.2])) == pytest.approx(0.0, abs=1e-15)
    f = random_test_functions(su2, 1, 3)[0]
    assert compensator_H(f, g, identity(su2)) == pytest.approx(0.0, abs=1e-14)


def test_compensator_second_order(su2, rng):
    f = random_test_functions(su2, 1, 5)[0]
    g = GroupElement(su2, random_elements(su2, 1, rng)[0])
    v = rng.normal(size=3)
    ratios = []
    for s in (0.1, 0.05, 0.025, 0.0125):
        h = compensator_H(f, g, exp_map(su2, s * v))
        ratios.append(abs(h) / (s**2 * v @ v))
    assert max(ratios) < 2 * max(ratios[0], 1e-3)
    assert abs(ratios[-1] - ratios[-2]) < 0.1 * ratios[-1] + 1e-6


def test_apply_constant_function(su2, rng):
    char = Characteristics(su2, c=0.4, b=[1, 2, 3], a=np.eye(3), mu=LevyMeasure.atoms(su2, [(1, [0.2, 0, 1])]))
    pts = random_elements(su2, 5, rng)
    assert_allclose(apply_generator(char, constant(su2, 1.0), pts), -0.4, atol=1e-13)


def test_heat_on_cosine(torus1):
    s = np.linspace(0, 2 * np.pi, 11)[:, None]
    out = apply_generator(Characteristics(torus1, a=[[1.0]]), cos_theta(torus1), s)
    assert_allclose(out, -np.cos(s[:, 0]), atol=1e-14)


def test_single_atom_hand_formula_and_quadrature(torus1):
    w, t0 = 0.8, 1.3
    char = Characteristics(torus1, mu=LevyMeasure.atoms(torus1, [(w, [t0])]))
    f = cos_theta(torus1)
    s = np.linspace(0, 6, 13)
    out = apply_generator(char, f, s[:, None])
    assert_allclose(out, w * (np.cos(s + t0) - np.cos(s) + t0 * np.sin(s)), atol=1e-14)
    brute = [w * compensator_H(f, GroupElement(torus1, [x]), exp_map(torus1, [t0])) for x in s]
    assert_allclose(out, brute, atol=1e-14)


def test_density_jump_part_against_quadrature(torus1):
    dens = PowerDensity(alpha=0.8, eps=0.01, outer=2.0, scale=0.5, n_radial=64)
    char = Characteristics(torus1, mu=LevyMeasure(torus1, density=dens))
    f = random_test_functions(torus1, 1, 11)[0]
    for s in (0.2, 2.0, 4.4):
        g = GroupElement(torus1, [s])

        def integrand(x):
            return compensator_H(f, g, exp_map(torus1, [x])) * 0.5 * abs(x) ** -1.8

        oracle = sum(scipy.integrate.quad(integrand, a, b, limit=200)[0] for a, b in [(-2, -0.01), (0.01, 2)])
        assert apply_generator(char, f, g) == pytest.approx(oracle, rel=1e-9)


def test_linearity(su2, rng):
    char = Characteristics(su2, c=0.2, b=[0.1, -0.2, 0.3], a=np.diag([1, 2, 3.0]),
                           mu=LevyMeasure.atoms(su2, [(0.5, [1, 0, 0.5])]))
    f, g = random_test_functions(su2, 2, 1)
    pts = random_elements(su2, 6, rng)
    lhs = apply_generator(char, f * 2.0 + g * -3.0, pts)
    rhs = 2 * apply_generator(char, f, pts) - 3 * apply_generator(char, g, pts)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_hunt_left_invariance(su2, rng):
    char = Characteristics(su2, c=0.1, b=[0.3, 0.0, -0.5], a=np.array([[1, 0.2, 0], [0.2, 0.5, 0], [0, 0, 0.3]]),
                           mu=LevyMeasure.atoms(su2, [(0.7, [0.4, 1.0, -0.2]), (0.2, [0, 0, 2.9])]))
    f = random_test_functions(su2, 1, 2)[0]
    for _ in range(5):
        g = GroupElement(su2, random_elements(su2, 1, rng)[0])
        s = random_elements(su2, 1, rng)
        lhs = hunt_apply(char, left_translate(f, g), s)
        rhs = hunt_apply(char, f, mul_params(su2, g.params[None], s))
        assert abs(lhs[0] - rhs[0]) < 1e-9
        assert hunt_apply(char, f, s)[0] == pytest.approx(apply_generator(char, f, s)[0], abs=1e-12)


def test_hunt_rejects_variable_fields(torus1):
    char = Characteristics(torus1, c=cos_theta(torus1) * 0.5 + constant(torus1, 1.0))
    assert not char.is_constant
    with pytest.raises(NonConstantCharacteristics):
        hunt_apply(char, cos_theta(torus1), identity(torus1))


def test_variable_and_modulated(torus1):
    cvar = cos_theta(torus1) * 0.5 + constant(torus1, 1.0)
    mod = ModulatedKernel(LevyMeasure.atoms(torus1, [(1.0, [1.0])]), lambda p: 2 + np.sin(p[..., 0]))
    char = Characteristics(torus1, c=cvar, b=lambda p: np.cos(p), mu=mod)
    f = cos_theta(torus1)
    s = np.linspace(0, 6, 7)
    expected = -(1 + 0.5 * np.cos(s)) * np.cos(s) + np.cos(s) * -np.sin(s)
    expected += (2 + np.sin(s)) * (np.cos(s + 1) - np.cos(s) + np.sin(s))
    assert_allclose(apply_generator(char, f, s[:, None]), expected, atol=1e-13)
    assert not char.is_constant


def test_validation_predicates(su2, rng):
    pts = random_elements(su2, 10, rng)
    good = Characteristics(su2, c=0.1, a=np.eye(3))
    assert validate_characteristics(good, pts) == []
    assert satisfies_continuity(good) and vanishes_at_infinity(good)
    bad = Characteristics(su2, c=-0.1, a=np.diag([1, -1, 1.0]), mu=LevyMeasure.atoms(su2, [(-1, [1, 0, 0])]))
    issues = validate_characteristics(bad, pts)
    assert len(issues) == 3
