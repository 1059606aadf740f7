import numpy as np
import pytest
from numpy.testing import assert_allclose

from lieflow.errors import InfiniteJumpMass, NonConstantCharacteristics
from lieflow.fourier import constant, evaluate
from lieflow.generator import Characteristics, LevyMeasure, PowerDensity
from lieflow.groups import GroupElement, exp_map, log_params, mul_params, random_elements
from lieflow.library import bump_values, cos_theta
from lieflow.pmp import random_test_functions
from lieflow.simulate import PathConfig, empirical_semigroup, simulate_paths, small_time_limit
from lieflow.symbol import assemble_symbol, evolve_semigroup


def test_config_validation():
    for bad in (dict(t_end=0), dict(t_end=1, steps=0), dict(t_end=1, n_paths=0), dict(t_end=1, seed=-1)):
        with pytest.raises(ValueError):
            PathConfig(**bad)


def test_pure_drift_is_exact(torus2, su2):
    ens = simulate_paths(Characteristics(torus2, b=[0.3, -1.0]), PathConfig(2.0, 1, 10))
    assert_allclose(ens.points, np.mod([[0.6, -2.0]], 2 * np.pi).repeat(10, 0), atol=1e-14)
    ens = simulate_paths(Characteristics(su2, b=[0.2, 0.1, -0.3]), PathConfig(1.5, 7, 4))
    target = exp_map(su2, [0.3, 0.15, -0.45]).params
    assert_allclose(ens.points, np.tile(target, (4, 1)), atol=1e-13)


def test_killing_standard_error(torus1):
    ens = simulate_paths(Characteristics(torus1, c=0.5), PathConfig(1.0, 1, 40_000, seed=2))
    p = np.exp(-0.5)
    se = np.sqrt(p * (1 - p) / 40_000)
    assert abs(ens.surviving_fraction - p) < 3 * se
    est, err = empirical_semigroup(constant(torus1, 1.0), ens)
    assert est == pytest.approx(ens.surviving_fraction)
    assert err == pytest.approx(se, rel=0.05)


def test_constant_function_without_killing(su2):
    char = Characteristics(su2, a=np.eye(3), mu=LevyMeasure.atoms(su2, [(1, [0.3, 0, 0])]))
    est, se = empirical_semigroup(constant(su2, 1.0), simulate_paths(char, PathConfig(0.5, 5, 100)))
    assert est == pytest.approx(1.0) and se == 0.0


def test_diffusion_variance(torus1):
    ens = simulate_paths(Characteristics(torus1, a=[[0.01]]), PathConfig(1.0, 1, 50_000, seed=5))
    x = log_params(torus1, ens.points)[:, 0]
    n = len(x)
    assert abs(x.var() - 0.02) < 3 * 0.02 * np.sqrt(2 / n)


@pytest.mark.parametrize("name", ["torus1", "su2"])
def test_matches_spectral_evolution(name, request):
    group = request.getfixturevalue(name)
    mu = LevyMeasure.atoms(group, [(0.8, np.full(group.dim, 0.7)), (0.4, -np.linspace(0.2, 1.0, group.dim))])
    char = Characteristics(group, c=0.2, b=np.linspace(-0.3, 0.3, group.dim), a=0.3 * np.eye(group.dim), mu=mu)
    f = random_test_functions(group, 1, 3, max_norm=3)[0]
    t, start = 0.6, GroupElement(group, random_elements(group, 1, np.random.default_rng(0))[0])
    exact = evolve_semigroup(assemble_symbol(char, 3), f, t)
    steps = 1 if group.is_torus else 200
    est, se = empirical_semigroup(f, simulate_paths(char, PathConfig(t, steps, 40_000, seed=11), start))
    assert abs(est - evaluate(exact, start)) < 3 * se + (0 if group.is_torus else 5e-3)


def test_small_time_jump_limit(torus1):
    w, tau = [0.7, 0.3], [1.5, -2.0]
    char = Characteristics(torus1, mu=LevyMeasure.atoms(torus1, [(wk, [tk]) for wk, tk in zip(w, tau)]))

    def f(p):
        return bump_values(torus1, p, 0.5, [1.5]) + 2 * bump_values(torus1, p, 0.5, [-2.0])

    target = 0.7 * 1 + 0.3 * 2
    for t, est, se in small_time_limit(char, f, None, [1e-2, 1e-3], n_paths=200_000, seed=4):
        assert abs(est - target) < 3 * se + 2 * t


def test_left_invariance_of_law(su2):
    char = Characteristics(su2, b=[0.1, 0, 0.3], a=0.2 * np.eye(3), mu=LevyMeasure.atoms(su2, [(0.5, [0, 1, 0])]))
    g = exp_map(su2, [0.4, -1.0, 0.2])
    cfg = PathConfig(0.4, 10, 300, seed=8)
    from_e = simulate_paths(char, cfg)
    from_g = simulate_paths(char, cfg, start=g)
    assert_allclose(from_g.points, mul_params(su2, g.params[None], from_e.points), atol=1e-12)


def test_thread_independence(su2):
    char = Characteristics(su2, c=0.3, a=np.eye(3), mu=LevyMeasure.atoms(su2, [(1.0, [0.5, 0.5, 0])]))
    cfg = PathConfig(0.3, 3, 20_000, seed=123)
    one = simulate_paths(char, cfg, threads=1)
    four = simulate_paths(char, cfg, threads=4)
    assert one.points.tobytes() == four.points.tobytes()
    assert np.array_equal(one.alive, four.alive)
    other = simulate_paths(char, PathConfig(0.3, 3, 20_000, seed=124))
    assert not np.array_equal(one.points, other.points)


def test_rejections(torus1):
    with pytest.raises(NonConstantCharacteristics):
        simulate_paths(Characteristics(torus1, c=cos_theta(torus1)), PathConfig(1.0))
    with pytest.raises(InfiniteJumpMass):
        char = Characteristics(torus1, mu=LevyMeasure.atoms(torus1, [(np.inf, [1.0])]))
        simulate_paths(char, PathConfig(1.0))
    with pytest.raises(ValueError):
        simulate_paths(Characteristics(torus1, mu=LevyMeasure.atoms(torus1, [(-1.0, [1.0])])), PathConfig(1.0))


def test_density_paths_run(torus1):
    char = Characteristics(torus1, mu=LevyMeasure(torus1, density=PowerDensity(1.0, 0.1, outer=1.0)))
    ens = simulate_paths(char, PathConfig(0.2, 1, 1000))
    assert ens.points.shape == (1000, 1)
