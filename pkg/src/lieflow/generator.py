"""Levy-type operators built from characteristics (c, b, a, mu).

For a band-limited ``f`` the operator is::

    Af(s) = -c(s) f(s) + sum_i b_i(s) X_i f(s) + sum_jk a_jk(s) X_j X_k f(s)
            + int [f(s t) - f(s) - sum_i x_i(t) X_i f(s)] mu(s, dt)

There is no factor 1/2 on the second-order term.  The canonical coordinates
``x_i`` in the compensator are extended by zero outside the chart (hard
cutoff), so ``b`` is always quoted in that convention.

Levy measures are finite sums of atoms plus an optional radial power density
``scale * |x|^-(dim + alpha)`` on chart coordinates, truncated to
``eps < |x| < outer`` and discretised by a fixed product quadrature.  After
discretisation every measure is a weighted point set (:class:`Jumps`), which
is what the generator, the symbol and the simulator all consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.special

from .errors import AtomAtIdentity, NonConstantCharacteristics
from .fourier import FourierCoefficients, _points, evaluate, jet
from .groups import (
    Chart,
    GroupElement,
    GroupId,
    compensator_coords_params,
    distance_to_identity,
    exp_params,
    mul_params,
)


@dataclass(frozen=True)
class PowerDensity:
    """Radial density ``scale * |x|^-(dim + alpha)`` on ``eps < |x| < outer``."""

    alpha: float
    eps: float
    scale: float = 1.0
    outer: float | None = None
    n_radial: int = 48
    n_angular: int = 12

    def outer_radius(self, chart: Chart) -> float:
        return chart.radius if self.outer is None else self.outer

    def nodes(self, dim: int, chart: Chart) -> tuple[np.ndarray, np.ndarray]:
        """Chart vectors and weights of the quadrature for this density."""
        if dim > 3:
            raise NotImplementedError("power densities are supported for dim <= 3")
        r_out = self.outer_radius(chart)
        if not 0 < self.eps < r_out:
            raise ValueError("density needs 0 < eps < outer")
        # Gauss-Legendre in u = log r; dr = r du
        u, wu = np.polynomial.legendre.leggauss(self.n_radial)
        lo, hi = np.log(self.eps), np.log(r_out)
        u = 0.5 * (hi - lo) * u + 0.5 * (hi + lo)
        r = np.exp(u)
        wr = 0.5 * (hi - lo) * wu * self.scale * r ** (-(dim + self.alpha)) * r ** (dim - 1) * r
        dirs, wd = _sphere_rule(dim, self.n_angular)
        vecs = (r[:, None, None] * dirs[None, :, :]).reshape(-1, dim)
        weights = (wr[:, None] * wd[None, :]).reshape(-1)
        return vecs, weights

    def truncated_second_moment(self, dim: int) -> float:
        """Mass of ``|x|^2 rho`` removed by the inner cutoff."""
        area = 2 * np.pi ** (dim / 2) / scipy.special.gamma(dim / 2)
        return float(area * self.scale * self.eps ** (2 - self.alpha) / (2 - self.alpha))


def _sphere_rule(dim: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        phi = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1), np.full(n, 2 * np.pi / n)
    z, wz = np.polynomial.legendre.leggauss(n)
    phi = 2 * np.pi * (np.arange(2 * n) + 0.5) / (2 * n)
    Z, PHI = np.meshgrid(z, phi, indexing="ij")
    rho = np.sqrt(1 - Z**2)
    dirs = np.stack([rho * np.cos(PHI), rho * np.sin(PHI), Z], axis=-1).reshape(-1, 3)
    w = (wz[:, None] * np.full(2 * n, 2 * np.pi / (2 * n))[None, :]).reshape(-1)
    return dirs, w


class Jumps(NamedTuple):
    """A discretised Levy measure: jump targets, weights, compensator coordinates."""

    points: np.ndarray   # (J, p)
    weights: np.ndarray  # (J,)
    coords: np.ndarray   # (J, dim), zero outside the chart

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def first_moment(self) -> np.ndarray:
        return self.weights @ self.coords if len(self.weights) else np.zeros(self.coords.shape[1])


@dataclass(frozen=True, eq=False)
class LevyMeasure:
    """Atoms ``(weight, algebra vector)`` plus an optional small-jump density.

    Atom positions are given as algebra vectors ``v`` and placed at ``exp(v)``.
    """

    group: GroupId
    atom_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    atom_vectors: np.ndarray | None = None
    density: PowerDensity | None = None

    def __post_init__(self):
        w = np.asarray(self.atom_weights, dtype=float).reshape(-1)
        v = self.atom_vectors
        v = np.zeros((0, self.group.dim)) if v is None else np.asarray(v, dtype=float).reshape(len(w), self.group.dim)
        object.__setattr__(self, "atom_weights", w)
        object.__setattr__(self, "atom_vectors", v)

    @classmethod
    def atoms(cls, group: GroupId, atoms: Sequence[tuple[float, Sequence[float]]], density=None):
        atoms = list(atoms)
        w = [a[0] for a in atoms]
        v = [np.atleast_1d(np.asarray(a[1], float)) for a in atoms]
        return cls(group, np.array(w), np.array(v).reshape(len(w), group.dim), density)

    @property
    def is_zero(self) -> bool:
        return len(self.atom_weights) == 0 and self.density is None

    def atom_points(self) -> np.ndarray:
        return exp_params(self.group, self.atom_vectors)

    def discretize(self, chart: Chart) -> Jumps:
        pts = [self.atom_points()]
        wts = [self.atom_weights]
        if self.density is not None:
            vecs, w = self.density.nodes(self.group.dim, chart)
            pts.append(exp_params(self.group, vecs))
            wts.append(w)
        points = np.concatenate(pts, axis=0).reshape(-1, self.group.param_size)
        weights = np.concatenate(wts)
        coords = compensator_coords_params(self.group, points, chart)
        return Jumps(points, weights, coords)


@dataclass(frozen=True, eq=False)
class ModulatedKernel:
    """Levy kernel ``mu(s, .) = m(s) * base(.)`` with a positive modulation ``m``."""

    base: LevyMeasure
    modulation: Callable[[np.ndarray], np.ndarray]


class IntegrabilityReport(NamedTuple):
    small_jump_integral: float
    tail_mass: float
    ok: bool
    truncated_second_moment: float = 0.0


def _check_atoms(mu: LevyMeasure):
    if len(mu.atom_weights):
        dist = distance_to_identity(mu.group, mu.atom_points())
        if np.any(dist < 1e-12):
            raise AtomAtIdentity("Levy measures carry no mass at the identity")


def levy_integrability_check(mu: LevyMeasure, chart: Chart | None = None) -> IntegrabilityReport:
    """``int_U sum x_i^2 dmu`` and ``mu(U^c)`` for the discretised measure."""
    chart = chart or Chart()
    _check_atoms(mu)
    jumps = mu.discretize(chart)
    inside = np.any(jumps.coords != 0, axis=1)
    small = float(np.sum(jumps.weights[inside] * np.sum(jumps.coords[inside] ** 2, axis=1)))
    tail = float(np.sum(jumps.weights[~inside]))
    trunc = mu.density.truncated_second_moment(mu.group.dim) if mu.density else 0.0
    ok = bool(np.isfinite(small) and np.isfinite(tail) and np.all(jumps.weights >= 0))
    return IntegrabilityReport(small, tail, ok, trunc)


def _as_field(value, shape: tuple) -> tuple[Callable, bool]:
    if callable(value):
        return value, False
    arr = np.asarray(value, dtype=float).reshape(shape)

    def const(points, arr=arr):
        n = len(np.atleast_2d(points))
        return np.broadcast_to(arr, (n,) + shape)

    return const, True


@dataclass(frozen=True, eq=False)
class Characteristics:
    """The quadruple (c, b, a, mu), each constant or a function of the base point.

    Variable fields are callables on ``(n, p)`` parameter arrays returning
    shapes ``(n,)``, ``(n, dim)`` and ``(n, dim, dim)``; band-limited
    :class:`FourierCoefficients` work directly as ``c``.
    """

    group: GroupId
    c: float | Callable = 0.0
    b: Sequence[float] | Callable | None = None
    a: Sequence[Sequence[float]] | Callable | None = None
    mu: LevyMeasure | ModulatedKernel | None = None
    chart: Chart = field(default_factory=Chart)

    def __post_init__(self):
        dim = self.group.dim
        b = np.zeros(dim) if self.b is None else self.b
        a = np.zeros((dim, dim)) if self.a is None else self.a
        mu = LevyMeasure(self.group) if self.mu is None else self.mu
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "mu", mu)

    @cached_property
    def _fields(self):
        dim = self.group.dim
        c, c_const = _as_field(self.c, ())
        b, b_const = _as_field(self.b, (dim,))
        a, a_const = _as_field(self.a, (dim, dim))
        return c, b, a, c_const and b_const and a_const

    @cached_property
    def jumps(self) -> Jumps:
        base = self.mu.base if isinstance(self.mu, ModulatedKernel) else self.mu
        _check_atoms(base)
        return base.discretize(self.chart)

    @property
    def is_constant(self) -> bool:
        return self._fields[3] and not isinstance(self.mu, ModulatedKernel)

    def c_at(self, points) -> np.ndarray:
        return np.asarray(self._fields[0](points), dtype=float).reshape(-1)

    def b_at(self, points) -> np.ndarray:
        return np.asarray(self._fields[1](points), dtype=float).reshape(-1, self.group.dim)

    def a_at(self, points) -> np.ndarray:
        dim = self.group.dim
        return np.asarray(self._fields[2](points), dtype=float).reshape(-1, dim, dim)

    def modulation_at(self, points) -> np.ndarray:
        n = len(np.atleast_2d(points))
        if isinstance(self.mu, ModulatedKernel):
            return np.asarray(self.mu.modulation(points), dtype=float).reshape(n)
        return np.ones(n)

    def constant_values(self):
        """``(c, b, a)`` for constant characteristics."""
        if not self.is_constant:
            raise NonConstantCharacteristics("characteristics vary with the base point")
        e = np.zeros((1, self.group.param_size))
        return float(self.c_at(e)[0]), self.b_at(e)[0].copy(), self.a_at(e)[0].copy()

    def replace(self, **changes) -> "Characteristics":
        kw = dict(group=self.group, c=self.c, b=self.b, a=self.a, mu=self.mu, chart=self.chart)
        kw.update(changes)
        return Characteristics(**kw)


def validate_characteristics(char: Characteristics, points: np.ndarray) -> list[str]:
    """Problems found when sampling the characteristics at ``points``."""
    issues = []
    c = char.c_at(points)
    if np.any(c < 0):
        issues.append(f"c negative (min {c.min():.3g})")
    a = char.a_at(points)
    asym = np.max(np.abs(a - np.swapaxes(a, 1, 2)), initial=0.0)
    if asym > 1e-12:
        issues.append(f"a not symmetric (residual {asym:.3g})")
    ev = np.linalg.eigvalsh(0.5 * (a + np.swapaxes(a, 1, 2)))
    if np.min(ev) < -1e-10:
        issues.append(f"a not non-negative definite (min eigenvalue {ev.min():.3g})")
    base = char.mu.base if isinstance(char.mu, ModulatedKernel) else char.mu
    rep = levy_integrability_check(base, char.chart)
    if not rep.ok:
        issues.append("Levy measure has negative or non-finite weights")
    m = char.modulation_at(points)
    if np.any(m <= 0):
        issues.append("kernel modulation not positive")
    return issues


def satisfies_continuity(char: Characteristics) -> bool:
    """Continuity of the characteristics and of the kernel in the base point.

    Fields here are constants or band-limited functions, and kernels depend
    on the base point only through a band-limited scalar modulation, so the
    condition holds by construction.  Kept as an explicit predicate.
    """
    return True


def vanishes_at_infinity(char: Characteristics) -> bool:
    """Decay of the kernel tail at infinity: vacuous on a compact group."""
    return True


# ---------------------------------------------------------------------------


def compensator_H(f: FourierCoefficients, g: GroupElement, tau: GroupElement, chart: Chart | None = None):
    """``f(g tau) - f(g) - sum_i x_i(tau) X_i f(g)`` with x extended by 0 off the chart."""
    chart = chart or Chart()
    gt = mul_params(g.group, g.params[None], tau.params[None])
    x = compensator_coords_params(g.group, tau.params[None], chart)[0]
    j = jet(f, g, order=1)
    val = evaluate(f, gt)[0] - j.value[0] - x @ j.grad[0]
    return val.item()


def _jump_part(f: FourierCoefficients, pts: np.ndarray, jumps: Jumps, j) -> np.ndarray:
    n = len(pts)
    J = len(jumps.weights)
    if J == 0:
        return np.zeros(n, dtype=j.value.dtype)
    shifted = mul_params(f.group, pts[:, None, :], jumps.points[None, :, :])
    fs = evaluate(f, shifted.reshape(n * J, -1)).reshape(n, J)
    h = fs - j.value[:, None] - j.grad @ jumps.coords.T
    # fixed-order reduction over jumps so results do not depend on batching
    return h @ jumps.weights


def apply_generator(char: Characteristics, f: FourierCoefficients, sigma):
    """``Af(sigma)``; a GroupElement gives a scalar, an ``(n, p)`` array a vector."""
    pts = _points(sigma)
    j = jet(f, pts, order=2)
    out = -char.c_at(pts) * j.value
    out = out + np.einsum("ni,ni->n", char.b_at(pts), j.grad)
    out = out + np.einsum("njk,njk->n", char.a_at(pts), j.hess)
    out = out + char.modulation_at(pts) * _jump_part(f, pts, char.jumps, j)
    if isinstance(sigma, GroupElement):
        return out[0].item()
    return out


def hunt_apply(char: Characteristics, f: FourierCoefficients, sigma):
    """Killed Hunt generator ``-c f + L f`` for constant characteristics (Hunt when c = 0)."""
    if not char.is_constant:
        raise NonConstantCharacteristics("Hunt generators need constant characteristics")
    return apply_generator(char, f, sigma)


def as_operator(char: Characteristics):
    """Black-box ``A(f, sigma)`` for the given characteristics."""

    def A(f, sigma):
        return apply_generator(char, f, sigma)

    return A
