"""Group arithmetic, exponential map, canonical charts and Haar quadrature.

Two groups are supported: the d-torus T^d and SU(2).

Elements are stored as parameter vectors:

* ``Torus(d)``: angles in [0, 2*pi)^d; the Lie algebra basis is X_i = d/d theta_i.
* ``SU2``: unit quaternions (w, x, y, z) standing for the matrix
  ``w*I - i*(x*s1 + y*s2 + z*s3)`` with Pauli matrices s_i.  The Lie algebra
  basis is X_i = -i*s_i/2, so ``[X_1, X_2] = X_3`` (cyclic).

Most functions here come in two flavours: one acting on a single
:class:`GroupElement` and a batch version (suffix ``_params``) acting on an
``(n, p)`` array of parameter vectors.  The batch versions are what the
spectral and Monte Carlo code uses internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .errors import GroupMismatch, OutOfChart

TWO_PI = 2.0 * np.pi

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SU2_BASIS = -0.5j * _PAULI


@dataclass(frozen=True)
class GroupId:
    """Which group we are working on: ``GroupId("torus", d)`` or ``GroupId("su2")``."""

    kind: str
    d: int = 1

    def __post_init__(self):
        if self.kind not in ("torus", "su2"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "torus" and self.d < 1:
            raise ValueError("torus dimension must be >= 1")
        if self.kind == "su2" and self.d != 1:
            object.__setattr__(self, "d", 1)

    @classmethod
    def torus(cls, d: int = 1) -> "GroupId":
        return cls("torus", d)

    @classmethod
    def su2(cls) -> "GroupId":
        return cls("su2")

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    @property
    def dim(self) -> int:
        """Dimension of the Lie algebra."""
        return self.d if self.is_torus else 3

    @property
    def param_size(self) -> int:
        return self.d if self.is_torus else 4

    @property
    def rank(self) -> int:
        return self.d if self.is_torus else 1

    @property
    def n_positive_roots(self) -> int:
        return 0 if self.is_torus else 1

    def __str__(self):
        return f"torus{self.d}" if self.is_torus else "su2"


@dataclass(frozen=True, eq=False)
class GroupElement:
    group: GroupId
    params: np.ndarray

    def __post_init__(self):
        p = np.array(self.params, dtype=float).reshape(-1)
        if p.size != self.group.param_size:
            raise ValueError(
                f"{self.group} element needs {self.group.param_size} parameters, got {p.size}"
            )
        p = normalize_params(self.group, p[None, :])[0]
        p.setflags(write=False)
        object.__setattr__(self, "params", p)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __repr__(self):
        return f"GroupElement({self.group}, {np.array2string(self.params, precision=6)})"


@dataclass(frozen=True)
class Chart:
    """Canonical (first kind) coordinate ball ``U = exp({|v| < radius})``."""

    radius: float = 0.9 * np.pi
    symmetric: bool = field(default=True, init=False)

    def __post_init__(self):
        if not 0.0 < self.radius < np.pi:
            raise ValueError("chart radius must lie in (0, pi)")


# ---------------------------------------------------------------------------
# batch primitives


def normalize_params(group: GroupId, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if group.is_torus:
        return np.mod(p, TWO_PI)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def identity_params(group: GroupId, n: int = 1) -> np.ndarray:
    p = np.zeros((n, group.param_size))
    if not group.is_torus:
        p[:, 0] = 1.0
    return p


def quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    w1, v1 = p[..., :1], p[..., 1:]
    w2, v2 = q[..., :1], q[..., 1:]
    w = w1 * w2 - np.sum(v1 * v2, axis=-1, keepdims=True)
    v = w1 * v2 + w2 * v1 + np.cross(v1, v2)
    return np.concatenate([w, v], axis=-1)


def mul_params(group: GroupId, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    if group.is_torus:
        return np.mod(p + q, TWO_PI)
    r = quat_mul(p, q)
    return r / np.linalg.norm(r, axis=-1, keepdims=True)


def inv_params(group: GroupId, p: np.ndarray) -> np.ndarray:
    if group.is_torus:
        return np.mod(-p, TWO_PI)
    out = -np.array(p, dtype=float)
    out[..., 0] *= -1.0
    return out


def exp_params(group: GroupId, v: np.ndarray) -> np.ndarray:
    """Exponential of algebra vectors ``v`` of shape (..., dim)."""
    v = np.asarray(v, dtype=float)
    if group.is_torus:
        return np.mod(v, TWO_PI)
    theta = np.linalg.norm(v, axis=-1, keepdims=True)
    half = 0.5 * theta
    small = theta < 1e-8
    # sin(theta/2)/theta with its Taylor limit near 0
    sinc = np.where(small, 0.5 - theta**2 / 48, np.sin(half) / np.where(small, 1.0, theta))
    return np.concatenate([np.cos(half), sinc * v], axis=-1)


def log_params(group: GroupId, p: np.ndarray) -> np.ndarray:
    """Principal logarithm; coordinates of norm < pi (torus) or <= 2*pi (SU2)."""
    p = np.asarray(p, dtype=float)
    if group.is_torus:
        return np.mod(p + np.pi, TWO_PI) - np.pi
    w = p[..., :1]
    u = p[..., 1:]
    s = np.linalg.norm(u, axis=-1, keepdims=True)
    angle = 2.0 * np.arctan2(s, w)
    small = s < 1e-12
    factor = np.where(small, 2.0 / np.where(small, w, 1.0), angle / np.where(small, 1.0, s))
    x = factor * u
    # -I has no principal logarithm direction; place it on the cut locus
    cut = (small & (w < 0))[..., 0]
    if np.any(cut):
        x = np.array(x)
        x[cut] = [TWO_PI, 0.0, 0.0]
    return x


def chart_coords_params(group: GroupId, p: np.ndarray, chart: Chart) -> tuple[np.ndarray, np.ndarray]:
    """Canonical coordinates and an in-chart mask for a batch of elements."""
    x = log_params(group, p)
    inside = np.linalg.norm(x, axis=-1) < chart.radius
    return x, inside


def compensator_coords_params(group: GroupId, p: np.ndarray, chart: Chart) -> np.ndarray:
    """Canonical coordinates extended by zero outside the chart (hard cutoff)."""
    x, inside = chart_coords_params(group, p, chart)
    return np.where(inside[..., None], x, 0.0)


def su2_matrix_params(p: np.ndarray) -> np.ndarray:
    w, x, y, z = (p[..., i] for i in range(4))
    a = w - 1j * z
    b = y - 1j * x
    out = np.empty(p.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = -np.conj(b)
    out[..., 1, 0] = b
    out[..., 1, 1] = np.conj(a)
    return out


def euler_from_params(p: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ZYZ Euler angles with ``g = exp(alpha X3) exp(beta X2) exp(gamma X3)``."""
    w, x, y, z = (p[..., i] for i in range(4))
    a = w - 1j * z
    b = y - 1j * x
    beta = 2.0 * np.arctan2(np.abs(b), np.abs(a))
    plus = -2.0 * np.angle(a)   # alpha + gamma
    minus = 2.0 * np.angle(b)   # alpha - gamma
    return 0.5 * (plus + minus), beta, 0.5 * (plus - minus)


def params_from_euler(alpha, beta, gamma) -> np.ndarray:
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    )
    zero = np.zeros_like(alpha)
    qa = np.stack([np.cos(alpha / 2), zero, zero, np.sin(alpha / 2)], axis=-1)
    qb = np.stack([np.cos(beta / 2), zero, np.sin(beta / 2), zero], axis=-1)
    qg = np.stack([np.cos(gamma / 2), zero, zero, np.sin(gamma / 2)], axis=-1)
    return quat_mul(quat_mul(qa, qb), qg)


# ---------------------------------------------------------------------------
# single-element API


def identity(group: GroupId) -> GroupElement:
    return GroupElement(group, identity_params(group)[0])


def _check_same(g: GroupElement, h: GroupElement):
    if g.group != h.group:
        raise GroupMismatch(f"cannot combine elements of {g.group} and {h.group}")


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    _check_same(g, h)
    return GroupElement(g.group, mul_params(g.group, g.params, h.params))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.group, inv_params(g.group, g.params))


def exp_map(group: GroupId, v) -> GroupElement:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != group.dim:
        raise ValueError(f"algebra vector for {group} must have length {group.dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError("algebra vector must be finite")
    return GroupElement(group, exp_params(group, v))


def canonical_coords(g: GroupElement, chart: Chart | None = None) -> np.ndarray:
    """Coordinates ``x`` with ``exp(sum x_i X_i) = g``; raises OutOfChart outside U."""
    chart = chart or Chart()
    x = log_params(g.group, g.params)
    if not np.linalg.norm(x) < chart.radius:
        raise OutOfChart(f"{g!r} lies outside the chart of radius {chart.radius}")
    return x


def as_matrix(g: GroupElement) -> np.ndarray:
    if g.group.is_torus:
        return np.diag(np.exp(1j * g.params))
    return su2_matrix_params(g.params)


def distance_to_identity(group: GroupId, p: np.ndarray) -> np.ndarray:
    return np.linalg.norm(log_params(group, p), axis=-1)


# ---------------------------------------------------------------------------
# Haar quadrature


class Quadrature(NamedTuple):
    group: GroupId
    points: np.ndarray
    weights: np.ndarray

    def __iter__(self) -> Iterator:  # type: ignore[override]
        for p, w in zip(self.points, self.weights):
            yield GroupElement(self.group, p), w

    def __len__(self):
        return len(self.weights)

    def integrate(self, values: np.ndarray):
        return np.tensordot(self.weights, values, axes=(0, 0))


def haar_quadrature(group: GroupId, resolution: int) -> Quadrature:
    """Normalised Haar quadrature with ``resolution`` nodes per axis.

    Torus(d): uniform tensor grid of ``resolution**d`` nodes; exact for
    trigonometric polynomials with all frequencies ``|n_i| < resolution``.

    SU2: Euler angles with ``N`` uniform nodes for alpha on [0, 2pi), ``N``
    uniform nodes for gamma on [0, 4pi) and ``N`` Gauss-Legendre nodes in
    cos(beta); ``N`` is ``resolution`` rounded up to even.  Exact for
    integrands in the span of matrix coefficients with ``k = 2l < N``.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if group.is_torus:
        axis = TWO_PI * np.arange(resolution) / resolution
        mesh = np.meshgrid(*([axis] * group.d), indexing="ij")
        points = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        weights = np.full(len(points), 1.0 / len(points))
        return Quadrature(group, points, weights)
    n = resolution + (resolution % 2)
    alpha = TWO_PI * np.arange(n) / n
    gamma = 2 * TWO_PI * np.arange(n) / n
    x, wx = np.polynomial.legendre.leggauss(n)
    beta = np.arccos(x[::-1])
    wb = wx[::-1] / 2.0
    A, B, C = np.meshgrid(alpha, beta, gamma, indexing="ij")
    W = np.broadcast_to(wb[None, :, None], A.shape) / (n * n)
    points = params_from_euler(A.reshape(-1), B.reshape(-1), C.reshape(-1))
    weights = np.ascontiguousarray(W.reshape(-1))
    # re-normalise against Gauss-Legendre round-off
    weights = weights / weights.sum()
    return Quadrature(group, points, weights)


def resolution_rule(group: GroupId, max_norm: float) -> int:
    """Resolution that makes transforms up to ``max_norm`` exact on the band-limited class."""
    m = int(np.floor(max_norm))
    if group.is_torus:
        return 4 * m + 1
    return 2 * m + 3


def random_elements(group: GroupId, n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random parameter vectors."""
    if group.is_torus:
        return rng.uniform(0.0, TWO_PI, size=(n, group.d))
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def random_in_chart(group: GroupId, n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Algebra vectors drawn uniformly from the ball of the given radius."""
    dim = group.dim
    v = rng.standard_normal((n, dim))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    r = radius * rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / dim)
    return v * r
