"""Named real-valued functions used by the CLI and the tests."""

from __future__ import annotations

import numpy as np

from .fourier import FourierCoefficients, coordinate_function, forward_ft, real_part
from .groups import GroupId, inv_params, log_params, mul_params, exp_params
from .reps import irrep

NAMES = ("one", "cos_theta", "exp_cos", "bump", "triangle", "gevrey", "matrix_coeff")


def exp_cos_values(group: GroupId, p: np.ndarray) -> np.ndarray:
    if group.is_torus:
        return np.exp(np.cos(p[..., 0]))
    return np.exp(p[..., 0])


def bump_values(group: GroupId, p: np.ndarray, radius: float = 1.0, center=None) -> np.ndarray:
    """``exp(1 - 1/(1 - (r/radius)^2))`` in the canonical distance from ``center``."""
    p = np.atleast_2d(p)
    if center is not None:
        c = exp_params(group, np.asarray(center, dtype=float))
        p = mul_params(group, inv_params(group, c)[None, :], p)
    r = np.linalg.norm(log_params(group, p), axis=-1) / radius
    out = np.zeros(len(p))
    inside = r < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


def triangle_values(group: GroupId, p: np.ndarray) -> np.ndarray:
    """Triangle wave ``pi - |theta - pi|`` in the first torus angle: continuous, not C^1."""
    if not group.is_torus:
        raise ValueError("triangle is defined on the torus only")
    theta = np.mod(p[..., 0], 2 * np.pi)
    return np.pi - np.abs(theta - np.pi)


def one(group: GroupId) -> FourierCoefficients:
    label = (0,) * (group.d if group.is_torus else 1)
    return FourierCoefficients(group, {label: [[1.0]]}, 0.0)


def cos_theta(group: GroupId) -> FourierCoefficients:
    """``cos theta_1`` on the torus; on SU(2) the quaternion real part ``tr(g)/2``."""
    if group.is_torus:
        e1 = (1,) + (0,) * (group.d - 1)
        m1 = (-1,) + (0,) * (group.d - 1)
        return FourierCoefficients(group, {e1: [[0.5]], m1: [[0.5]]}, 1.0)
    return FourierCoefficients(group, {(1,): 0.25 * np.eye(2)}, 1.0)


def gevrey(group: GroupId, max_norm: float, rate: float = 4.0) -> FourierCoefficients:
    """``1 + 2 sum_n exp(-rate sqrt(n)) cos(n theta_1)``: smooth, slower than analytic decay."""
    if not group.is_torus:
        raise ValueError("gevrey is defined on the torus only")
    pad = (0,) * (group.d - 1)
    m = int(np.floor(max_norm))
    entries = {(n,) + pad: [[np.exp(-rate * np.sqrt(abs(n)))]] for n in range(-m, m + 1)}
    return FourierCoefficients(group, entries, float(m))


def matrix_coeff(group: GroupId, label, i: int, j: int) -> FourierCoefficients:
    """Real part of the matrix coefficient ``g -> pi_label(g)_{ij}``."""
    return real_part(coordinate_function(irrep(group, label), i, j))


def parse_label(text: str) -> tuple:
    return tuple(int(v) for v in str(text).replace(";", ",").split(","))


def named(group: GroupId, name: str, max_norm: float, resolution: int | None = None, **opts) -> FourierCoefficients:
    """Coefficients of a named function; ``matrix_coeff`` takes ``"matrix_coeff k i j"``."""
    parts = name.split()
    base = parts[0]
    if base == "matrix_coeff":
        if len(parts) != 4:
            raise ValueError("matrix_coeff needs 'matrix_coeff <label> <i> <j>'")
        return matrix_coeff(group, parse_label(parts[1]), int(parts[2]), int(parts[3]))
    if len(parts) != 1:
        raise ValueError(f"unexpected arguments for {base}")
    if base == "one":
        return one(group)
    if base == "cos_theta":
        return cos_theta(group)
    if base == "gevrey":
        return gevrey(group, max_norm, **opts)
    if base == "exp_cos":
        return forward_ft(lambda p: exp_cos_values(group, p), group, max_norm, resolution)
    if base == "bump":
        return forward_ft(lambda p: bump_values(group, p, **opts), group, max_norm, resolution)
    if base == "triangle":
        return forward_ft(lambda p: triangle_values(group, p), group, max_norm, resolution)
    raise ValueError(f"unknown function {base!r}; known: {', '.join(NAMES)}")
