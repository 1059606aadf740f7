"""Peter-Weyl Fourier analysis on the torus and SU(2).

Conventions::

    fhat(pi) = int_G f(t^{-1}) pi(t) dt = int_G f(t) pi(t)^* dt
    f(s)     = sum_pi d_pi tr(fhat(pi) pi(s))

A function given "as an evaluator" is a callable taking an ``(n, p)`` array of
group parameter vectors (see :mod:`lieflow.groups`) and returning ``n`` values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple

import numpy as np
import scipy.special

from .errors import ResolutionTooLow
from .groups import GroupElement, GroupId, haar_quadrature, resolution_rule
from .reps import (
    Irrep,
    Weight,
    conjugation_matrix,
    derived_products,
    derived_rep,
    enumerate_weights,
    irrep,
    rep_matrices,
)

Evaluator = Callable[[np.ndarray], np.ndarray]

IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """Truncated Fourier data ``label -> fhat(pi_label)``; absent labels are zero.

    ``real`` records that the coefficients come from a real-valued function,
    in which case synthesis returns real numbers.
    """

    group: GroupId
    entries: Mapping[tuple, np.ndarray]
    cutoff: float
    real: bool = True
    _sorted: tuple = field(init=False, repr=False)

    def __post_init__(self):
        clean = {}
        for label, mat in self.entries.items():
            ir = irrep(self.group, label)
            m = np.array(mat, dtype=complex).reshape(ir.dim, ir.dim)
            m.setflags(write=False)
            clean[ir.label] = m
        object.__setattr__(self, "entries", clean)
        order = tuple(sorted(clean, key=lambda lab: Weight.of(lab)))
        object.__setattr__(self, "_sorted", order)

    def __getitem__(self, label) -> np.ndarray:
        ir = irrep(self.group, label)
        if ir.label in self.entries:
            return self.entries[ir.label]
        return np.zeros((ir.dim, ir.dim), dtype=complex)

    @property
    def labels(self) -> tuple:
        return self._sorted

    @property
    def band_limit(self) -> float:
        nz = [Weight.of(lab).norm for lab in self._sorted if np.any(self.entries[lab] != 0)]
        return max(nz, default=0.0)

    def irreps(self):
        return [irrep(self.group, lab) for lab in self._sorted]

    def map(self, fn, real: bool | None = None) -> "FourierCoefficients":
        return FourierCoefficients(
            self.group,
            {lab: fn(lab, m) for lab, m in self.entries.items()},
            self.cutoff,
            self.real if real is None else real,
        )

    def __add__(self, other: "FourierCoefficients") -> "FourierCoefficients":
        labels = set(self.entries) | set(other.entries)
        return FourierCoefficients(
            self.group,
            {lab: self[lab] + other[lab] for lab in labels},
            max(self.cutoff, other.cutoff),
            self.real and other.real,
        )

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, scalar) -> "FourierCoefficients":
        real = self.real and np.isrealobj(scalar)
        return self.map(lambda lab, m: m * scalar, real=real)

    __rmul__ = __mul__

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return evaluate(self, points)


def constant(group: GroupId, value: float = 1.0) -> FourierCoefficients:
    label = (0,) * (group.d if group.is_torus else 1)
    return FourierCoefficients(group, {label: [[value]]}, 0.0, real=np.isrealobj(value))


def coordinate_function(ir: Irrep, i: int, j: int) -> FourierCoefficients:
    """Coefficients of the matrix coefficient ``g -> pi(g)_{ij}``."""
    m = np.zeros((ir.dim, ir.dim), dtype=complex)
    m[j, i] = 1.0 / ir.dim
    return FourierCoefficients(ir.group, {ir.label: m}, ir.weight.norm, real=False)


def conjugate(f: FourierCoefficients) -> FourierCoefficients:
    """Coefficients of the complex conjugate function."""
    if f.group.is_torus:
        entries = {tuple(-v for v in lab): np.conj(m) for lab, m in f.entries.items()}
    else:
        entries = {}
        for lab, m in f.entries.items():
            c = conjugation_matrix(irrep(f.group, lab))
            entries[lab] = np.linalg.solve(c, np.conj(m) @ c)
    return FourierCoefficients(f.group, entries, f.cutoff, f.real)


def real_part(f: FourierCoefficients) -> FourierCoefficients:
    g = conjugate(f)
    labels = set(f.entries) | set(g.entries)
    entries = {lab: 0.5 * (f[lab] + g[lab]) for lab in labels}
    return FourierCoefficients(f.group, entries, f.cutoff, real=True)


def left_translate(f: FourierCoefficients, g: GroupElement) -> FourierCoefficients:
    """Coefficients of ``L_g f = f(g .)``, i.e. ``fhat(pi) pi(g)``."""
    return f.map(lambda lab, m: m @ rep_matrices(irrep(f.group, lab), g.params)[0])


def _points(x) -> np.ndarray:
    if isinstance(x, GroupElement):
        return x.params[None, :]
    return np.atleast_2d(np.asarray(x, dtype=float))


def _finish(f: FourierCoefficients, values: np.ndarray) -> np.ndarray:
    if not f.real:
        return values
    scale = max(1.0, float(np.max(np.abs(values.real), initial=0.0)))
    resid = float(np.max(np.abs(values.imag), initial=0.0))
    if resid > IMAG_TOL * scale:
        raise ValueError(f"real function synthesised with imaginary residue {resid:.3g}")
    return values.real


def _torus_terms(f: FourierCoefficients, pts: np.ndarray):
    freq = np.array(f.labels, dtype=float).reshape(-1, f.group.d)
    coef = np.array([f.entries[lab][0, 0] for lab in f.labels], dtype=complex)
    return np.exp(1j * pts @ freq.T), coef, freq


def evaluate(f: FourierCoefficients, points) -> np.ndarray:
    """Batch synthesis ``sum d tr(fhat pi(s))`` at parameter vectors ``points``."""
    pts = _points(points)
    if f.group.is_torus:
        phases, coef, _ = _torus_terms(f, pts)
        return _finish(f, phases @ coef)
    out = np.zeros(len(pts), dtype=complex)
    for ir in f.irreps():
        m = f.entries[ir.label]
        if not np.any(m):
            continue
        pi = rep_matrices(ir, pts)
        out += ir.dim * np.einsum("ij,nji->n", m, pi)
    return _finish(f, out)


def inverse_ft(coeffs: FourierCoefficients, sigma):
    """Fourier synthesis at a single element (or a batch of parameter vectors)."""
    vals = evaluate(coeffs, sigma)
    if isinstance(sigma, GroupElement):
        return vals[0].item()
    return vals


class Jet(NamedTuple):
    value: np.ndarray   # (n,)
    grad: np.ndarray    # (n, dim): X_i f
    hess: np.ndarray    # (n, dim, dim): X_j X_k f (X_k applied first)


def jet(f: FourierCoefficients, points, order: int = 2) -> Jet:
    """Values and left-invariant derivatives, exact on band-limited ``f``.

    Uses ``X pi(s) = pi(s) dpi(X)``, so
    ``X_j X_k f(s) = sum d tr(fhat pi(s) dpi(X_j) dpi(X_k))``.
    """
    pts = _points(points)
    n, dim = len(pts), f.group.dim
    if f.group.is_torus:
        phases, coef, freq = _torus_terms(f, pts)
        t = phases * coef
        val = t.sum(axis=1)
        grad = 1j * t @ freq
        hess = -np.einsum("nl,lj,lk->njk", t, freq, freq)
        return Jet(_finish(f, val), _finish(f, grad), _finish(f, hess))
    val = np.zeros(n, dtype=complex)
    grad = np.zeros((n, dim), dtype=complex)
    hess = np.zeros((n, dim, dim), dtype=complex)
    for ir in f.irreps():
        m = f.entries[ir.label]
        if not np.any(m):
            continue
        t = ir.dim * np.einsum("ab,nbc->nac", m, rep_matrices(ir, pts))
        val += np.einsum("naa->n", t)
        if order >= 1:
            grad += np.einsum("nab,iba->ni", t, derived_rep(ir))
        if order >= 2:
            hess += np.einsum("nab,jkba->njk", t, derived_products(ir))
    return Jet(_finish(f, val), _finish(f, grad), _finish(f, hess))


def forward_ft(
    f: Evaluator,
    group: GroupId,
    max_norm: float,
    resolution: int | None = None,
) -> FourierCoefficients:
    """Fourier coefficients up to ``max_norm`` by Haar quadrature.

    The default resolution follows :func:`lieflow.groups.resolution_rule`
    (``4*max_norm + 1`` per torus axis, ``2*max_norm + 3`` per SU(2) Euler
    axis); a smaller value triggers :class:`ResolutionTooLow`.
    """
    rule = resolution_rule(group, max_norm)
    if resolution is None:
        resolution = rule
    elif resolution < rule:
        warnings.warn(
            ResolutionTooLow(f"resolution {resolution} below {rule} for max_norm {max_norm}"),
            stacklevel=2,
        )
    quad = haar_quadrature(group, resolution)
    values = np.asarray(f(quad.points))
    is_real = np.isrealobj(values) or bool(np.max(np.abs(values.imag), initial=0.0) == 0.0)
    weights = enumerate_weights(group, max_norm)
    entries = {}
    if group.is_torus:
        # same uniform quadrature sum, evaluated with an FFT
        grid = values.reshape((resolution,) * group.d)
        spec = np.fft.fftn(grid) / grid.size
        for w in weights:
            idx = tuple(v % resolution for v in w.label)
            entries[w.label] = [[spec[idx]]]
    else:
        wv = quad.weights * values
        for w in weights:
            ir = irrep(group, w.label)
            pi = rep_matrices(ir, quad.points)
            entries[w.label] = np.einsum("n,nji->ij", wv, np.conj(pi))
    return FourierCoefficients(group, entries, float(max_norm), real=is_real)


def truncate(f: FourierCoefficients, max_norm: float) -> tuple[FourierCoefficients, float]:
    """Drop weights above ``max_norm``; returns the kept part and the dropped HS mass."""
    keep, tail = {}, 0.0
    for lab, m in f.entries.items():
        w = Weight.of(lab)
        if w.norm <= max_norm + 1e-12:
            keep[lab] = m
        else:
            tail += irrep(f.group, lab).dim * float(np.sum(np.abs(m) ** 2))
    return FourierCoefficients(f.group, keep, float(max_norm), f.real), tail


def plancherel_norm2(f: FourierCoefficients) -> float:
    """``sum d_pi ||fhat(pi)||_HS^2`` which equals ``int |f|^2``."""
    return float(sum(irrep(f.group, lab).dim * np.sum(np.abs(m) ** 2) for lab, m in f.entries.items()))


def multiply_functions(f: FourierCoefficients, g: FourierCoefficients) -> FourierCoefficients:
    """Coefficients of the pointwise product (exact: band limits add)."""
    top = f.band_limit + g.band_limit
    prod = forward_ft(lambda p: evaluate(f, p) * evaluate(g, p), f.group, top)
    return FourierCoefficients(prod.group, prod.entries, prod.cutoff, f.real and g.real)


def decay_profile(coeffs: FourierCoefficients) -> list[tuple[float, float]]:
    """``(|lambda|, ||fhat(lambda)||_HS)`` in weight order."""
    return [
        (Weight.of(lab).norm, float(np.linalg.norm(coeffs.entries[lab])))
        for lab in coeffs.labels
    ]


class ZetaResult(NamedTuple):
    partial_sum: float
    convergent: bool
    n_terms: int
    tail_estimate: float


def _torus_shell_counts(d: int, max_sq: int) -> np.ndarray:
    """Number of lattice points n in Z^d with |n|^2 = r, for r <= max_sq."""
    r1 = np.zeros(max_sq + 1)
    j = np.arange(int(np.floor(np.sqrt(max_sq))) + 1)
    r1[j**2] = 2.0
    r1[0] = 1.0
    counts = r1.copy()
    for _ in range(d - 1):
        nxt = np.zeros_like(counts)
        for jj in j:
            mult = 1.0 if jj == 0 else 2.0
            nxt[jj * jj:] += mult * counts[: max_sq + 1 - jj * jj]
        counts = nxt
    return counts


def sugiura_zeta(group: GroupId, s: float, max_norm: float) -> ZetaResult:
    """Partial sum of ``sum_{lambda != 0, |lambda| <= max_norm} |lambda|^{-2s}``.

    The full series converges iff ``2s > rank``.  ``tail_estimate`` is the
    remainder beyond ``max_norm`` (exact Hurwitz zeta where available,
    otherwise the integral approximation), ``inf`` when divergent.
    """
    if max_norm < 1:
        raise ValueError("max_norm must be >= 1")
    convergent = 2.0 * s > group.rank
    m = int(np.floor(max_norm))
    if group.is_torus and group.d > 1:
        max_sq = int(np.floor(max_norm**2 + 1e-9))
        counts = _torus_shell_counts(group.d, max_sq)
        r = np.arange(1, max_sq + 1, dtype=float)
        c = counts[1:]
        partial = float(np.sum(c * r ** (-s)))
        n_terms = int(np.sum(c))
        if convergent:
            area = 2 * np.pi ** (group.d / 2) / scipy.special.gamma(group.d / 2)
            tail = float(area * max_norm ** (group.d - 2 * s) / (2 * s - group.d))
        else:
            tail = float("inf")
        return ZetaResult(partial, convergent, n_terms, tail)
    mult = 2.0 if group.is_torus else 1.0
    k = np.arange(1, m + 1, dtype=float)
    partial = float(mult * np.sum(k ** (-2.0 * s)))
    tail = float(mult * scipy.special.zeta(2.0 * s, m + 1)) if convergent else float("inf")
    return ZetaResult(partial, convergent, int(mult * m), tail)
