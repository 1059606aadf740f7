"""Matrix-valued symbols, synthesis from symbols and spectral Hunt evolution.

The symbol of ``A`` at ``(s, pi)`` is ``pi(s)^{-1} (A pi)(s)``.  For the
Levy-type operators of :mod:`lieflow.generator` it has the closed form::

    -c(s) I + sum_i b_i(s) dpi(X_i) + sum_jk a_jk(s) dpi(X_j) dpi(X_k)
      + m(s) * sum_jumps w (pi(t) - I - sum_i x_i(t) dpi(X_i))

and ``Af(s) = sum_pi d_pi tr(j(s, pi) fhat(pi) pi(s))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import MissingWeight, NegativeTime, NonConstantCharacteristics
from .fourier import FourierCoefficients, _points, coordinate_function
from .generator import Characteristics
from .groups import GroupElement, GroupId, haar_quadrature
from .reps import Irrep, derived_products, derived_rep, enumerate_weights, irrep, rep_matrices


def _symbol_batch(char: Characteristics, pts: np.ndarray, ir: Irrep) -> np.ndarray:
    """Symbol matrices at a batch of base points; shape (n, d_pi, d_pi)."""
    n, d = len(pts), ir.dim
    dpi = derived_rep(ir)
    eye = np.eye(d, dtype=complex)
    out = -char.c_at(pts)[:, None, None] * eye
    out = out + np.einsum("ni,iab->nab", char.b_at(pts), dpi)
    out = out + np.einsum("njk,jkab->nab", char.a_at(pts), derived_products(ir))
    jumps = char.jumps
    if len(jumps.weights):
        pit = rep_matrices(ir, jumps.points)
        integrand = pit - eye - np.einsum("ti,iab->tab", jumps.coords, dpi)
        jump = np.einsum("t,tab->ab", jumps.weights, integrand)
        out = out + char.modulation_at(pts)[:, None, None] * jump
    return out.reshape(n, d, d)


def symbol_at(char: Characteristics, sigma: GroupElement, ir: Irrep) -> np.ndarray:
    """Closed-form symbol ``j_A(sigma, pi)`` of the Levy-type operator."""
    return _symbol_batch(char, _points(sigma), ir)[0]


def symbol_via_conjugation(A: Callable, sigma: GroupElement, ir: Irrep) -> np.ndarray:
    """``pi(sigma)^{-1} (A pi)(sigma)`` with ``A`` applied to each coordinate function."""
    d = ir.dim
    a_pi = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            a_pi[i, j] = A(coordinate_function(ir, i, j), sigma)
    pi = rep_matrices(ir, _points(sigma))[0]
    # unitary: inverse is the adjoint
    return pi.conj().T @ a_pi


@dataclass(frozen=True, eq=False)
class Symbol:
    """Symbol matrices by weight label.

    Hunt symbols store one ``(d, d)`` matrix per label; otherwise each label
    maps to an ``(n_grid, d, d)`` stack over the base-point grid ``grid``.
    """

    group: GroupId
    entries: dict
    hunt_constant: bool
    grid: np.ndarray | None = None

    @property
    def labels(self) -> tuple:
        return tuple(self.entries)

    @property
    def max_norm(self) -> float:
        return max((float(np.linalg.norm(lab)) for lab in self.entries), default=0.0)

    def stack(self, label) -> np.ndarray:
        m = self.entries[label]
        return m[None] if self.hunt_constant else m

    def at(self, sigma_index: int, label) -> np.ndarray:
        m = self.entries[label]
        return m if self.hunt_constant else m[sigma_index]

    def grid_index(self, sigma: GroupElement) -> int:
        if self.hunt_constant:
            return 0
        diff = np.abs(self.grid - sigma.params[None, :]).max(axis=1)
        i = int(np.argmin(diff))
        if diff[i] > 1e-12:
            raise ValueError("base point is not a node of the symbol grid")
        return i


def assemble_symbol(
    char: Characteristics,
    max_norm: float,
    grid: np.ndarray | None = None,
    resolution: int | None = None,
) -> Symbol:
    """Symbol of ``char`` on all weights up to ``max_norm``.

    Constant characteristics give a Hunt symbol.  Otherwise the symbol is
    stored on ``grid`` (default: Haar quadrature nodes at ``resolution``).
    """
    weights = enumerate_weights(char.group, max_norm)
    if char.is_constant:
        e = np.zeros((1, char.group.param_size))
        if not char.group.is_torus:
            e[0, 0] = 1.0
        entries = {w.label: _symbol_batch(char, e, irrep(char.group, w.label))[0] for w in weights}
        return Symbol(char.group, entries, True)
    if grid is None:
        grid = haar_quadrature(char.group, resolution or 8).points
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    entries = {w.label: _symbol_batch(char, grid, irrep(char.group, w.label)) for w in weights}
    return Symbol(char.group, entries, False, grid)


def _check_range(sym: Symbol, f: FourierCoefficients):
    missing = [lab for lab, m in f.entries.items() if lab not in sym.entries and np.any(m)]
    if missing:
        raise MissingWeight(f"function has weights {sorted(missing)} outside the symbol range")


def synthesize(sym: Symbol, f: FourierCoefficients, sigma):
    """``sum d tr(j(sigma, pi) fhat(pi) pi(sigma))``.

    ``sigma`` is a GroupElement (scalar result) or, for Hunt symbols, an
    ``(n, p)`` array of base points.
    """
    _check_range(sym, f)
    pts = _points(sigma)
    if sym.hunt_constant:
        idx = np.zeros(len(pts), dtype=int)
    else:
        if not isinstance(sigma, GroupElement):
            idx = np.array([sym.grid_index(GroupElement(sym.group, p)) for p in pts])
        else:
            idx = np.array([sym.grid_index(sigma)])
    out = np.zeros(len(pts), dtype=complex)
    for lab, m in f.entries.items():
        if not np.any(m):
            continue
        ir = irrep(sym.group, lab)
        jm = sym.stack(lab)[idx]
        pi = rep_matrices(ir, pts)
        out += ir.dim * np.einsum("nab,bc,nca->n", jm, m, pi)
    if f.real:
        scale = max(1.0, float(np.max(np.abs(out.real), initial=0.0)))
        if np.max(np.abs(out.imag), initial=0.0) > 1e-10 * scale:
            raise ValueError("synthesised operator output has an imaginary residue")
        out = out.real
    if isinstance(sigma, GroupElement):
        return out[0].item()
    return out


def evolve_semigroup(sym: Symbol, f: FourierCoefficients, t: float) -> FourierCoefficients:
    """Hunt semigroup in Fourier space: ``fhat_t(pi) = exp(t j(pi)) fhat(pi)``."""
    if t < 0:
        raise NegativeTime(f"t = {t} < 0")
    if not sym.hunt_constant:
        raise NonConstantCharacteristics("spectral evolution needs a Hunt (constant) symbol")
    _check_range(sym, f)
    if t == 0:
        return f
    return f.map(lambda lab, m: scipy.linalg.expm(t * sym.entries[lab]) @ m if lab in sym.entries else m)


def growth_bound_check(sym: Symbol, weights: Sequence | None = None) -> list[tuple[float, float]]:
    """``(|lambda|, sup_sigma ||j(sigma, lambda)||_HS / (1 + |lambda|^(m+2)))`` per weight."""
    m = sym.group.n_positive_roots
    labels = sym.labels if weights is None else [tuple(np.atleast_1d(getattr(w, "label", w))) for w in weights]
    rows = []
    for lab in sorted(labels, key=lambda lab: (float(np.linalg.norm(lab)), lab)):
        norm = float(np.linalg.norm(lab))
        hs = np.sqrt(np.sum(np.abs(sym.stack(lab)) ** 2, axis=(1, 2))).max()
        rows.append((norm, float(hs / (1 + norm ** (m + 2)))))
    return rows
